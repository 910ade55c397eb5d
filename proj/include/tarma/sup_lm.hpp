// Copyright 2026 The tarmagarch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TARMA__SUP_LM_HPP_
#define TARMA__SUP_LM_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "tarma/core.hpp"
#include "tarma/critical_values.hpp"
#include "tarma/error.hpp"
#include "tarma/estimate.hpp"
#include "tarma/score.hpp"

namespace tarma
{

enum class LmMethod
{
  slmg,  // GARCH innovations
  slm,   // constant conditional variance
};

inline std::string to_string(LmMethod m) {return m == LmMethod::slmg ? "sLMg" : "sLM";}
inline std::string to_string(CvSource s) {return s == CvSource::table ? "table" : "simulated";}

struct TracePoint
{
  double r = 0.0;
  double statistic = 0.0;  // 0 when degenerate
  bool degenerate = false;

  bool operator==(const TracePoint &) const = default;
};

struct SupLmResult
{
  double statistic = 0.0;
  double arg_r = 0.0;
  std::size_t arg_index = 0;
  std::vector<TracePoint> trace;
  int dim = 1;
  double pi0 = 0.25;
  std::map<double, double> critical_values;  // alpha -> value
  std::optional<double> p_value;
  LmMethod method = LmMethod::slmg;
  CvSource cv_source = CvSource::table;
  ArmaGarchParams null_params;
  bool null_converged = false;

  /// True when the statistic exceeds the critical value at `alpha`.
  bool rejects(double alpha) const
  {
    for (const auto & [a, v] : critical_values) {
      if (std::abs(a - alpha) < 1e-12) {return statistic > v;}
    }
    throw std::out_of_range("no critical value stored for alpha " + detail::format_double(alpha));
  }

  bool operator==(const SupLmResult &) const = default;
};

struct CvOptions
{
  CvSource source = CvSource::table;
  std::vector<double> alphas{0.10, 0.05, 0.025, 0.01};
  int n_sim = 2000;
  std::uint64_t seed = 1;
  bool p_value = false;   // simulated p-value; always computed for the simulated source
  const CriticalValueTable * table = nullptr;  // defaults to the shipped table
};

struct SupLmOptions
{
  CvOptions cv;
  FitOptions fit;
  InformationForm information = InformationForm::expected;
  int threads = 1;
};

/// Null fit used by each method: Gaussian QMLE for sLMg, conditional sum of squares for sLM.
inline FittedArmaGarch fit_null(
  const TimeSeries & series, int p, int q, int u, int v, LmMethod method,
  const FitOptions & opts = {})
{
  if (method == LmMethod::slmg) {
    if (u + v < 1) {throw std::invalid_argument("sLMg requires u + v >= 1");}
    return fit_arma_garch(series, p, q, u, v, opts);
  }
  return fit_arma_css(series, p, q, opts);
}

/// T(r) at every candidate, in grid order. Work is split over `threads` workers by
/// index, so the output does not depend on the worker count.
inline std::vector<TracePoint> lm_trace(
  const LmEvaluator & ev, const std::vector<double> & candidates, int threads = 1)
{
  std::vector<TracePoint> trace(candidates.size());
  auto work = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const auto v = ev.evaluate(candidates[i]);
        trace[i] = TracePoint{candidates[i], v.degenerate ? 0.0 : v.statistic, v.degenerate};
      }
    };
  const auto nt = static_cast<std::size_t>(std::max(1, threads));
  if (nt == 1 || candidates.size() < 2 * nt) {
    work(0, candidates.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (candidates.size() + nt - 1) / nt;
    for (std::size_t w = 0; w < nt; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(candidates.size(), b + chunk);
      if (b < e) {pool.emplace_back(work, b, e);}
    }
    for (auto & th : pool) {th.join();}
  }
  return trace;
}

/// Kernel of the limiting process on the non-degenerate candidates of a trace,
/// estimated by sample cross-moments of the projected derivative processes.
inline SupKernel kernel_from_evaluator(const LmEvaluator & ev, const std::vector<TracePoint> & trace)
{
  const double n = static_cast<double>(ev.size());
  const Eigen::Index k = ev.dim();
  std::vector<double> r;
  for (const auto & tp : trace) {
    if (!tp.degenerate) {r.push_back(tp.r);}
  }
  if (r.empty()) {throw NumericError("no non-degenerate candidate for the kernel");}
  const auto g = static_cast<Eigen::Index>(r.size());
  Eigen::MatrixXd stacked(g * k, 2 * static_cast<Eigen::Index>(ev.size()));
  for (Eigen::Index i = 0; i < g; ++i) {
    stacked.middleRows(i * k, k) = ev.projected_scores(r[static_cast<std::size_t>(i)]);
  }
  SupKernel out;
  out.dim = static_cast<int>(k);
  out.r = std::move(r);
  out.cov = Eigen::MatrixXd::Zero(g * k, g * k);
  out.cov.selfadjointView<Eigen::Lower>().rankUpdate(stacked, 1.0 / n);
  out.cov.triangularView<Eigen::StrictlyUpper>() = out.cov.transpose();
  return out;
}

/// Sup-LM test of ARMA(p,q)-GARCH(u,v) against TARMA(p,q)-GARCH(u,v) with delay d.
inline SupLmResult sup_lm_test(
  const TimeSeries & series, int p, int q, int u, int v, int d, const ThresholdGrid & grid,
  LmMethod method, const SupLmOptions & opts = {})
{
  if (grid.candidates.empty()) {throw DataError("threshold grid is empty");}
  const auto fit = fit_null(series, p, q, u, v, method, opts.fit);
  if (!fit.converged) {throw NumericError("null-model fit did not converge");}
  const LmEvaluator ev(fit.params, series, d, fit.h_presample, opts.information);

  SupLmResult res;
  res.method = method;
  res.dim = p + q + 1;
  res.pi0 = grid.pi0;
  res.null_params = fit.params;
  res.null_converged = fit.converged;
  res.trace = lm_trace(ev, grid.candidates, opts.threads);

  bool any = false;
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    const auto & tp = res.trace[i];
    if (tp.degenerate) {continue;}
    if (!any || tp.statistic > res.statistic) {
      res.statistic = tp.statistic;
      res.arg_r = tp.r;
      res.arg_index = i;
      any = true;
    }
  }
  if (!any) {throw NumericError("every threshold candidate is degenerate");}

  const CriticalValueTable & table = opts.cv.table ? *opts.cv.table : default_table();
  bool need_sim = opts.cv.source == CvSource::simulated || opts.cv.p_value;
  if (!need_sim) {
    for (double a : opts.cv.alphas) {
      if (!table.lookup(res.dim, res.pi0, a)) {need_sim = true;}
    }
  }
  res.cv_source = opts.cv.source;
  std::vector<double> draws;
  if (need_sim) {
    draws = simulate_sup_distribution(kernel_from_evaluator(ev, res.trace), opts.cv.n_sim, opts.cv.seed);
    res.p_value = p_value_from_draws(draws, res.statistic);
  }
  for (double a : opts.cv.alphas) {
    std::optional<double> cv;
    if (opts.cv.source == CvSource::table) {cv = table.lookup(res.dim, res.pi0, a);}
    if (!cv) {
      cv = quantile_from_draws(draws, a);
      res.cv_source = CvSource::simulated;
    }
    res.critical_values[a] = *cv;
  }
  return res;
}

}  // namespace tarma

#endif  // TARMA__SUP_LM_HPP_
