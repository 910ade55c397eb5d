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

#ifndef TARMA__ANALYSIS_HPP_
#define TARMA__ANALYSIS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tarma/core.hpp"
#include "tarma/diagnostics.hpp"
#include "tarma/error.hpp"
#include "tarma/estimate.hpp"
#include "tarma/json.hpp"
#include "tarma/simulate.hpp"
#include "tarma/sup_lm.hpp"
#include "tarma/tarma_ls.hpp"

namespace tarma
{

struct AnalysisOptions
{
  bool log10 = false;
  std::optional<std::pair<int, int>> orders;  // (p, q); selected by Hannan-Rissanen when empty
  int p_max = 12;
  int q_max = 12;
  int test_u = 1;   // GARCH orders of the tested null
  int test_v = 1;
  int d = 1;
  double lower_q = 0.25;
  double upper_q = 0.75;
  std::size_t max_points = 200;
  LmMethod method = LmMethod::slmg;
  CvOptions cv;
  std::optional<TarmaSpec> tarma_spec;  // dense (p, q) when empty
  int fit_u = 1;    // GARCH orders of the second stage
  int fit_v = 1;
  std::size_t ljung_box_lags = 12;
  std::size_t correlogram_lags = 36;
  std::size_t ks_sim_length = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct InputSummary
{
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  bool log10 = false;

  bool operator==(const InputSummary &) const = default;
};

struct AnalysisDiagnostics
{
  TestReport ljung_box_residuals;   // standardized residuals
  TestReport ljung_box_squared;     // squared standardized residuals
  TestReport ks_simulated;          // data vs a long simulated trajectory
  Correlogram acf_residuals;
  Correlogram pacf_residuals;
  Correlogram acf_squared;

  bool operator==(const AnalysisDiagnostics &) const = default;
};

struct AnalysisReport
{
  InputSummary input;
  int p = 0;
  int q = 0;
  bool orders_selected = false;
  std::vector<HrCandidate> order_table;
  SupLmResult test;
  FittedTarmaGarch model;
  AnalysisDiagnostics diagnostics;
  std::vector<std::string> notes;

  bool operator==(const AnalysisReport &) const = default;
};

/// Failure inside the pipeline; `stage` names the step and `partial` holds what finished.
class AnalysisError : public std::runtime_error
{
public:
  AnalysisError(
    std::string stage, const std::string & what, std::optional<json> partial, bool data_error = false)
  : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), partial_(std::move(partial)),
    message_(what), data_error_(data_error)
  {
  }

  const std::string & stage() const {return stage_;}
  /// True when the cause was unusable input rather than a numerical failure.
  bool data_error() const {return data_error_;}
  const std::optional<json> & partial() const {return partial_;}
  const std::string & message() const {return message_;}

private:
  std::string stage_;
  std::optional<json> partial_;
  std::string message_;
  bool data_error_;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(HrCandidate, p, q, bic)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(InputSummary, n, mean, sd, min, max, log10)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
  AnalysisDiagnostics, ljung_box_residuals, ljung_box_squared, ks_simulated, acf_residuals,
  pacf_residuals, acf_squared)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
  AnalysisReport, input, p, q, orders_selected, order_table, test, model, diagnostics, notes)

namespace detail
{

inline void check_keys(const json & j, std::initializer_list<const char *> allowed, const std::string & where)
{
  if (!j.is_object()) {throw std::invalid_argument(where + " must be a JSON object");}
  for (const auto & [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char * a) {return key == a;})) {
      throw std::invalid_argument("unknown key '" + key + "' in " + where);
    }
  }
}

inline std::pair<int, int> int_pair(const json & j, const char * key)
{
  const auto v = j.at(key).get<std::vector<int>>();
  if (v.size() != 2) {throw std::invalid_argument(std::string(key) + " must hold two integers");}
  return {v[0], v[1]};
}

inline RegimeSpec regime_from_json(const json & j, const std::string & where)
{
  check_keys(j, {"ar", "ma"}, where);
  RegimeSpec r;
  if (j.contains("ar")) {r.ar = j.at("ar").get<std::vector<int>>();}
  if (j.contains("ma")) {r.ma = j.at("ma").get<std::vector<int>>();}
  return r;
}

}  // namespace detail

/// Options from a JSON object. Unknown keys are errors; missing keys keep defaults.
inline AnalysisOptions analysis_options_from_json(const json & j)
{
  detail::check_keys(j, {
    "log10", "orders", "max_orders", "test_garch", "d", "grid", "method", "cv", "tarma_spec",
    "fit_garch", "ljung_box_lags", "correlogram_lags", "ks_sim_length", "seed"}, "analysis options");
  AnalysisOptions o;
  try {
    if (j.contains("log10")) {o.log10 = j.at("log10").get<bool>();}
    if (j.contains("orders") && !j.at("orders").is_null()) {o.orders = detail::int_pair(j, "orders");}
    if (j.contains("max_orders")) {std::tie(o.p_max, o.q_max) = detail::int_pair(j, "max_orders");}
    if (j.contains("test_garch")) {std::tie(o.test_u, o.test_v) = detail::int_pair(j, "test_garch");}
    if (j.contains("fit_garch")) {std::tie(o.fit_u, o.fit_v) = detail::int_pair(j, "fit_garch");}
    if (j.contains("d")) {o.d = j.at("d").get<int>();}
    if (j.contains("grid")) {
      const auto & g = j.at("grid");
      detail::check_keys(g, {"lower_q", "upper_q", "max_points"}, "grid");
      if (g.contains("lower_q")) {o.lower_q = g.at("lower_q").get<double>();}
      if (g.contains("upper_q")) {o.upper_q = g.at("upper_q").get<double>();}
      if (g.contains("max_points")) {o.max_points = g.at("max_points").get<std::size_t>();}
    }
    if (j.contains("method")) {
      const auto m = j.at("method").get<std::string>();
      if (m != "sLMg" && m != "sLM") {throw std::invalid_argument("method must be sLMg or sLM");}
      o.method = j.at("method").get<LmMethod>();
    }
    if (j.contains("cv")) {
      const auto & c = j.at("cv");
      detail::check_keys(c, {"source", "alphas", "n_sim", "p_value"}, "cv");
      if (c.contains("source")) {
        const auto s = c.at("source").get<std::string>();
        if (s != "table" && s != "simulated") {throw std::invalid_argument("cv.source must be table or simulated");}
        o.cv.source = c.at("source").get<CvSource>();
      }
      if (c.contains("alphas")) {o.cv.alphas = c.at("alphas").get<std::vector<double>>();}
      if (c.contains("n_sim")) {o.cv.n_sim = c.at("n_sim").get<int>();}
      if (c.contains("p_value")) {o.cv.p_value = c.at("p_value").get<bool>();}
    }
    if (j.contains("tarma_spec") && !j.at("tarma_spec").is_null()) {
      const auto & t = j.at("tarma_spec");
      detail::check_keys(t, {"lower", "upper", "d"}, "tarma_spec");
      TarmaSpec spec;
      spec.lower = detail::regime_from_json(t.at("lower"), "tarma_spec.lower");
      spec.upper = detail::regime_from_json(t.at("upper"), "tarma_spec.upper");
      spec.d = t.contains("d") ? t.at("d").get<int>() : o.d;
      o.tarma_spec = spec;
    }
    if (j.contains("ljung_box_lags")) {o.ljung_box_lags = j.at("ljung_box_lags").get<std::size_t>();}
    if (j.contains("correlogram_lags")) {o.correlogram_lags = j.at("correlogram_lags").get<std::size_t>();}
    if (j.contains("ks_sim_length")) {o.ks_sim_length = j.at("ks_sim_length").get<std::size_t>();}
    if (j.contains("seed")) {o.seed = j.at("seed").get<std::uint64_t>();}
  } catch (const json::exception & e) {
    throw std::invalid_argument(std::string("analysis options: ") + e.what());
  }
  return o;
}

namespace detail
{

inline InputSummary summarize(const TimeSeries & x, bool log10)
{
  InputSummary s;
  const auto v = x.values();
  s.n = v.size();
  s.log10 = log10;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double e : v) {sum += e;}
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double e : v) {ss += (e - s.mean) * (e - s.mean);}
  s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

/// Run `fn`, rethrowing failures as AnalysisError tagged with `stage`.
template<typename Fn>
auto stage(const char * name, const AnalysisReport & partial, bool has_partial, Fn && fn)
{
  try {
    return fn();
  } catch (const AnalysisError &) {
    throw;
  } catch (const DataError & e) {
    std::optional<json> p;
    if (has_partial) {p = json(partial);}
    throw AnalysisError(name, e.what(), std::move(p), true);
  } catch (const std::exception & e) {
    std::optional<json> p;
    if (has_partial) {p = json(partial);}
    throw AnalysisError(name, e.what(), std::move(p));
  }
}

}  // namespace detail

/// Transform, order selection, sup-LM test, two-stage fit, diagnostics.
inline AnalysisReport analyze(const TimeSeries & raw, const AnalysisOptions & opts = {})
{
  AnalysisReport rep;
  const TimeSeries x = detail::stage("transform", rep, false, [&]() {
      return opts.log10 ? log10_transform(raw) : raw;
    });
  rep.input = detail::summarize(x, opts.log10);

  detail::stage("order_selection", rep, true, [&]() {
      if (opts.orders) {
        rep.p = opts.orders->first;
        rep.q = opts.orders->second;
        rep.orders_selected = false;
      } else {
        rep.order_table = hannan_rissanen_table(x, opts.p_max, opts.q_max);
        const auto [p, q] = hannan_rissanen_select(x, opts.p_max, opts.q_max);
        rep.p = p;
        rep.q = q;
        rep.orders_selected = true;
      }
      return 0;
    });

  const auto grid = detail::stage("grid", rep, true, [&]() {
      return percentile_grid(x, opts.lower_q, opts.upper_q, opts.max_points);
    });

  rep.test = detail::stage("sup_lm_test", rep, true, [&]() {
      SupLmOptions so;
      so.cv = opts.cv;
      so.threads = opts.threads;
      return sup_lm_test(x, rep.p, rep.q, opts.test_u, opts.test_v, opts.d, grid, opts.method, so);
    });

  rep.model = detail::stage("two_stage_fit", rep, true, [&]() {
      const auto spec = opts.tarma_spec ? *opts.tarma_spec : TarmaSpec::dense(rep.p, rep.q, opts.d);
      return fit_two_stage(x, spec, grid, opts.fit_u, opts.fit_v);
    });

  rep.diagnostics = detail::stage("diagnostics", rep, true, [&]() {
      AnalysisDiagnostics dg;
      const auto & f = rep.model.garch.filter;
      std::vector<double> z(f.eps.size()), z2(f.eps.size());
      for (std::size_t t = 0; t < z.size(); ++t) {
        z[t] = f.eps[t] / std::sqrt(f.h[t]);
        z2[t] = z[t] * z[t];
      }
      const std::size_t lags = std::min(opts.correlogram_lags, z.size() / 2 - 1);
      dg.ljung_box_residuals = ljung_box(z, opts.ljung_box_lags);
      dg.ljung_box_squared = ljung_box(z2, opts.ljung_box_lags);
      dg.acf_residuals = acf(z, lags);
      dg.pacf_residuals = pacf(z, lags);
      dg.acf_squared = acf(z2, lags);
      const auto sim = simulate_tarma_garch(
        rep.model.tarma, SimMaConvention::model, opts.ks_sim_length, kDefaultBurnIn, opts.seed);
      dg.ks_simulated = ks_two_sample(x.values(), sim.values());
      return dg;
    });

  std::ostringstream note;
  note << "sup-LM " << to_string(rep.test.method) << " on ARMA(" << rep.p << "," << rep.q << ")-GARCH("
       << opts.test_u << "," << opts.test_v << "), d = " << opts.d << ", grid "
       << opts.lower_q * 100 << "-" << opts.upper_q * 100 << "% (" << grid.candidates.size() << " points)";
  rep.notes.push_back(note.str());
  for (const auto & [a, v] : rep.test.critical_values) {
    std::ostringstream s;
    s << "alpha " << a << ": critical value " << v << (rep.test.statistic > v ? " (reject)" : " (accept)");
    rep.notes.push_back(s.str());
  }
  return rep;
}

/// Human-readable summary.
inline std::string summary_text(const AnalysisReport & r)
{
  std::ostringstream os;
  os.precision(6);
  os << "series: n = " << r.input.n << (r.input.log10 ? " (log10)" : "") << ", mean = " << r.input.mean
     << ", sd = " << r.input.sd << "\n";
  os << "orders: ARMA(" << r.p << "," << r.q << ")" << (r.orders_selected ? " selected by Hannan-Rissanen" : "")
     << "\n";
  os << "sup-LM (" << to_string(r.test.method) << "): T = " << r.test.statistic << " at r = " << r.test.arg_r
     << ", dim = " << r.test.dim << ", pi0 = " << r.test.pi0 << "\n";
  for (const auto & [a, v] : r.test.critical_values) {
    os << "  alpha " << a << ": cv " << v << (r.test.statistic > v ? "  reject" : "  accept") << "\n";
  }
  if (r.test.p_value) {os << "  simulated p-value " << *r.test.p_value << "\n";}
  const auto & s1 = r.model.stage1;
  os << "stage 1 TARMA: r = " << s1.r << ", sigma2 = " << s1.sigma2 << ", lower n = " << s1.lower.n_obs
     << ", upper n = " << s1.upper.n_obs << "\n";
  const auto & g = r.model.garch.params;
  os << "stage 2 GARCH: a =";
  for (double v : g.a) {os << " " << v;}
  os << ", b =";
  for (double v : g.b) {os << " " << v;}
  os << "\n";
  const auto & d = r.diagnostics;
  os << "Ljung-Box residuals: Q = " << d.ljung_box_residuals.statistic << ", p = " << d.ljung_box_residuals.p_value
     << "\n";
  os << "Ljung-Box squared residuals: Q = " << d.ljung_box_squared.statistic << ", p = "
     << d.ljung_box_squared.p_value << "\n";
  os << "KS data vs simulated: D = " << d.ks_simulated.statistic << ", p = " << d.ks_simulated.p_value << "\n";
  return os.str();
}

}  // namespace tarma

#endif  // TARMA__ANALYSIS_HPP_
