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

#ifndef TARMA__ESTIMATE_HPP_
#define TARMA__ESTIMATE_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tarma/core.hpp"
#include "tarma/error.hpp"
#include "tarma/filter.hpp"
#include "tarma/optimize.hpp"

namespace tarma
{

struct FitOptions
{
  BfgsOptions bfgs;
  int max_starts = 3;
  bool std_errors = false;
};

/// Restricted (null-model) fit.
struct FittedArmaGarch
{
  ArmaGarchParams params;
  FilterOutput filter;
  bool converged = false;
  int iterations = 0;
  int starts_used = 0;
  double h_presample = 1.0;          // held fixed during and after optimization
  double loglik_start = 0.0;
  std::optional<std::vector<double>> std_errors;  // ordered (phi, theta, a, b)

  bool operator==(const FittedArmaGarch &) const = default;
};

namespace detail
{

struct OlsResult
{
  Eigen::VectorXd beta;
  double rss = 0.0;
  bool full_rank = false;
};

inline OlsResult ols(const Eigen::MatrixXd & X, const Eigen::VectorXd & y)
{
  OlsResult out;
  if (X.cols() == 0) {
    out.beta.resize(0);
    out.rss = y.squaredNorm();
    out.full_rank = true;
    return out;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  out.full_rank = qr.rank() == X.cols() && X.rows() > X.cols();
  if (!out.full_rank) {return out;}
  out.beta = qr.solve(y);
  out.rss = (y - X * out.beta).squaredNorm();
  return out;
}

inline bool is_constant(std::span<const double> x)
{
  return std::all_of(x.begin(), x.end(), [&](double v) {return v == x[0];});
}

inline std::size_t long_ar_order(std::size_t n)
{
  const auto m = static_cast<std::size_t>(std::floor(10.0 * std::log10(static_cast<double>(n))));
  return std::max<std::size_t>(1, std::min(m, n / 4));
}

/// Residuals of a long autoregression fitted by OLS; zero where unavailable.
inline std::vector<double> long_ar_residuals(std::span<const double> x, std::size_t m)
{
  const std::size_t n = x.size();
  std::vector<double> res(n, 0.0);
  if (n <= 2 * m + 2) {return res;}
  const auto rows = static_cast<Eigen::Index>(n - m);
  Eigen::MatrixXd X(rows, static_cast<Eigen::Index>(m + 1));
  Eigen::VectorXd y(rows);
  for (std::size_t t = m; t < n; ++t) {
    const auto r = static_cast<Eigen::Index>(t - m);
    X(r, 0) = 1.0;
    for (std::size_t i = 1; i <= m; ++i) {X(r, static_cast<Eigen::Index>(i)) = x[t - i];}
    y[r] = x[t];
  }
  const auto fit = ols(X, y);
  if (!fit.full_rank) {return res;}
  const Eigen::VectorXd e = y - X * fit.beta;
  for (Eigen::Index r = 0; r < rows; ++r) {res[static_cast<std::size_t>(r) + m] = e[r];}
  return res;
}

/// Second-stage regression of x_t on (1, x lags, long-AR residual lags) over t >= t0.
inline OlsResult hr_regression(
  std::span<const double> x, const std::vector<double> & ehat, int p, int q, std::size_t t0)
{
  const std::size_t n = x.size();
  const auto rows = static_cast<Eigen::Index>(n - t0);
  Eigen::MatrixXd X(rows, 1 + p + q);
  Eigen::VectorXd y(rows);
  for (std::size_t t = t0; t < n; ++t) {
    const auto r = static_cast<Eigen::Index>(t - t0);
    X(r, 0) = 1.0;
    for (int i = 1; i <= p; ++i) {X(r, i) = x[t - i];}
    for (int j = 1; j <= q; ++j) {X(r, p + j) = ehat[t - j];}
    y[r] = x[t];
  }
  return ols(X, y);
}

}  // namespace detail

/// Hannan-Rissanen ARMA(p, q) estimate in the model convention (theta subtracted).
struct HrEstimate
{
  std::vector<double> phi;
  std::vector<double> theta;
  double rss = 0.0;
  bool ok = false;
};

inline HrEstimate hannan_rissanen_estimate(std::span<const double> x, int p, int q)
{
  HrEstimate est;
  const std::size_t n = x.size();
  std::vector<double> ehat;
  std::size_t t0 = static_cast<std::size_t>(p);
  if (q > 0) {
    const std::size_t m = detail::long_ar_order(n);
    ehat = detail::long_ar_residuals(x, m);
    t0 = m + static_cast<std::size_t>(std::max(p, q));
  } else {
    ehat.assign(n, 0.0);
  }
  if (t0 + static_cast<std::size_t>(p + q + 2) >= n) {return est;}
  const auto fit = detail::hr_regression(x, ehat, p, q, t0);
  if (!fit.full_rank) {return est;}
  est.phi.assign(fit.beta.data(), fit.beta.data() + 1 + p);
  est.theta.resize(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) {est.theta[j] = -fit.beta[1 + p + j];}
  est.rss = fit.rss;
  est.ok = true;
  return est;
}

/// Per-candidate BIC from the order search.
struct HrCandidate
{
  int p = 0;
  int q = 0;
  double bic = 0.0;

  bool operator==(const HrCandidate &) const = default;
};

/// Order selection by Hannan-Rissanen regressions on a common sample and BIC.
inline std::vector<HrCandidate> hannan_rissanen_table(const TimeSeries & series, int p_max, int q_max)
{
  if (p_max < 0 || q_max < 0) {throw std::invalid_argument("maximum orders must be nonnegative");}
  const auto x = series.values();
  const std::size_t n = x.size();
  const std::size_t m = detail::long_ar_order(n);
  const std::size_t t0 = m + static_cast<std::size_t>(std::max(p_max, q_max));
  if (t0 + static_cast<std::size_t>(p_max + q_max + 2) >= n) {
    throw DataError("series too short for the Hannan-Rissanen long autoregression");
  }
  if (detail::is_constant(x)) {throw DataError("series is constant");}
  const auto ehat = detail::long_ar_residuals(x, m);
  const double nobs = static_cast<double>(n - t0);

  std::vector<HrCandidate> table;
  for (int p = 0; p <= p_max; ++p) {
    for (int q = 0; q <= q_max; ++q) {
      const auto fit = detail::hr_regression(x, ehat, p, q, t0);
      if (!fit.full_rank || !(fit.rss > 0.0)) {continue;}
      const double bic = nobs * std::log(fit.rss / nobs) + (p + q + 1) * std::log(nobs);
      table.push_back({p, q, bic});
    }
  }
  if (table.empty()) {throw DataError("no admissible ARMA order in the search range");}
  return table;
}

inline std::pair<int, int> hannan_rissanen_select(const TimeSeries & series, int p_max, int q_max)
{
  const auto table = hannan_rissanen_table(series, p_max, q_max);
  const auto best = std::min_element(
    table.begin(), table.end(), [](const HrCandidate & l, const HrCandidate & r) {
      if (l.bic != r.bic) {return l.bic < r.bic;}
      return l.p + l.q < r.p + r.q;
    });
  return {best->p, best->q};
}

namespace detail
{

/// Coefficients of 1 - c_1 z - ... - c_k z^k from partial autocorrelations in (-1, 1)
/// (Durbin-Levinson). Every output polynomial has its roots outside the unit disk.
inline std::vector<double> pacf_to_coefficients(const std::vector<double> & r)
{
  std::vector<double> c, prev;
  for (std::size_t k = 1; k <= r.size(); ++k) {
    prev = c;
    c.assign(k, 0.0);
    for (std::size_t j = 1; j < k; ++j) {c[j - 1] = prev[j - 1] - r[k - 1] * prev[k - j - 1];}
    c[k - 1] = r[k - 1];
  }
  return c;
}

/// Inverse of pacf_to_coefficients; nullopt when a root lies on or inside the unit disk.
inline std::optional<std::vector<double>> coefficients_to_pacf(std::vector<double> c)
{
  const std::size_t p = c.size();
  std::vector<double> r(p);
  for (std::size_t k = p; k >= 1; --k) {
    const double rk = c[k - 1];
    if (!(std::abs(rk) < 1.0)) {return std::nullopt;}
    r[k - 1] = rk;
    std::vector<double> prev(k - 1);
    for (std::size_t j = 1; j < k; ++j) {
      prev[j - 1] = (c[j - 1] + rk * c[k - j - 1]) / (1.0 - rk * rk);
    }
    c = std::move(prev);
  }
  return r;
}

/// Unconstrained coordinates atanh(pacf) of a polynomial, pulling roots outward
/// (c_j -> c_j s^j) until |pacf| <= 0.98.
inline std::vector<double> polynomial_to_free(std::vector<double> c)
{
  for (int attempt = 0; attempt < 200; ++attempt) {
    const auto r = coefficients_to_pacf(c);
    if (r && std::all_of(r->begin(), r->end(), [](double v) {return std::abs(v) <= 0.98;})) {
      std::vector<double> y(r->size());
      for (std::size_t i = 0; i < y.size(); ++i) {y[i] = std::atanh((*r)[i]);}
      return y;
    }
    double s = 0.95;
    for (auto & cj : c) {
      cj *= s;
      s *= 0.95;
    }
  }
  return std::vector<double>(c.size(), 0.0);
}

inline std::vector<double> free_to_polynomial(const double * y, int k)
{
  std::vector<double> r(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {r[i] = std::tanh(y[i]);}
  return pacf_to_coefficients(r);
}

inline constexpr double kSimplexCap = 1.0 - 1e-6;

/// Unconstrained coordinates: (phi0, atanh pacf of the AR and MA polynomials,
/// log a0, simplex logits of a_1..a_u, b_1..b_v).
struct ArmaGarchMap
{
  int p, q, u, v;

  Eigen::Index size() const {return 1 + p + q + 1 + u + v;}

  ArmaGarchParams unpack(const Eigen::VectorXd & y) const
  {
    ArmaGarchParams out;
    out.phi.assign(1, y[0]);
    const auto ar = free_to_polynomial(y.data() + 1, p);
    out.phi.insert(out.phi.end(), ar.begin(), ar.end());
    out.theta = free_to_polynomial(y.data() + 1 + p, q);
    const Eigen::Index g = 1 + p + q;
    out.a.assign(static_cast<std::size_t>(1 + u), 0.0);
    out.b.assign(static_cast<std::size_t>(v), 0.0);
    out.a[0] = std::exp(std::clamp(y[g], -700.0, 700.0));
    const int k = u + v;
    if (k > 0) {
      double mx = 0.0;
      for (int i = 0; i < k; ++i) {mx = std::max(mx, y[g + 1 + i]);}
      double denom = std::exp(-mx);
      std::vector<double> w(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        w[i] = std::exp(std::max(y[g + 1 + i], -60.0) - mx);
        denom += w[i];
      }
      for (int i = 0; i < k; ++i) {
        const double c = kSimplexCap * w[i] / denom;
        if (i < u) {out.a[1 + i] = c;} else {out.b[i - u] = c;}
      }
    }
    return out;
  }

  Eigen::VectorXd pack(const ArmaGarchParams & prm) const
  {
    Eigen::VectorXd y(size());
    y[0] = prm.phi[0];
    const auto ar = polynomial_to_free(std::vector<double>(prm.phi.begin() + 1, prm.phi.end()));
    const auto ma = polynomial_to_free(prm.theta);
    for (int i = 0; i < p; ++i) {y[1 + i] = ar[i];}
    for (int j = 0; j < q; ++j) {y[1 + p + j] = ma[j];}
    const Eigen::Index g = 1 + p + q;
    y[g] = std::log(prm.a[0]);
    const int k = u + v;
    double s = 0.0;
    std::vector<double> w(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      w[i] = (i < u ? prm.a[1 + i] : prm.b[i - u]) / kSimplexCap;
      s += w[i];
    }
    const double rest = 1.0 - s;
    if (k > 0 && !(rest > 0.0)) {throw std::invalid_argument("start outside the stationarity region");}
    for (int i = 0; i < k; ++i) {y[g + 1 + i] = std::log(w[i] / rest);}
    return y;
  }
};

inline double mean_square(const std::vector<double> & e)
{
  double s = 0.0;
  for (double v : e) {s += v * v;}
  return s / static_cast<double>(e.size());
}

/// Finite-difference standard errors in natural coordinates (phi, theta, a, b).
inline std::optional<std::vector<double>> hessian_std_errors(
  const ArmaGarchParams & prm, std::span<const double> x, double h0)
{
  std::vector<double> v;
  v.insert(v.end(), prm.phi.begin(), prm.phi.end());
  v.insert(v.end(), prm.theta.begin(), prm.theta.end());
  v.insert(v.end(), prm.a.begin(), prm.a.end());
  v.insert(v.end(), prm.b.begin(), prm.b.end());
  const auto k = static_cast<Eigen::Index>(v.size());
  std::vector<double> eb, hb;
  auto ll = [&](const std::vector<double> & z) {
      ArmaGarchParams q = prm;
      std::size_t o = 0;
      for (auto & c : q.phi) {c = z[o++];}
      for (auto & c : q.theta) {c = z[o++];}
      for (auto & c : q.a) {c = z[o++];}
      for (auto & c : q.b) {c = z[o++];}
      return loglik_null(q, x, h0, eb, hb);
    };
  Eigen::MatrixXd H(k, k);
  std::vector<double> step(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {step[i] = 1e-4 * std::max(std::abs(v[i]), 1e-2);}
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) {
      auto z = v;
      const double hi = step[i], hj = step[j];
      z[i] += hi; z[j] += hj; const double fpp = ll(z);
      z = v; z[i] += hi; z[j] -= hj; const double fpm = ll(z);
      z = v; z[i] -= hi; z[j] += hj; const double fmp = ll(z);
      z = v; z[i] -= hi; z[j] -= hj; const double fmm = ll(z);
      H(i, j) = H(j, i) = -(fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
    }
  }
  if (!H.allFinite()) {return std::nullopt;}
  Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {return std::nullopt;}
  const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
  std::vector<double> se(v.size());
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(cov(i, i) > 0.0)) {return std::nullopt;}
    se[i] = std::sqrt(cov(i, i));
  }
  return se;
}

inline void check_fit_input(const TimeSeries & series, int p, int q, int u, int v)
{
  if (p < 0 || q < 0 || u < 0 || v < 0) {throw std::invalid_argument("orders must be nonnegative");}
  const auto need = static_cast<std::size_t>(10 * (p + q + u + v + 2));
  if (series.size() <= need) {
    throw DataError(
            "series too short: n = " + std::to_string(series.size()) + " but the model needs n > " +
            std::to_string(need));
  }
  if (is_constant(series.values())) {throw DataError("series is constant");}
}

/// ARMA starting values with finite, non-explosive residuals.
inline std::pair<std::vector<double>, std::vector<double>> arma_start(
  std::span<const double> x, int p, int q)
{
  auto usable = [&](const std::vector<double> & phi, const std::vector<double> & theta) {
      ArmaGarchParams prm;
      prm.phi = phi;
      prm.theta = theta;
      std::vector<double> e;
      mean_filter(x, prm, nullptr, 0.0, 1, e);
      double mx = 0.0, sx = 0.0;
      for (std::size_t t = 0; t < x.size(); ++t) {
        if (!std::isfinite(e[t])) {return false;}
        mx = std::max(mx, std::abs(e[t]));
        sx = std::max(sx, std::abs(x[t]));
      }
      return mx <= 100.0 * (sx + 1.0);
    };
  const auto hr = hannan_rissanen_estimate(x, p, q);
  if (hr.ok && usable(hr.phi, hr.theta)) {return {hr.phi, hr.theta};}
  const auto ar = hannan_rissanen_estimate(x, p, 0);
  std::vector<double> theta(static_cast<std::size_t>(q), 0.0);
  if (ar.ok && usable(ar.phi, theta)) {return {ar.phi, theta};}
  std::vector<double> phi(static_cast<std::size_t>(p + 1), 0.0);
  phi[0] = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  return {phi, theta};
}

inline ArmaGarchParams garch_start(
  const std::vector<double> & phi, const std::vector<double> & theta, int u, int v,
  double sigma2, double a_total, double b_total)
{
  ArmaGarchParams s;
  s.phi = phi;
  s.theta = theta;
  const double at = u > 0 ? a_total : 0.0;
  const double bt = v > 0 ? b_total : 0.0;
  s.a.assign(static_cast<std::size_t>(1 + u), u > 0 ? a_total / u : 0.0);
  s.b.assign(static_cast<std::size_t>(v), v > 0 ? b_total / v : 0.0);
  s.a[0] = sigma2 * (1.0 - at - bt);
  return s;
}

}  // namespace detail

/// Conditional Gaussian QMLE of ARMA(p,q)-GARCH(u,v).
inline FittedArmaGarch fit_arma_garch(
  const TimeSeries & series, int p, int q, int u, int v, const FitOptions & opts = {})
{
  detail::check_fit_input(series, p, q, u, v);
  const auto x = series.values();
  const double n = static_cast<double>(x.size());
  const detail::ArmaGarchMap map{p, q, u, v};

  const auto [phi0, theta0] = detail::arma_start(x, p, q);
  ArmaGarchParams arma_only;
  arma_only.phi = phi0;
  arma_only.theta = theta0;
  std::vector<double> eb, hb;
  detail::mean_filter(x, arma_only, nullptr, 0.0, 1, eb);
  const double sigma2 = std::max(detail::mean_square(eb), 1e-12);
  const double h0 = sigma2;

  std::vector<ArmaGarchParams> starts;
  starts.push_back(detail::garch_start(phi0, theta0, u, v, sigma2, 0.05, 0.8));
  starts.push_back(detail::garch_start(phi0, theta0, u, v, sigma2, 0.2, 0.5));
  {
    std::vector<double> phi_mean(static_cast<std::size_t>(p + 1), 0.0);
    phi_mean[0] = std::accumulate(x.begin(), x.end(), 0.0) / n;
    std::vector<double> theta_zero(static_cast<std::size_t>(q), 0.0);
    starts.push_back(detail::garch_start(phi_mean, theta_zero, u, v, sigma2, 0.1, 0.1));
  }

  auto objective = [&](const Eigen::VectorXd & y) {
      const auto prm = map.unpack(y);
      const double ll = loglik_null(prm, x, h0, eb, hb);
      return std::isfinite(ll) ? -ll / n : std::numeric_limits<double>::infinity();
    };

  FittedArmaGarch fit;
  fit.h_presample = h0;
  BfgsResult best;
  int total_iterations = 0;
  const int n_starts = std::clamp(opts.max_starts, 1, static_cast<int>(starts.size()));
  for (int s = 0; s < n_starts; ++s) {
    const Eigen::VectorXd y0 = map.pack(starts[s]);
    if (s == 0) {fit.loglik_start = -objective(y0) * n;}
    auto res = bfgs_minimize(objective, y0, opts.bfgs);
    total_iterations += res.iterations;
    fit.starts_used = s + 1;
    const bool better = res.f < best.f || (res.converged && !best.converged && res.f <= best.f);
    if (better || s == 0) {best = std::move(res);}
    if (best.converged) {break;}
  }
  if (!std::isfinite(best.f)) {
    throw NumericError("likelihood is not finite at any starting point");
  }
  fit.params = map.unpack(best.x);
  fit.converged = best.converged;
  fit.iterations = total_iterations;
  fit.filter = filter_null(fit.params, series, FilterOptions{h0});
  if (opts.std_errors) {fit.std_errors = detail::hessian_std_errors(fit.params, x, h0);}
  return fit;
}

/// Constant-variance ARMA fit by conditional sum of squares; h_t is pinned to RSS/n.
inline FittedArmaGarch fit_arma_css(
  const TimeSeries & series, int p, int q, const FitOptions & opts = {})
{
  detail::check_fit_input(series, p, q, 0, 0);
  const auto x = series.values();
  const double n = static_cast<double>(x.size());
  const auto [phi0, theta0] = detail::arma_start(x, p, q);

  ArmaGarchParams work;
  work.phi = phi0;
  work.theta = theta0;
  std::vector<double> eb;
  auto unpack = [&](const Eigen::VectorXd & y) {
      work.phi[0] = y[0];
      const auto ar = detail::free_to_polynomial(y.data() + 1, p);
      std::copy(ar.begin(), ar.end(), work.phi.begin() + 1);
      work.theta = detail::free_to_polynomial(y.data() + 1 + p, q);
    };
  auto objective = [&](const Eigen::VectorXd & y) {
      unpack(y);
      detail::mean_filter(x, work, nullptr, 0.0, 1, eb);
      const double ms = detail::mean_square(eb);
      return std::isfinite(ms) ? ms : std::numeric_limits<double>::infinity();
    };
  Eigen::VectorXd y0(1 + p + q);
  y0[0] = phi0[0];
  {
    const auto ar = detail::polynomial_to_free(std::vector<double>(phi0.begin() + 1, phi0.end()));
    const auto ma = detail::polynomial_to_free(theta0);
    for (int i = 0; i < p; ++i) {y0[1 + i] = ar[i];}
    for (int j = 0; j < q; ++j) {y0[1 + p + j] = ma[j];}
  }

  FittedArmaGarch fit;
  const double f_start = objective(y0);
  auto res = bfgs_minimize(objective, y0, opts.bfgs);
  if (!std::isfinite(res.f)) {throw NumericError("sum of squares is not finite");}
  unpack(res.x);
  const double sigma2 = res.f;
  if (!(sigma2 > 0.0)) {throw NumericError("zero residual variance");}
  fit.params = work;
  fit.params.a = {sigma2};
  fit.params.b.clear();
  fit.converged = res.converged;
  fit.iterations = res.iterations;
  fit.starts_used = 1;
  fit.h_presample = sigma2;
  fit.filter = filter_null(fit.params, series, FilterOptions{sigma2});
  fit.loglik_start = -0.5 * n * (f_start / sigma2 + std::log(sigma2));
  return fit;
}

/// Root and region checks for one ARMA-GARCH parameter set.
struct AssumptionReport
{
  std::vector<double> ar_root_moduli;
  std::vector<double> ma_root_moduli;
  bool ar_stationary = true;
  bool ma_invertible = true;
  bool coprime = true;
  bool positivity = true;
  double persistence = 0.0;
  bool persistence_ok = true;

  bool ok() const noexcept
  {
    return ar_stationary && ma_invertible && coprime && positivity && persistence_ok;
  }

  bool operator==(const AssumptionReport &) const = default;
};

struct TarmaAssumptionReport
{
  AssumptionReport upper;  // I(X_{t-d} <= r) = 0
  AssumptionReport lower;  // base + psi2

  bool ok() const noexcept {return upper.ok() && lower.ok();}

  bool operator==(const TarmaAssumptionReport &) const = default;
};

/// Roots of 1 - c_1 z - ... - c_k z^k; trailing zero coefficients drop the degree.
inline std::vector<std::complex<double>> lag_polynomial_roots(const std::vector<double> & c)
{
  std::size_t k = c.size();
  while (k > 0 && c[k - 1] == 0.0) {--k;}
  if (k == 0) {return {};}
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {companion(0, static_cast<Eigen::Index>(i)) = c[i];}
  for (std::size_t i = 1; i < k; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<std::complex<double>> roots;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()[i];
    if (std::abs(ev) > 0.0) {roots.push_back(1.0 / ev);}
  }
  return roots;
}

inline AssumptionReport check_assumptions(const ArmaGarchParams & params)
{
  params.validate_shape();
  AssumptionReport rep;
  const std::vector<double> ar(params.phi.begin() + 1, params.phi.end());
  const auto ar_roots = lag_polynomial_roots(ar);
  const auto ma_roots = lag_polynomial_roots(params.theta);
  for (const auto & z : ar_roots) {
    rep.ar_root_moduli.push_back(std::abs(z));
    if (!(std::abs(z) > 1.0)) {rep.ar_stationary = false;}
  }
  for (const auto & z : ma_roots) {
    rep.ma_root_moduli.push_back(std::abs(z));
    if (!(std::abs(z) > 1.0)) {rep.ma_invertible = false;}
  }
  std::sort(rep.ar_root_moduli.begin(), rep.ar_root_moduli.end());
  std::sort(rep.ma_root_moduli.begin(), rep.ma_root_moduli.end());
  for (const auto & za : ar_roots) {
    for (const auto & zm : ma_roots) {
      if (std::abs(za - zm) < 1e-6) {rep.coprime = false;}
    }
  }
  rep.positivity = !params.a.empty() && params.a[0] > 0.0;
  for (std::size_t i = 1; i < params.a.size(); ++i) {rep.positivity = rep.positivity && params.a[i] > 0.0;}
  for (double bj : params.b) {rep.positivity = rep.positivity && bj > 0.0;}
  rep.persistence = params.persistence();
  rep.persistence_ok = rep.persistence < 1.0;
  return rep;
}

inline TarmaAssumptionReport check_assumptions(const TarmaGarchParams & params)
{
  params.validate_shape();
  TarmaAssumptionReport rep;
  rep.upper = check_assumptions(params.base);
  ArmaGarchParams lower = params.base;
  const int p = params.base.p();
  for (int i = 0; i <= p; ++i) {lower.phi[i] += params.psi2[i];}
  for (int j = 0; j < params.base.q(); ++j) {lower.theta[j] += params.psi2[p + 1 + j];}
  rep.lower = check_assumptions(lower);
  return rep;
}

}  // namespace tarma

#endif  // TARMA__ESTIMATE_HPP_
