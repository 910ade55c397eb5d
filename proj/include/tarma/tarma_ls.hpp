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

#ifndef TARMA__TARMA_LS_HPP_
#define TARMA__TARMA_LS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tarma/core.hpp"
#include "tarma/error.hpp"
#include "tarma/estimate.hpp"

namespace tarma
{

/// Lags entering one regime. Every regime carries an intercept. MA coefficients
/// are added to the mean (X_t = c + sum alpha X + sum beta eps + eps_t).
struct RegimeSpec
{
  std::vector<int> ar;
  std::vector<int> ma;

  std::size_t n_coef() const noexcept {return 1 + ar.size() + ma.size();}

  bool operator==(const RegimeSpec &) const = default;
};

struct TarmaSpec
{
  RegimeSpec lower;  // X_{t-d} <= r
  RegimeSpec upper;
  int d = 1;

  /// Dense TARMA(p, q) layout with all lags 1..p and 1..q in both regimes.
  static TarmaSpec dense(int p, int q, int d = 1)
  {
    RegimeSpec r;
    for (int i = 1; i <= p; ++i) {r.ar.push_back(i);}
    for (int j = 1; j <= q; ++j) {r.ma.push_back(j);}
    return TarmaSpec{r, r, d};
  }

  bool operator==(const TarmaSpec &) const = default;
};

struct RegimeCoefficients
{
  double intercept = 0.0;
  std::vector<double> ar;
  std::vector<double> ma;
  double intercept_se = 0.0;
  std::vector<double> ar_se;
  std::vector<double> ma_se;
  std::size_t n_obs = 0;

  bool operator==(const RegimeCoefficients &) const = default;
};

struct RssPoint
{
  double r = 0.0;
  double rss = 0.0;

  bool operator==(const RssPoint &) const = default;
};

/// Stage-1 conditional least-squares TARMA fit.
struct TarmaLsFit
{
  TarmaSpec spec;
  double r = 0.0;
  RegimeCoefficients lower;
  RegimeCoefficients upper;
  double rss = 0.0;
  double sigma2 = 0.0;
  std::size_t first_index = 0;        // residuals start at this 0-based time
  std::vector<double> residuals;      // length n - first_index
  std::vector<RssPoint> trace;        // evaluated candidates only

  bool operator==(const TarmaLsFit &) const = default;
};

namespace detail
{

inline void check_regime(const RegimeSpec & r)
{
  for (int l : r.ar) {if (l < 1) {throw std::invalid_argument("AR lags must be >= 1");}}
  for (int l : r.ma) {if (l < 1) {throw std::invalid_argument("MA lags must be >= 1");}}
}

inline int max_lag(const std::vector<int> & v)
{
  return v.empty() ? 0 : *std::max_element(v.begin(), v.end());
}

/// Conditional least-squares machinery for one threshold value.
class TarmaLsProblem
{
public:
  TarmaLsProblem(std::span<const double> x, const TarmaSpec & spec, double r)
  : x_(x), spec_(spec)
  {
    t0_ = static_cast<std::size_t>(std::max({max_lag(spec.lower.ar), max_lag(spec.upper.ar), spec.d}));
    n_lower_ = spec.lower.n_coef();
    k_ = n_lower_ + spec.upper.n_coef();
    lower_.assign(x.size(), false);
    for (std::size_t t = t0_; t < x.size(); ++t) {
      lower_[t] = x[t - static_cast<std::size_t>(spec.d)] <= r;
      if (lower_[t]) {++count_lower_;} else {++count_upper_;}
    }
  }

  std::size_t t0() const {return t0_;}
  std::size_t k() const {return k_;}
  std::size_t count_lower() const {return count_lower_;}
  std::size_t count_upper() const {return count_upper_;}

  /// Residuals for t >= t0 (eps = 0 before t0) and, optionally, d eps / d beta.
  double residuals(const Eigen::VectorXd & beta, std::vector<double> & eps,
    Eigen::MatrixXd * jac) const
  {
    const std::size_t n = x_.size();
    eps.assign(n, 0.0);
    if (jac) {jac->setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k_));}
    double rss = 0.0;
    for (std::size_t t = t0_; t < n; ++t) {
      const bool low = lower_[t];
      const RegimeSpec & rs = low ? spec_.lower : spec_.upper;
      const std::size_t off = low ? 0 : n_lower_;
      double m = beta[off];
      std::size_t c = off + 1;
      for (int l : rs.ar) {m += beta[c++] * x_[t - l];}
      for (int l : rs.ma) {
        if (static_cast<std::size_t>(l) <= t) {m += beta[c] * eps[t - l];}
        ++c;
      }
      eps[t] = x_[t] - m;
      rss += eps[t] * eps[t];
      if (jac) {
        auto row = jac->row(static_cast<Eigen::Index>(t));
        row[off] = -1.0;
        std::size_t cc = off + 1;
        for (int l : rs.ar) {row[cc++] = -x_[t - l];}
        for (int l : rs.ma) {
          if (static_cast<std::size_t>(l) <= t) {
            row[cc] -= eps[t - l];
            row -= beta[cc] * jac->row(static_cast<Eigen::Index>(t - l));
          }
          ++cc;
        }
      }
      if (!std::isfinite(eps[t]) || std::abs(eps[t]) > 1e150) {
        return std::numeric_limits<double>::infinity();
      }
    }
    return rss;
  }

  /// Threshold regression with long-AR residual proxies for the MA lags.
  Eigen::VectorXd start(const std::vector<double> & ehat) const
  {
    const std::size_t n = x_.size();
    std::size_t s0 = t0_;
    while (s0 < n && !ehat_available(ehat, s0)) {++s0;}
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k_));
    for (int side = 0; side < 2; ++side) {
      const bool low = side == 0;
      const RegimeSpec & rs = low ? spec_.lower : spec_.upper;
      const std::size_t off = low ? 0 : n_lower_;
      std::vector<std::size_t> rows;
      for (std::size_t t = s0; t < n; ++t) {if (lower_[t] == low) {rows.push_back(t);}}
      const auto nc = static_cast<Eigen::Index>(rs.n_coef());
      auto fill = [&](bool with_ma) -> OlsResult {
          const Eigen::Index cols = with_ma ? nc : static_cast<Eigen::Index>(1 + rs.ar.size());
          Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), cols);
          Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
          for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::size_t t = rows[i];
            const auto ii = static_cast<Eigen::Index>(i);
            Eigen::Index c = 0;
            X(ii, c++) = 1.0;
            for (int l : rs.ar) {X(ii, c++) = x_[t - l];}
            if (with_ma) {for (int l : rs.ma) {X(ii, c++) = ehat[t - l];}}
            y[ii] = x_[t];
          }
          return ols(X, y);
        };
      auto fit = fill(true);
      if (fit.full_rank) {
        beta.segment(static_cast<Eigen::Index>(off), nc) = fit.beta;
      } else {
        fit = fill(false);
        if (fit.full_rank) {
          beta.segment(static_cast<Eigen::Index>(off), fit.beta.size()) = fit.beta;
        }
      }
    }
    return beta;
  }

private:
  bool ehat_available(const std::vector<double> & ehat, std::size_t t) const
  {
    const int ml = std::max(max_lag(spec_.lower.ma), max_lag(spec_.upper.ma));
    for (int l = 1; l <= ml; ++l) {
      if (static_cast<std::size_t>(l) > t || ehat[t - l] == 0.0) {return false;}
    }
    return true;
  }

  std::span<const double> x_;
  TarmaSpec spec_;
  std::size_t t0_ = 0;
  std::size_t n_lower_ = 0;
  std::size_t k_ = 0;
  std::vector<bool> lower_;
  std::size_t count_lower_ = 0;
  std::size_t count_upper_ = 0;
};

struct LsSolution
{
  Eigen::VectorXd beta;
  double rss = std::numeric_limits<double>::infinity();
};

/// Levenberg-Marquardt on the conditional sum of squares.
inline LsSolution levenberg_marquardt(const TarmaLsProblem & prob, Eigen::VectorXd beta)
{
  std::vector<double> eps;
  Eigen::MatrixXd J;
  LsSolution sol;
  double rss = prob.residuals(beta, eps, &J);
  if (!std::isfinite(rss)) {return sol;}
  double mu = 1e-3;
  const auto n = static_cast<Eigen::Index>(eps.size());
  bool done = false;
  for (int it = 0; it < 200 && !done; ++it) {
    const Eigen::Map<const Eigen::VectorXd> e(eps.data(), n);
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd Jte = J.transpose() * e;
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::MatrixXd A = JtJ;
      for (Eigen::Index i = 0; i < A.rows(); ++i) {A(i, i) += mu * std::max(JtJ(i, i), 1e-12);}
      const Eigen::VectorXd delta = -A.ldlt().solve(Jte);
      const Eigen::VectorXd cand = beta + delta;
      std::vector<double> eps_c;
      const double rss_c = prob.residuals(cand, eps_c, nullptr);
      if (std::isfinite(rss_c) && rss_c < rss) {
        const double rel = (rss - rss_c) / std::max(rss, 1e-300);
        beta = cand;
        rss = prob.residuals(beta, eps, &J);
        mu = std::max(mu / 3.0, 1e-12);
        improved = true;
        done = rel < 1e-12;
        break;
      }
      mu *= 4.0;
    }
    if (!improved) {break;}
  }
  sol.beta = beta;
  sol.rss = rss;
  return sol;
}

}  // namespace detail

struct TarmaLsOptions
{
  std::size_t min_regime_obs = 10;
  bool robust_std_errors = true;  // HC0 sandwich; false gives sigma2 (J'J)^{-1}
};

/// Conditional least squares over the threshold grid; r-hat minimizes the RSS.
inline TarmaLsFit fit_tarma_ls(
  const TimeSeries & series, const TarmaSpec & spec, const ThresholdGrid & grid,
  const TarmaLsOptions & opts = {})
{
  detail::check_regime(spec.lower);
  detail::check_regime(spec.upper);
  if (spec.d < 1) {throw std::invalid_argument("delay d must be >= 1");}
  if (grid.candidates.empty()) {throw DataError("threshold grid is empty");}
  const auto x = series.values();
  const std::size_t n = x.size();
  const std::size_t m = std::max<std::size_t>(
    detail::long_ar_order(n),
    static_cast<std::size_t>(std::max(detail::max_lag(spec.lower.ma), detail::max_lag(spec.upper.ma)) + 1));
  const auto ehat = detail::long_ar_residuals(x, std::min(m, n / 3));

  TarmaLsFit best;
  best.spec = spec;
  best.rss = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_beta;
  std::optional<detail::TarmaLsProblem> best_prob;
  for (double r : grid.candidates) {
    detail::TarmaLsProblem prob(x, spec, r);
    if (prob.count_lower() < opts.min_regime_obs || prob.count_upper() < opts.min_regime_obs) {
      continue;
    }
    if (prob.t0() + prob.k() + 2 >= n) {continue;}
    Eigen::VectorXd b0 = prob.start(ehat);
    auto sol = detail::levenberg_marquardt(prob, b0);
    if (!std::isfinite(sol.rss)) {
      std::size_t c = spec.lower.n_coef();
      for (std::size_t j = 0; j < spec.lower.ma.size(); ++j) {b0[c - 1 - j] = 0.0;}
      c = b0.size();
      for (std::size_t j = 0; j < spec.upper.ma.size(); ++j) {b0[c - 1 - j] = 0.0;}
      sol = detail::levenberg_marquardt(prob, b0);
    }
    if (!std::isfinite(sol.rss)) {continue;}
    best.trace.push_back({r, sol.rss});
    if (sol.rss < best.rss) {
      best.rss = sol.rss;
      best.r = r;
      best_beta = sol.beta;
      best_prob.emplace(prob);
    }
  }
  if (!best_prob) {throw DataError("no threshold candidate admits a stage-1 fit");}

  std::vector<double> eps;
  Eigen::MatrixXd J;
  best.rss = best_prob->residuals(best_beta, eps, &J);
  const std::size_t t0 = best_prob->t0();
  const double nobs = static_cast<double>(n - t0);
  best.sigma2 = best.rss / nobs;
  best.first_index = t0;
  best.residuals.assign(eps.begin() + static_cast<std::ptrdiff_t>(t0), eps.end());

  const Eigen::MatrixXd JtJ = J.transpose() * J;
  std::optional<Eigen::VectorXd> se;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(JtJ);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(JtJ.rows(), JtJ.cols()));
    Eigen::MatrixXd cov;
    if (opts.robust_std_errors) {
      const Eigen::Map<const Eigen::VectorXd> e(eps.data(), static_cast<Eigen::Index>(eps.size()));
      const Eigen::MatrixXd meat = J.transpose() * e.array().square().matrix().asDiagonal() * J;
      cov = inv * meat * inv;
    } else {
      cov = best.sigma2 * inv;
    }
    se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  }
  // Standard errors stay empty when J'J is singular.
  auto unpack = [&](const RegimeSpec & rs, std::size_t off, RegimeCoefficients & out, std::size_t nobs_regime) {
      out.intercept = best_beta[off];
      if (se) {out.intercept_se = (*se)[off];}
      std::size_t c = off + 1;
      for (std::size_t i = 0; i < rs.ar.size(); ++i, ++c) {
        out.ar.push_back(best_beta[c]);
        if (se) {out.ar_se.push_back((*se)[c]);}
      }
      for (std::size_t j = 0; j < rs.ma.size(); ++j, ++c) {
        out.ma.push_back(best_beta[c]);
        if (se) {out.ma_se.push_back((*se)[c]);}
      }
      out.n_obs = nobs_regime;
    };
  unpack(spec.lower, 0, best.lower, best_prob->count_lower());
  unpack(spec.upper, spec.lower.n_coef(), best.upper, best_prob->count_upper());
  return best;
}

/// Dense TarmaGarchParams for a stage-1 fit: base = upper regime, psi2 = lower - upper,
/// MA coefficients converted to the subtracted convention. GARCH block copied from `garch`.
inline TarmaGarchParams to_tarma_params(const TarmaLsFit & fit, const ArmaGarchParams & garch = {})
{
  const int p = std::max(detail::max_lag(fit.spec.lower.ar), detail::max_lag(fit.spec.upper.ar));
  const int q = std::max(detail::max_lag(fit.spec.lower.ma), detail::max_lag(fit.spec.upper.ma));
  auto dense = [&](const RegimeSpec & rs, const RegimeCoefficients & c) {
      std::vector<double> phi(static_cast<std::size_t>(p + 1), 0.0);
      std::vector<double> theta(static_cast<std::size_t>(q), 0.0);
      phi[0] = c.intercept;
      for (std::size_t i = 0; i < rs.ar.size(); ++i) {phi[rs.ar[i]] = c.ar[i];}
      for (std::size_t j = 0; j < rs.ma.size(); ++j) {theta[rs.ma[j] - 1] = -c.ma[j];}
      return std::make_pair(phi, theta);
    };
  const auto [phi_u, theta_u] = dense(fit.spec.upper, fit.upper);
  const auto [phi_l, theta_l] = dense(fit.spec.lower, fit.lower);
  TarmaGarchParams out;
  out.base.phi = phi_u;
  out.base.theta = theta_u;
  out.base.a = garch.a;
  out.base.b = garch.b;
  for (int i = 0; i <= p; ++i) {out.psi2.push_back(phi_l[i] - phi_u[i]);}
  for (int j = 0; j < q; ++j) {out.psi2.push_back(theta_l[j] - theta_u[j]);}
  out.r = fit.r;
  out.d = fit.spec.d;
  return out;
}

/// Two-stage TARMA-GARCH fit.
struct FittedTarmaGarch
{
  TarmaLsFit stage1;
  FittedArmaGarch garch;       // GARCH(u, v) with an intercept-only mean on stage-1 residuals
  TarmaGarchParams tarma;      // dense parameters with the fitted GARCH block
  double stage1_rss = 0.0;

  bool operator==(const FittedTarmaGarch &) const = default;
};

inline FittedTarmaGarch fit_two_stage(
  const TimeSeries & series, const TarmaSpec & spec, const ThresholdGrid & grid, int u, int v,
  const FitOptions & garch_opts = {}, const TarmaLsOptions & ls_opts = {})
{
  FittedTarmaGarch out;
  out.stage1 = fit_tarma_ls(series, spec, grid, ls_opts);
  out.stage1_rss = out.stage1.rss;
  out.garch = fit_arma_garch(TimeSeries(out.stage1.residuals), 0, 0, u, v, garch_opts);
  out.tarma = to_tarma_params(out.stage1, out.garch.params);
  return out;
}

}  // namespace tarma

#endif  // TARMA__TARMA_LS_HPP_
