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

#ifndef TARMA__SCORE_HPP_
#define TARMA__SCORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tarma/core.hpp"
#include "tarma/error.hpp"
#include "tarma/estimate.hpp"
#include "tarma/filter.hpp"

namespace tarma
{

/// Efficient-information condition numbers above this flag a candidate as degenerate.
inline constexpr double kDegenerateCondition = 1e12;

enum class InformationForm
{
  expected,  // outer-product form with weights 1/h and 1/(2 h^2)
  hessian,   // negative second derivative of the log-likelihood
};

/// Derivatives of eps_t and h_t with respect to Psi = (Psi1, Psi2) at Psi2 = 0.
/// Row t holds the 2(p+q+1) entries ordered (phi0..phip, theta1..thetaq, varphi0..., vartheta...).
struct ScoreState
{
  Eigen::MatrixXd deps;
  Eigen::MatrixXd dh;
};

/// Psi2 score and the four blocks of the information matrix (unscaled sums).
/// `score_psi1` is zero at an interior restricted MLE; when present it is projected
/// out of the Psi2 score by lm_statistic.
struct ScoreInformation
{
  Eigen::VectorXd score_psi2;
  Eigen::VectorXd score_psi1;
  Eigen::MatrixXd I11;
  Eigen::MatrixXd I12;
  Eigen::MatrixXd I21;
  Eigen::MatrixXd I22;
};

/// Quadratic form, or the reason a candidate was rejected.
struct LmValue
{
  double statistic = 0.0;
  bool degenerate = false;
  double condition_number = 0.0;
};

namespace detail
{

/// LM statistic without throwing; `degenerate` set when the efficient information
/// is not safely positive definite.
inline LmValue lm_value(
  Eigen::VectorXd score, const Eigen::MatrixXd & I11_solve_I12,
  const Eigen::MatrixXd & I12, const Eigen::MatrixXd & I22,
  const Eigen::VectorXd * score_psi1 = nullptr)
{
  LmValue out;
  if (score_psi1 && score_psi1->size() == I11_solve_I12.rows()) {
    score -= I11_solve_I12.transpose() * (*score_psi1);
  }
  Eigen::MatrixXd E = I22 - I12.transpose() * I11_solve_I12;
  E = 0.5 * (E + E.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_e(E, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_22(I22, Eigen::EigenvaluesOnly);
  const double lmin = es_e.eigenvalues().minCoeff();
  const double lmax = std::max(es_e.eigenvalues().maxCoeff(), es_22.eigenvalues().maxCoeff());
  out.condition_number = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(lmin > 0.0) || !(out.condition_number <= kDegenerateCondition)) {
    out.degenerate = true;
    return out;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(E);
  if (llt.info() != Eigen::Success) {
    out.degenerate = true;
    return out;
  }
  out.statistic = std::max(0.0, score.dot(llt.solve(score)));
  return out;
}

}  // namespace detail

/// T(r) = s' (I22 - I21 I11^{-1} I12)^{-1} s via symmetric positive-definite solves,
/// with s = score_psi2 - I21 I11^{-1} score_psi1.
/// Throws DegenerateError when the efficient information is singular or ill conditioned.
inline double lm_statistic(const ScoreInformation & si)
{
  Eigen::LDLT<Eigen::MatrixXd> l11(si.I11);
  if (l11.info() != Eigen::Success || !l11.isPositive()) {
    throw DegenerateError("I11 is not positive definite", std::numeric_limits<double>::infinity());
  }
  const auto v = detail::lm_value(si.score_psi2, l11.solve(si.I12), si.I12, si.I22, &si.score_psi1);
  if (v.degenerate) {
    throw DegenerateError("efficient information is not positive definite", v.condition_number);
  }
  return v.statistic;
}

/// Precomputes the Psi1 block for a fitted null model so that each threshold
/// candidate costs one pass over the Psi2 recursion.
class LmEvaluator
{
public:
  LmEvaluator(
    const ArmaGarchParams & params, const TimeSeries & series, int d, double h_presample,
    InformationForm form = InformationForm::expected)
  : params_(params), x_(series.vector()), d_(d), form_(form)
  {
    params.validate_shape();
    if (d < 1) {throw std::invalid_argument("delay d must be >= 1");}
    p_ = params.p();
    q_ = params.q();
    k_ = p_ + q_ + 1;
    h0_ = h_presample;
    const auto out = filter_null(params, series, FilterOptions{h_presample});
    eps_ = out.eps;
    h_ = out.h;
    loglik_ = out.loglik;
    const auto n = static_cast<Eigen::Index>(x_.size());

    deps1_.resize(k_, n);
    dh1_.resize(k_, n);
    std::vector<double> ones(x_.size(), 1.0);
    recurse(ones, deps1_, dh1_);

    w_eps_.resize(n);
    w_h_.resize(n);
    g_eps_.resize(n);
    g_h_.resize(n);
    for (Eigen::Index t = 0; t < n; ++t) {
      const double ht = h_[t];
      const double et = eps_[t];
      w_eps_[t] = 1.0 / ht;
      w_h_[t] = 0.5 / (ht * ht);
      g_eps_[t] = -et / ht;
      g_h_[t] = 0.5 * (et * et / (ht * ht) - 1.0 / ht);
    }
    score1_ = deps1_ * g_eps_ + dh1_ * g_h_;
    deps1_w_ = deps1_ * w_eps_.asDiagonal();
    dh1_w_ = dh1_ * w_h_.asDiagonal();
    if (form_ == InformationForm::expected) {
      I11_ = deps1_w_ * deps1_.transpose() + dh1_w_ * dh1_.transpose();
    } else {
      I11_ = full_hessian_information(ones).topLeftCorner(k_, k_);
    }
    I11_ = 0.5 * (I11_ + I11_.transpose());
    l11_.compute(I11_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(I11_, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    const double cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    if (l11_.info() != Eigen::Success || !(lmin > 0.0) || !(cond <= kDegenerateCondition)) {
      throw DegenerateError("I11 is singular or ill conditioned", cond);
    }
  }

  int dim() const noexcept {return k_;}
  std::size_t size() const noexcept {return x_.size();}
  const std::vector<double> & eps() const noexcept {return eps_;}
  const std::vector<double> & h() const noexcept {return h_;}
  double loglik() const noexcept {return loglik_;}
  const Eigen::MatrixXd & I11() const noexcept {return I11_;}

  /// Regime indicator I(X_{t-d} <= r) for every t.
  std::vector<double> indicator(double r) const
  {
    std::vector<double> ind(x_.size());
    for (std::size_t t = 0; t < x_.size(); ++t) {
      ind[t] = switching_value(x_, t, d_) <= r ? 1.0 : 0.0;
    }
    return ind;
  }

  ScoreInformation score_information(double r) const
  {
    const auto ind = indicator(r);
    const auto n = static_cast<Eigen::Index>(x_.size());
    Eigen::MatrixXd deps2(k_, n), dh2(k_, n);
    recurse(ind, deps2, dh2);
    ScoreInformation si;
    si.score_psi2 = deps2 * g_eps_ + dh2 * g_h_;
    si.score_psi1 = score1_;
    si.I11 = I11_;
    if (form_ == InformationForm::expected) {
      si.I12 = deps1_w_ * deps2.transpose() + dh1_w_ * dh2.transpose();
      si.I22 = deps2 * w_eps_.asDiagonal() * deps2.transpose() +
        dh2 * w_h_.asDiagonal() * dh2.transpose();
    } else {
      const Eigen::MatrixXd full = full_hessian_information(ind);
      si.I12 = full.topRightCorner(k_, k_);
      si.I22 = full.bottomRightCorner(k_, k_);
    }
    si.I22 = 0.5 * (si.I22 + si.I22.transpose());
    si.I21 = si.I12.transpose();
    return si;
  }

  /// Full derivative state for inspection (both Psi blocks).
  ScoreState score_state(double r) const
  {
    const auto ind = indicator(r);
    const auto n = static_cast<Eigen::Index>(x_.size());
    Eigen::MatrixXd deps2(k_, n), dh2(k_, n);
    recurse(ind, deps2, dh2);
    ScoreState st;
    st.deps.resize(n, 2 * k_);
    st.dh.resize(n, 2 * k_);
    st.deps.leftCols(k_) = deps1_.transpose();
    st.deps.rightCols(k_) = deps2.transpose();
    st.dh.leftCols(k_) = dh1_.transpose();
    st.dh.rightCols(k_) = dh2.transpose();
    return st;
  }

  LmValue evaluate(double r) const
  {
    const auto si = score_information(r);
    return detail::lm_value(si.score_psi2, l11_.solve(si.I12), si.I12, si.I22, &si.score_psi1);
  }

  /// Weighted derivative process with the Psi1 projection removed, as a k x 2n matrix
  /// R(r) with R(r) R(s)' = I22(r,s) - I21(r) I11^{-1} I12(s) (expected form).
  Eigen::MatrixXd projected_scores(double r) const
  {
    const auto ind = indicator(r);
    const auto n = static_cast<Eigen::Index>(x_.size());
    Eigen::MatrixXd deps2(k_, n), dh2(k_, n);
    recurse(ind, deps2, dh2);
    const Eigen::MatrixXd I12 = deps1_w_ * deps2.transpose() + dh1_w_ * dh2.transpose();
    const Eigen::MatrixXd A = l11_.solve(I12);
    Eigen::MatrixXd out(k_, 2 * n);
    out.leftCols(n) = (deps2 - A.transpose() * deps1_) * w_eps_.cwiseSqrt().asDiagonal();
    out.rightCols(n) = (dh2 - A.transpose() * dh1_) * w_h_.cwiseSqrt().asDiagonal();
    return out;
  }

private:
  /// deps_t = D_t + sum theta_j deps_{t-j}; dh_t = 2 sum a_i eps_{t-i} deps_{t-i} + sum b_j dh_{t-j}.
  /// `mult` multiplies the regressor vector D_t (ones for Psi1, the indicator for Psi2).
  void recurse(const std::vector<double> & mult, Eigen::MatrixXd & deps, Eigen::MatrixXd & dh) const
  {
    const std::size_t n = x_.size();
    const int u = params_.u();
    const int v = params_.v();
    for (std::size_t t = 0; t < n; ++t) {
      auto col = deps.col(static_cast<Eigen::Index>(t));
      const double m = mult[t];
      col[0] = -m;
      for (int i = 1; i <= p_; ++i) {col[i] = static_cast<std::size_t>(i) <= t ? -m * x_[t - i] : 0.0;}
      for (int j = 1; j <= q_; ++j) {col[p_ + j] = static_cast<std::size_t>(j) <= t ? m * eps_[t - j] : 0.0;}
      for (int j = 1; j <= q_ && static_cast<std::size_t>(j) <= t; ++j) {
        col += params_.theta[j - 1] * deps.col(static_cast<Eigen::Index>(t - j));
      }
      auto hcol = dh.col(static_cast<Eigen::Index>(t));
      hcol.setZero();
      for (int i = 1; i <= u && static_cast<std::size_t>(i) <= t; ++i) {
        hcol += (2.0 * params_.a[i] * eps_[t - i]) * deps.col(static_cast<Eigen::Index>(t - i));
      }
      for (int j = 1; j <= v && static_cast<std::size_t>(j) <= t; ++j) {
        hcol += params_.b[j - 1] * dh.col(static_cast<Eigen::Index>(t - j));
      }
    }
  }

  /// -d^2 l / dPsi dPsi' over the full Psi vector, with second-derivative recursions
  /// for eps and h. Cost O(n K^2) per call with K = 2k.
  Eigen::MatrixXd full_hessian_information(const std::vector<double> & ind) const
  {
    const std::size_t n = x_.size();
    const Eigen::Index K = 2 * k_;
    const int u = params_.u();
    const int v = params_.v();
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd deps2(k_, ni), dh2(k_, ni);
    recurse(ind, deps2, dh2);
    Eigen::MatrixXd de(K, ni), dhh(K, ni);
    de.topRows(k_) = deps1_;
    de.bottomRows(k_) = deps2;
    dhh.topRows(k_) = dh1_;
    dhh.bottomRows(k_) = dh2;

    std::vector<Eigen::MatrixXd> s2e(n, Eigen::MatrixXd::Zero(K, K));
    std::vector<Eigen::MatrixXd> s2h(n, Eigen::MatrixXd::Zero(K, K));
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(K, K);
    for (std::size_t t = 0; t < n; ++t) {
      Eigen::MatrixXd & S = s2e[t];
      // Entries for theta_j (column p+j) and vartheta_j (column k+p+j) carry eps_{t-j}.
      for (int j = 1; j <= q_ && static_cast<std::size_t>(j) <= t; ++j) {
        const Eigen::VectorXd prev = de.col(static_cast<Eigen::Index>(t - j));
        const Eigen::Index c1 = p_ + j;
        const Eigen::Index c2 = k_ + p_ + j;
        S.row(c1) += prev.transpose();
        S.col(c1) += prev;
        S.row(c2) += ind[t] * prev.transpose();
        S.col(c2) += ind[t] * prev;
        S += params_.theta[j - 1] * s2e[t - j];
      }
      Eigen::MatrixXd & Sh = s2h[t];
      for (int i = 1; i <= u && static_cast<std::size_t>(i) <= t; ++i) {
        const Eigen::VectorXd prev = de.col(static_cast<Eigen::Index>(t - i));
        Sh += (2.0 * params_.a[i]) * (prev * prev.transpose() + eps_[t - i] * s2e[t - i]);
      }
      for (int j = 1; j <= v && static_cast<std::size_t>(j) <= t; ++j) {
        Sh += params_.b[j - 1] * s2h[t - j];
      }
      const double ht = h_[t];
      const double et = eps_[t];
      const Eigen::VectorXd ge = de.col(static_cast<Eigen::Index>(t));
      const Eigen::VectorXd gh = dhh.col(static_cast<Eigen::Index>(t));
      // Second derivative of l_t = -(eps^2/h + log h)/2.
      Eigen::MatrixXd d2 = -(1.0 / ht) * ge * ge.transpose() +
        (et / (ht * ht)) * (ge * gh.transpose() + gh * ge.transpose()) -
        (et / ht) * S + (0.5 / (ht * ht) - et * et / (ht * ht * ht)) * gh * gh.transpose() +
        0.5 * (et * et / (ht * ht) - 1.0 / ht) * Sh;
      info -= d2;
    }
    return 0.5 * (info + info.transpose());
  }

  ArmaGarchParams params_;
  std::vector<double> x_;
  int d_;
  InformationForm form_;
  int p_ = 0;
  int q_ = 0;
  int k_ = 1;
  double h0_ = 1.0;
  std::vector<double> eps_;
  std::vector<double> h_;
  double loglik_ = 0.0;
  Eigen::MatrixXd deps1_, dh1_, deps1_w_, dh1_w_;
  Eigen::VectorXd w_eps_, w_h_, g_eps_, g_h_, score1_;
  Eigen::MatrixXd I11_;
  Eigen::LDLT<Eigen::MatrixXd> l11_;
};

/// Psi2 score and information blocks at threshold r for a fitted null model.
inline ScoreInformation score_and_information(
  const FittedArmaGarch & fit, const TimeSeries & series, int d, double r,
  InformationForm form = InformationForm::expected)
{
  if (!std::isfinite(r)) {throw std::invalid_argument("threshold must be finite");}
  return LmEvaluator(fit.params, series, d, fit.h_presample, form).score_information(r);
}

inline ScoreState score_state(
  const FittedArmaGarch & fit, const TimeSeries & series, int d, double r)
{
  return LmEvaluator(fit.params, series, d, fit.h_presample).score_state(r);
}

}  // namespace tarma

#endif  // TARMA__SCORE_HPP_
