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

#ifndef TARMA__FILTER_HPP_
#define TARMA__FILTER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tarma/core.hpp"
#include "tarma/error.hpp"

namespace tarma
{

/// Residuals, conditional variances and conditional log-likelihood.
struct FilterOutput
{
  std::vector<double> eps;
  std::vector<double> h;
  double loglik = 0.0;

  bool operator==(const FilterOutput &) const = default;
};

struct FilterOptions
{
  /// Presample conditional variance. Defaults to a0 / (1 - sum a - sum b).
  std::optional<double> h_presample;
};

/// Value of the switching variable for observation t (0-based). Times before the
/// sample start use X_1, so r < min X switches nothing and r >= max X switches all.
inline double switching_value(std::span<const double> x, std::size_t t, int d) noexcept
{
  const auto dd = static_cast<std::size_t>(d);
  return t >= dd ? x[t - dd] : x[0];
}

inline double default_h_presample(const ArmaGarchParams & params)
{
  const double pers = params.persistence();
  return pers < 1.0 ? params.a[0] / (1.0 - pers) : params.a[0];
}

namespace detail
{

/// eps_t recursion; `psi2` null for the linear model.
inline void mean_filter(
  std::span<const double> x, const ArmaGarchParams & base, const double * psi2, double r, int d,
  std::vector<double> & eps)
{
  const int p = base.p();
  const int q = base.q();
  const std::size_t n = x.size();
  eps.assign(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double m = base.phi[0];
    for (int i = 1; i <= p && static_cast<std::size_t>(i) <= t; ++i) {m += base.phi[i] * x[t - i];}
    for (int j = 1; j <= q && static_cast<std::size_t>(j) <= t; ++j) {
      m -= base.theta[j - 1] * eps[t - j];
    }
    if (psi2 && switching_value(x, t, d) <= r) {
      double extra = psi2[0];
      for (int i = 1; i <= p && static_cast<std::size_t>(i) <= t; ++i) {extra += psi2[i] * x[t - i];}
      for (int j = 1; j <= q && static_cast<std::size_t>(j) <= t; ++j) {
        extra -= psi2[p + j] * eps[t - j];
      }
      m += extra;
    }
    eps[t] = x[t] - m;
  }
}

/// h_t recursion and log-likelihood. Returns false if h leaves (0, inf).
inline bool variance_filter(
  const ArmaGarchParams & base, double h0, const std::vector<double> & eps,
  std::vector<double> & h, double & loglik)
{
  const int u = base.u();
  const int v = base.v();
  const std::size_t n = eps.size();
  h.assign(n, 0.0);
  double ll = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double ht = base.a[0];
    for (int i = 1; i <= u; ++i) {
      if (static_cast<std::size_t>(i) <= t) {ht += base.a[i] * eps[t - i] * eps[t - i];}
    }
    for (int j = 1; j <= v; ++j) {
      ht += base.b[j - 1] * (static_cast<std::size_t>(j) <= t ? h[t - j] : h0);
    }
    if (!(ht > 0.0) || !std::isfinite(ht)) {
      loglik = -std::numeric_limits<double>::infinity();
      return false;
    }
    h[t] = ht;
    ll += eps[t] * eps[t] / ht + std::log(ht);
  }
  loglik = std::isfinite(ll) ? -0.5 * ll : -std::numeric_limits<double>::infinity();
  return true;
}

inline void check_filter_shape(const ArmaGarchParams & params)
{
  params.validate_shape();
}

}  // namespace detail

/// Log-likelihood only, without throwing; -inf when the recursion breaks down.
inline double loglik_null(
  const ArmaGarchParams & params, std::span<const double> x, double h0,
  std::vector<double> & eps_buf, std::vector<double> & h_buf)
{
  detail::mean_filter(x, params, nullptr, 0.0, 1, eps_buf);
  double ll = 0.0;
  detail::variance_filter(params, h0, eps_buf, h_buf, ll);
  return ll;
}

inline double loglik_threshold(
  const TarmaGarchParams & params, std::span<const double> x, double h0,
  std::vector<double> & eps_buf, std::vector<double> & h_buf)
{
  detail::mean_filter(x, params.base, params.psi2.data(), params.r, params.d, eps_buf);
  double ll = 0.0;
  detail::variance_filter(params.base, h0, eps_buf, h_buf, ll);
  return ll;
}

/// Null-model filter: eps_t(lambda), h_t(lambda) and the conditional log-likelihood.
inline FilterOutput filter_null(
  const ArmaGarchParams & params, const TimeSeries & series, const FilterOptions & opts = {})
{
  detail::check_filter_shape(params);
  FilterOutput out;
  detail::mean_filter(series.values(), params, nullptr, 0.0, 1, out.eps);
  const double h0 = opts.h_presample.value_or(default_h_presample(params));
  if (!detail::variance_filter(params, h0, out.eps, out.h, out.loglik)) {
    throw NumericError("conditional variance left the positive reals");
  }
  return out;
}

/// Threshold filter with the regime term I(X_{t-d} <= r).
inline FilterOutput filter_threshold(
  const TarmaGarchParams & params, const TimeSeries & series, const FilterOptions & opts = {})
{
  params.validate_shape();
  FilterOutput out;
  detail::mean_filter(
    series.values(), params.base, params.psi2.data(), params.r, params.d, out.eps);
  const double h0 = opts.h_presample.value_or(default_h_presample(params.base));
  if (!detail::variance_filter(params.base, h0, out.eps, out.h, out.loglik)) {
    throw NumericError("conditional variance left the positive reals");
  }
  return out;
}

}  // namespace tarma

#endif  // TARMA__FILTER_HPP_
