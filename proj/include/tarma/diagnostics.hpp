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

#ifndef TARMA__DIAGNOSTICS_HPP_
#define TARMA__DIAGNOSTICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "tarma/error.hpp"

namespace tarma
{

struct TestReport
{
  double statistic = 0.0;
  double dof = 0.0;         // degrees of freedom, or effective size for two-sample tests
  double p_value = 1.0;
  std::string description;

  bool operator==(const TestReport &) const = default;
};

struct Correlogram
{
  std::vector<double> values;  // index 0 is lag 0 for the ACF, lag 1 for the PACF
  double band = 0.0;           // 1.96 / sqrt(n)

  bool operator==(const Correlogram &) const = default;
};

namespace detail
{

inline void check_correlogram_input(std::span<const double> x, std::size_t max_lag)
{
  if (x.empty()) {throw DataError("empty series");}
  if (2 * max_lag >= x.size()) {throw std::invalid_argument("max_lag must be below n/2");}
  if (std::all_of(x.begin(), x.end(), [&](double v) {return v == x[0];})) {
    throw DataError("autocorrelations undefined for a constant series");
  }
}

inline double chi2_upper_tail(double q, double dof)
{
  if (!(q > 0.0)) {return 1.0;}
  const boost::math::chi_squared_distribution<double> chi(dof);
  return boost::math::cdf(boost::math::complement(chi, q));
}

}  // namespace detail

/// Sample autocorrelations at lags 0..max_lag, mean-centred with denominator n.
inline Correlogram acf(std::span<const double> x, std::size_t max_lag)
{
  detail::check_correlogram_input(x, max_lag);
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) {mean += v;}
  mean /= static_cast<double>(n);
  std::vector<double> c(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t t = k; t < n; ++t) {s += (x[t] - mean) * (x[t - k] - mean);}
    c[k] = s / static_cast<double>(n);
  }
  Correlogram out;
  out.values.resize(max_lag + 1);
  out.values[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {out.values[k] = c[k] / c[0];}
  out.band = 1.96 / std::sqrt(static_cast<double>(n));
  return out;
}

/// Partial autocorrelations at lags 1..max_lag by Durbin-Levinson.
inline Correlogram pacf(std::span<const double> x, std::size_t max_lag)
{
  const auto r = acf(x, max_lag).values;
  Correlogram out;
  out.band = 1.96 / std::sqrt(static_cast<double>(x.size()));
  std::vector<double> phi_prev, phi;
  double v = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double num = r[k];
    for (std::size_t j = 1; j < k; ++j) {num -= phi_prev[j - 1] * r[k - j];}
    const double kk = num / v;
    phi.assign(k, 0.0);
    for (std::size_t j = 1; j < k; ++j) {phi[j - 1] = phi_prev[j - 1] - kk * phi_prev[k - j - 1];}
    phi[k - 1] = kk;
    v *= (1.0 - kk * kk);
    out.values.push_back(kk);
    phi_prev = phi;
  }
  return out;
}

/// Portmanteau Q = n(n+2) sum rho_k^2 / (n-k) with a chi-square(n_lags - fitdf) p-value.
inline TestReport ljung_box(std::span<const double> x, std::size_t n_lags, std::size_t fitdf = 0)
{
  if (n_lags <= fitdf) {throw std::invalid_argument("n_lags must exceed fitdf");}
  const auto r = acf(x, n_lags).values;
  const double n = static_cast<double>(x.size());
  double q = 0.0;
  for (std::size_t k = 1; k <= n_lags; ++k) {q += r[k] * r[k] / (n - static_cast<double>(k));}
  q *= n * (n + 2.0);
  TestReport rep;
  rep.statistic = q;
  rep.dof = static_cast<double>(n_lags - fitdf);
  rep.p_value = detail::chi2_upper_tail(q, rep.dof);
  rep.description = "Ljung-Box test, " + std::to_string(n_lags) + " lags";
  return rep;
}

/// Kolmogorov limiting tail probability P(K > lambda).
inline double kolmogorov_tail(double lambda)
{
  if (!(lambda > 0.0)) {return 1.0;}
  double p;
  if (lambda < 1.0) {
    // Small lambda: the alternating series converges slowly; use the theta-function form.
    const double pi = std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-(2.0 * k - 1.0) * (2.0 * k - 1.0) * pi * pi / (8.0 * lambda * lambda));
      s += term;
      if (term < 1e-17) {break;}
    }
    p = 1.0 - std::sqrt(2.0 * pi) / lambda * s;
  } else {
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      s += (k % 2 == 1 ? term : -term);
      if (term < 1e-17) {break;}
    }
    p = 2.0 * s;
  }
  return std::clamp(p, 0.0, 1.0);
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
inline TestReport ks_two_sample(std::span<const double> a, std::span<const double> b)
{
  if (a.empty() || b.empty()) {throw std::invalid_argument("KS test needs two nonempty samples");}
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) {++i;}
    while (j < sb.size() && sb[j] == v) {++j;}
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  TestReport rep;
  rep.statistic = d;
  rep.dof = ne;
  rep.p_value = d == 0.0 ? 1.0 : kolmogorov_tail(std::sqrt(ne) * d);
  rep.description = "two-sample Kolmogorov-Smirnov test";
  return rep;
}

}  // namespace tarma

#endif  // TARMA__DIAGNOSTICS_HPP_
