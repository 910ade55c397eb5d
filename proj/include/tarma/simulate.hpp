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

#ifndef TARMA__SIMULATE_HPP_
#define TARMA__SIMULATE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tarma/core.hpp"
#include "tarma/error.hpp"
#include "tarma/rng.hpp"

namespace tarma
{

/// Sign convention of supplied MA coefficients. `model` subtracts theta_j eps_{t-j}
/// in the mean equation, `plus` adds it. plus(theta) is model(-theta).
enum class SimMaConvention
{
  model,
  plus,
};

inline constexpr std::size_t kDefaultBurnIn = 500;
inline constexpr double kDivergenceBound = 1e12;

namespace detail
{

inline std::vector<double> to_model_ma(const std::vector<double> & theta, SimMaConvention conv)
{
  std::vector<double> out(theta);
  if (conv == SimMaConvention::plus) {
    for (double & t : out) {t = -t;}
  }
  return out;
}

inline void check_simulation_params(const ArmaGarchParams & p)
{
  p.validate_shape();
  if (!(p.a[0] > 0.0)) {throw std::invalid_argument("a0 must be positive");}
  for (std::size_t i = 1; i < p.a.size(); ++i) {
    if (p.a[i] < 0.0) {throw std::invalid_argument("ARCH coefficients must be nonnegative");}
  }
  for (double bj : p.b) {
    if (bj < 0.0) {throw std::invalid_argument("GARCH coefficients must be nonnegative");}
  }
  if (!(p.persistence() < 1.0)) {
    throw std::invalid_argument("variance persistence must be below one");
  }
}

/// Shared recursion. `psi2` null means no threshold term; the null path and a
/// zero increment therefore produce identical floating-point sequences.
template<typename Sampler>
std::vector<double> simulate_impl(
  const ArmaGarchParams & base, const std::vector<double> * psi2, double r, int d,
  SimMaConvention conv, std::size_t n, std::size_t burn_in, Sampler & z)
{
  check_simulation_params(base);
  if (n == 0) {throw std::invalid_argument("simulation length must be positive");}
  const int p = base.p();
  const int q = base.q();
  const int u = base.u();
  const int v = base.v();
  const auto theta = to_model_ma(base.theta, conv);
  std::vector<double> vartheta;
  if (psi2) {
    vartheta.assign(psi2->begin() + p + 1, psi2->end());
    vartheta = to_model_ma(vartheta, conv);
  }

  const std::size_t total = burn_in + n;
  const double h0 = base.a[0] / (1.0 - base.persistence());
  const int lag = std::max({p, q, u, v, d, 1});
  const auto off = static_cast<std::size_t>(lag);
  // Presample region of length `lag` holds X = 0, eps = 0, h = h0.
  std::vector<double> x(total + off, 0.0);
  std::vector<double> e(total + off, 0.0);
  std::vector<double> h(total + off, h0);

  for (std::size_t s = off; s < total + off; ++s) {
    double ht = base.a[0];
    for (int i = 1; i <= u; ++i) {ht += base.a[i] * e[s - i] * e[s - i];}
    for (int j = 1; j <= v; ++j) {ht += base.b[j - 1] * h[s - j];}
    h[s] = ht;
    const double eps = std::sqrt(ht) * z();
    e[s] = eps;

    double m = base.phi[0];
    for (int i = 1; i <= p; ++i) {m += base.phi[i] * x[s - i];}
    for (int j = 1; j <= q; ++j) {m -= theta[j - 1] * e[s - j];}
    if (psi2 && x[s - d] <= r) {
      double extra = (*psi2)[0];
      for (int i = 1; i <= p; ++i) {extra += (*psi2)[i] * x[s - i];}
      for (int j = 1; j <= q; ++j) {extra -= vartheta[j - 1] * e[s - j];}
      m += extra;
    }
    const double xt = m + eps;
    if (!std::isfinite(xt) || std::abs(xt) > kDivergenceBound) {
      throw DivergenceError(
              "simulated path diverged at step " + std::to_string(s - off + 1));
    }
    x[s] = xt;
  }
  return std::vector<double>(x.end() - static_cast<std::ptrdiff_t>(n), x.end());
}

}  // namespace detail

/// ARMA-GARCH path with a caller-supplied innovation sampler (callable returning z_t).
template<typename Sampler>
TimeSeries simulate_arma_garch_with(
  const ArmaGarchParams & params, SimMaConvention conv, std::size_t n, std::size_t burn_in,
  Sampler & z)
{
  return TimeSeries(detail::simulate_impl(params, nullptr, 0.0, 1, conv, n, burn_in, z));
}

template<typename Sampler>
TimeSeries simulate_tarma_garch_with(
  const TarmaGarchParams & params, SimMaConvention conv, std::size_t n, std::size_t burn_in,
  Sampler & z)
{
  params.validate_shape();
  return TimeSeries(
    detail::simulate_impl(params.base, &params.psi2, params.r, params.d, conv, n, burn_in, z));
}

inline TimeSeries simulate_arma_garch(
  const ArmaGarchParams & params, SimMaConvention conv, std::size_t n,
  std::size_t burn_in, std::uint64_t seed)
{
  GaussianSampler z(seed);
  return simulate_arma_garch_with(params, conv, n, burn_in, z);
}

inline TimeSeries simulate_tarma_garch(
  const TarmaGarchParams & params, SimMaConvention conv, std::size_t n,
  std::size_t burn_in, std::uint64_t seed)
{
  GaussianSampler z(seed);
  return simulate_tarma_garch_with(params, conv, n, burn_in, z);
}

/// Threshold AR with GARCH errors; `params` must have no MA terms.
inline TimeSeries simulate_tar_garch(
  const TarmaGarchParams & params, std::size_t n, std::size_t burn_in, std::uint64_t seed)
{
  if (params.base.q() != 0) {
    throw std::invalid_argument("simulate_tar_garch requires q = 0");
  }
  return simulate_tarma_garch(params, SimMaConvention::model, n, burn_in, seed);
}

/// Y_t = X_t + eta_t with eta_t ~ N(0, sigma2_x / snr). Infinite SNR is the identity.
inline TimeSeries add_measurement_noise(
  const TimeSeries & series, double snr, double sigma2_x, std::uint64_t seed)
{
  if (!(snr > 0.0)) {throw std::invalid_argument("snr must be positive");}
  if (!(sigma2_x > 0.0)) {throw std::invalid_argument("sigma2_x must be positive");}
  if (std::isinf(snr)) {return series;}
  const double sd = std::sqrt(sigma2_x / snr);
  GaussianSampler z(seed);
  std::vector<double> y(series.values().begin(), series.values().end());
  for (double & yt : y) {yt += sd * z();}
  return TimeSeries(std::move(y), series.meta());
}

namespace detail
{

inline double sample_variance(std::span<const double> x)
{
  double mean = 0.0;
  for (double v : x) {mean += v;}
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) {ss += (v - mean) * (v - mean);}
  return ss / static_cast<double>(x.size());
}

}  // namespace detail

/// Variance of X estimated from one long simulated path.
inline double unconditional_variance(
  const ArmaGarchParams & params, SimMaConvention conv, std::size_t n_sim, std::uint64_t seed)
{
  return detail::sample_variance(
    simulate_arma_garch(params, conv, n_sim, kDefaultBurnIn, seed).values());
}

inline double unconditional_variance(
  const TarmaGarchParams & params, SimMaConvention conv, std::size_t n_sim, std::uint64_t seed)
{
  return detail::sample_variance(
    simulate_tarma_garch(params, conv, n_sim, kDefaultBurnIn, seed).values());
}

}  // namespace tarma

#endif  // TARMA__SIMULATE_HPP_
