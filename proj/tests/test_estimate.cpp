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


#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "tarma/estimate.hpp"
#include "tarma/optimize.hpp"
#include "tarma/rng.hpp"
#include "tarma/simulate.hpp"
#include "tarma/tarma_ls.hpp"

namespace
{

using namespace tarma;

// ------------------------------------------------------------------ optimizer

TEST(Bfgs, Rosenbrock)
{
  auto f = [](const Eigen::VectorXd & x) {
      return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
  BfgsOptions o;
  o.f_rel_tol = 1e-14;
  o.max_iterations = 2000;
  const auto res = bfgs_minimize(f, Eigen::Vector2d(-1.2, 1.0), o);
  EXPECT_NEAR(res.x[0], 1.0, 1e-3);
  EXPECT_NEAR(res.x[1], 1.0, 2e-3);
}

TEST(Bfgs, QuadraticAndInfeasibleStart)
{
  auto f = [](const Eigen::VectorXd & x) {return (x.array() - 3.0).square().sum();};
  const auto res = bfgs_minimize(f, Eigen::VectorXd::Zero(4));
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(res.x.maxCoeff(), 3.0, 1e-4);
  auto g = [](const Eigen::VectorXd &) {return std::numeric_limits<double>::infinity();};
  EXPECT_FALSE(bfgs_minimize(g, Eigen::VectorXd::Zero(2)).converged);
}

// ------------------------------------------------------------------ reparameterization

TEST(Pacf, RoundTripOnStablePolynomials)
{
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> U(-0.95, 0.95);
  for (int rep = 0; rep < 200; ++rep) {
    const int k = 1 + rep % 4;
    std::vector<double> r(static_cast<std::size_t>(k));
    for (auto & v : r) {v = U(eng);}
    const auto c = detail::pacf_to_coefficients(r);
    // partial autocorrelations inside (-1, 1) give a stationary polynomial
    for (const auto & z : lag_polynomial_roots(c)) {EXPECT_GT(std::abs(z), 1.0);}
    const auto back = detail::coefficients_to_pacf(c);
    ASSERT_TRUE(back.has_value());
    for (int i = 0; i < k; ++i) {EXPECT_NEAR((*back)[static_cast<std::size_t>(i)], r[static_cast<std::size_t>(i)], 1e-10);}
  }
  EXPECT_FALSE(detail::coefficients_to_pacf({1.2}).has_value());
}

// ------------------------------------------------------------------ QML fit

TEST(FitArmaGarch, WhiteNoiseArch)
{
  const auto x = simulate_arma_garch(ArmaGarchParams{}, SimMaConvention::model, 5000, 100, 31);
  const auto f = fit_arma_garch(x, 0, 0, 1, 0);
  ASSERT_TRUE(f.converged);
  EXPECT_NEAR(f.params.a[0], 1.0, 0.05);
  EXPECT_NEAR(f.params.a[1], 0.0, 0.05);
}

TEST(FitArmaGarch, AdmissibleAndImprovesOnStart)
{
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ArmaGarchParams truth{{0.2, 0.6}, {-0.3}, {0.5, 0.15}, {0.7}};
    const auto x = simulate_arma_garch(truth, SimMaConvention::model, 600, 200, seed);
    FitOptions o;
    o.std_errors = true;
    const auto f = fit_arma_garch(x, 1, 1, 1, 1, o);
    EXPECT_TRUE(f.params.variance_admissible());
    EXPECT_GE(f.filter.loglik, f.loglik_start);
    for (double h : f.filter.h) {EXPECT_GE(h, f.params.a[0]);}
    const auto ref = filter_null(f.params, x, FilterOptions{f.h_presample});
    EXPECT_EQ(ref, f.filter);
    if (f.std_errors) {
      EXPECT_EQ(f.std_errors->size(), 6u);
      for (double se : *f.std_errors) {EXPECT_GT(se, 0.0);}
    }
  }
}

TEST(FitArmaGarch, InputGuards)
{
  EXPECT_THROW(fit_arma_garch(TimeSeries(std::vector<double>(30, 1.0)), 1, 1, 1, 1), DataError);
  EXPECT_THROW(fit_arma_garch(TimeSeries(std::vector<double>(500, 1.0)), 0, 0, 1, 0), DataError);
}

TEST(FitArmaCss, HomoskedasticNull)
{
  const ArmaGarchParams truth{{0.0, 0.5}, {0.4}, {2.0}, {}};
  const auto x = simulate_arma_garch(truth, SimMaConvention::plus, 3000, 200, 3);
  const auto f = fit_arma_css(x, 1, 1);
  ASSERT_TRUE(f.converged);
  EXPECT_NEAR(f.params.phi[1], 0.5, 0.06);
  EXPECT_NEAR(-f.params.theta[0], 0.4, 0.06);
  EXPECT_NEAR(f.params.a[0], 2.0, 0.15);
  EXPECT_TRUE(f.params.b.empty());
  for (double h : f.filter.h) {EXPECT_EQ(h, f.params.a[0]);}
}

// ------------------------------------------------------------------ order selection

TEST(HannanRissanen, WhiteNoiseSelectsZero)
{
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto x = simulate_arma_garch(ArmaGarchParams{}, SimMaConvention::model, 2000, 10, replication_seed(4, 0, seed));
    hits += hannan_rissanen_select(x, 3, 3) == std::make_pair(0, 0) ? 1 : 0;
  }
  EXPECT_GE(hits, 90);
}

TEST(HannanRissanen, Arma11IsModal)
{
  std::map<std::pair<int, int>, int> counts;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto x = simulate_arma_garch(ArmaGarchParams{{0.0, 0.5}, {0.4}, {1.0}, {}}, SimMaConvention::plus, 2000,
      100, replication_seed(5, 0, seed));
    ++counts[hannan_rissanen_select(x, 3, 3)];
  }
  const auto modal = std::max_element(counts.begin(), counts.end(),
    [](const auto & a, const auto & b) {return a.second < b.second;});
  EXPECT_EQ(modal->first, std::make_pair(1, 1));
}

TEST(HannanRissanen, RecoversArmaCoefficients)
{
  const auto x = simulate_arma_garch(ArmaGarchParams{{0.0, 0.6}, {-0.3}, {1.0}, {}}, SimMaConvention::model, 5000,
    100, 8);
  const auto est = hannan_rissanen_estimate(x.values(), 1, 1);
  EXPECT_NEAR(est.phi[1], 0.6, 0.05);
  EXPECT_NEAR(est.theta[0], -0.3, 0.05);
}

// ------------------------------------------------------------------ assumptions

TEST(CheckAssumptions, Examples)
{
  const auto a = check_assumptions(ArmaGarchParams{{0.0, 0.5}, {}, {1.0, 0.1}, {0.8}});
  ASSERT_EQ(a.ar_root_moduli.size(), 1u);
  EXPECT_NEAR(a.ar_root_moduli[0], 2.0, 1e-12);
  EXPECT_TRUE(a.ok());
  const auto b = check_assumptions(ArmaGarchParams{{0.0}, {}, {1.0, 0.6}, {0.5}});
  EXPECT_NEAR(b.persistence, 1.1, 1e-12);
  EXPECT_FALSE(b.persistence_ok);
  EXPECT_FALSE(b.ok());
  const auto c = check_assumptions(ArmaGarchParams{{0.0, 0.5}, {0.5}, {1.0}, {}});
  EXPECT_FALSE(c.coprime);
  const auto d = check_assumptions(ArmaGarchParams{{0.0, 1.1}, {}, {1.0}, {}});
  EXPECT_FALSE(d.ar_stationary);
}

TEST(CheckAssumptions, QuadraticRootOracle)
{
  std::mt19937_64 eng(6);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int rep = 0; rep < 200; ++rep) {
    const double c1 = U(eng), c2 = U(eng) / 1.5;
    // roots of 1 - c1 z - c2 z^2 by the quadratic formula
    const std::complex<double> disc = std::sqrt(std::complex<double>(c1 * c1 + 4.0 * c2));
    const std::complex<double> z1 = (-c1 + disc) / (2.0 * c2);
    const std::complex<double> z2 = (-c1 - disc) / (2.0 * c2);
    const bool stable = std::abs(z1) > 1.0 && std::abs(z2) > 1.0;
    const auto rep_ = check_assumptions(ArmaGarchParams{{0.0, c1, c2}, {}, {1.0}, {}});
    ASSERT_EQ(rep_.ar_root_moduli.size(), 2u);
    std::vector<double> m{std::abs(z1), std::abs(z2)};
    std::sort(m.begin(), m.end());
    EXPECT_NEAR(rep_.ar_root_moduli[0], m[0], 1e-8 * m[0]);
    EXPECT_NEAR(rep_.ar_root_moduli[1], m[1], 1e-8 * m[1]);
    if (std::abs(m[0] - 1.0) > 1e-8) {EXPECT_EQ(rep_.ar_stationary, stable);}
  }
}

TEST(CheckAssumptions, ThresholdRegimes)
{
  const TarmaGarchParams tp{{{0.5, 0.5}, {-0.5}, {1.0, 0.1}, {0.8}}, {-1.0, -1.0, 1.0}, 0.0, 1};
  const auto rep = check_assumptions(tp);
  EXPECT_TRUE(rep.upper.ok());
  EXPECT_NEAR(rep.lower.ar_root_moduli[0], 2.0, 1e-12);
}

// ------------------------------------------------------------------ TARMA least squares

TarmaGarchParams power_dgp(double psi)
{
  return TarmaGarchParams{{{0.5, 0.5}, {0.5}, {1.0, 0.1}, {0.8}}, {psi, psi, psi}, 0.0, 1};
}

TEST(TarmaLs, SingleCandidateIsSelected)
{
  const auto x = simulate_tarma_garch(power_dgp(-0.8), SimMaConvention::plus, 500, 200, 1);
  const auto fit = fit_tarma_ls(x, TarmaSpec::dense(1, 1), ThresholdGrid::from_candidates({0.37}));
  EXPECT_EQ(fit.r, 0.37);
  EXPECT_EQ(fit.trace.size(), 1u);
}

TEST(TarmaLs, RssIsMinimumOverRescan)
{
  const auto x = simulate_tarma_garch(power_dgp(-0.8), SimMaConvention::plus, 400, 200, 2);
  const auto grid = percentile_grid(x, 0.2, 0.8, 25);
  const auto fit = fit_tarma_ls(x, TarmaSpec::dense(1, 1), grid);
  ASSERT_FALSE(fit.trace.empty());
  for (const auto & pt : fit.trace) {
    const auto single = fit_tarma_ls(x, TarmaSpec::dense(1, 1), ThresholdGrid::from_candidates({pt.r}));
    EXPECT_EQ(single.rss, pt.rss);
    EXPECT_GE(pt.rss, fit.rss);
  }
  EXPECT_TRUE(std::find(grid.candidates.begin(), grid.candidates.end(), fit.r) != grid.candidates.end());
  double rss = 0.0;
  for (double e : fit.residuals) {rss += e * e;}
  EXPECT_NEAR(rss, fit.rss, 1e-9 * rss);
}

TEST(TarmaLs, ConsistencyAndTwoStage)
{
  // GARCH case (1, 0.4, 0.4); intervals use the HC0 standard errors
  const double truth[6] = {-0.5, -0.5, -0.5, 0.5, 0.5, 0.5};
  int r_hits = 0, stage2_hits = 0;
  int covered[6] = {0, 0, 0, 0, 0, 0};
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    auto dgp = power_dgp(-1.0);
    dgp.base.a = {1.0, 0.4};
    dgp.base.b = {0.4};
    const auto x = simulate_tarma_garch(dgp, SimMaConvention::plus, 5000, 500, replication_seed(7, 0, static_cast<std::uint64_t>(s)));
    const auto grid = percentile_grid(x, 0.15, 0.85, 200);
    const auto f = fit_two_stage(x, TarmaSpec::dense(1, 1), grid, 1, 1);
    const auto & lo = f.stage1.lower;
    const auto & up = f.stage1.upper;
    r_hits += std::abs(f.stage1.r) <= 0.15 ? 1 : 0;
    const double est[6] = {lo.intercept, lo.ar[0], lo.ma[0], up.intercept, up.ar[0], up.ma[0]};
    const double se[6] = {lo.intercept_se, lo.ar_se[0], lo.ma_se[0], up.intercept_se, up.ar_se[0], up.ma_se[0]};
    for (int i = 0; i < 6; ++i) {covered[i] += std::abs(est[i] - truth[i]) <= 1.96 * se[i] ? 1 : 0;}
    const auto & g = f.garch.params;
    const bool s2 = std::abs(g.a[0] - 1.0) <= 0.15 && std::abs(g.a[1] - 0.4) <= 0.15 && std::abs(g.b[0] - 0.4) <= 0.15;
    stage2_hits += s2 ? 1 : 0;
    if (s == 0) {
      // composition equals running the stages by hand
      const auto s1fit = fit_tarma_ls(x, TarmaSpec::dense(1, 1), grid);
      const auto s2fit = fit_arma_garch(TimeSeries(s1fit.residuals), 0, 0, 1, 1);
      EXPECT_EQ(f.stage1, s1fit);
      EXPECT_EQ(f.garch, s2fit);
      EXPECT_EQ(f.tarma, to_tarma_params(s1fit, s2fit.params));
    }
  }
  EXPECT_GE(r_hits, 90);
  for (int i = 0; i < 6; ++i) {EXPECT_GE(covered[i], 85) << "coefficient " << i;}
  EXPECT_GE(stage2_hits, 80);
}

TEST(TarmaLs, HomoskedasticStandardErrors)
{
  // with i.i.d. errors both forms agree to first order
  const auto x = simulate_tarma_garch(TarmaGarchParams{{{0.5, 0.5}, {0.5}, {1.0}, {}}, {-1.0, -1.0, -1.0}, 0.0, 1},
    SimMaConvention::plus, 5000, 500, 12);
  const auto grid = ThresholdGrid::from_candidates({0.0});
  TarmaLsOptions plain;
  plain.robust_std_errors = false;
  const auto a = fit_tarma_ls(x, TarmaSpec::dense(1, 1), grid);
  const auto b = fit_tarma_ls(x, TarmaSpec::dense(1, 1), grid, plain);
  EXPECT_EQ(a.upper.ar, b.upper.ar);
  EXPECT_NEAR(a.upper.ar_se[0], b.upper.ar_se[0], 0.15 * b.upper.ar_se[0]);
  EXPECT_NEAR(a.lower.ma_se[0], b.lower.ma_se[0], 0.15 * b.lower.ma_se[0]);
  double rss = 0.0;
  for (double e : b.residuals) {rss += e * e;}
  EXPECT_NEAR(b.sigma2, rss / static_cast<double>(b.residuals.size()), 1e-12 * rss);
}

TEST(TarmaLs, ParameterMapping)
{
  TarmaLsFit fit;
  fit.spec = TarmaSpec{RegimeSpec{{1, 12}, {3}}, RegimeSpec{{1}, {1, 3}}, 1};
  fit.r = 6.2;
  fit.lower = RegimeCoefficients{0.4, {0.1, 0.8}, {0.09}};
  fit.upper = RegimeCoefficients{0.8, {0.4}, {0.25, 0.05}};
  const auto tp = to_tarma_params(fit, ArmaGarchParams{{0.0}, {}, {0.2, 0.1}, {0.7}});
  // dense layout over lags 1..12 and 1..3, MA sign flipped to the subtracted convention
  ASSERT_EQ(tp.base.phi.size(), 13u);
  ASSERT_EQ(tp.base.theta.size(), 3u);
  EXPECT_EQ(tp.base.phi[0], 0.8);
  EXPECT_EQ(tp.base.phi[1], 0.4);
  EXPECT_EQ(tp.base.phi[12], 0.0);
  EXPECT_EQ(tp.base.theta[0], -0.25);
  EXPECT_EQ(tp.base.theta[2], -0.05);
  EXPECT_NEAR(tp.psi2[0], 0.4 - 0.8, 1e-15);
  EXPECT_NEAR(tp.psi2[12], 0.8, 1e-15);
  EXPECT_NEAR(tp.psi2[13 + 0], 0.25, 1e-15);
  EXPECT_NEAR(tp.psi2[13 + 2], -0.09 + 0.05, 1e-15);
  EXPECT_EQ(tp.r, 6.2);
  EXPECT_EQ(tp.base.a, (std::vector<double>{0.2, 0.1}));
}

}  // namespace
