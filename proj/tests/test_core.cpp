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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include <gtest/gtest.h>

#include "tarma/core.hpp"
#include "tarma/diagnostics.hpp"
#include "tarma/filter.hpp"
#include "tarma/rng.hpp"
#include "tarma/simulate.hpp"
#include "tarma/svg.hpp"

namespace
{

using namespace tarma;

std::string temp_file(const std::string & name, const std::string & content)
{
  const auto p = std::filesystem::temp_directory_path() / ("tarma_core_" + name);
  std::ofstream(p) << content;
  return p.string();
}

double variance(const std::vector<double> & v)
{
  double m = 0.0;
  for (double e : v) {m += e;}
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double e : v) {s += (e - m) * (e - m);}
  return s / static_cast<double>(v.size());
}

// ------------------------------------------------------------------ core

TEST(TimeSeries, RejectsEmptyAndNonFinite)
{
  EXPECT_THROW(TimeSeries(std::vector<double>{}), DataError);
  EXPECT_THROW(TimeSeries({1.0, std::nan("")}), DataError);
  EXPECT_THROW(TimeSeries({1.0, INFINITY}), DataError);
  EXPECT_THROW(TimeSeries({1.0}, SeriesMeta{"1949-01", 0}), DataError);
  EXPECT_NO_THROW(TimeSeries({1.0}, SeriesMeta{"1949-01", 12}));
}

TEST(LoadSeries, PlainColumn)
{
  const auto x = load_series(temp_file("plain.csv", "1.0\n2.0\n3.0\n"));
  EXPECT_EQ(x.vector(), (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(LoadSeries, HeaderAndNamedColumn)
{
  const auto path = temp_file("named.csv", "date,x\n1949-01,4.5\n1949-02,5.25\n");
  EXPECT_EQ(load_series(path, std::string("x")).vector(), (std::vector<double>{4.5, 5.25}));
  EXPECT_EQ(load_series(path, std::size_t{1}).vector(), (std::vector<double>{4.5, 5.25}));
  EXPECT_THROW(load_series(path, std::string("y")), DataError);
}

TEST(LoadSeries, RejectsNonNumericAndMissing)
{
  EXPECT_THROW(load_series(temp_file("nan.csv", "x\nNaN\n")), DataError);
  EXPECT_THROW(load_series(temp_file("gap.csv", "x\n1\n\n2\n,\n")), DataError);
  EXPECT_THROW(load_series(temp_file("empty.csv", "")), DataError);
  EXPECT_THROW(load_series("/nonexistent/file.csv"), DataError);
}

TEST(LoadSeries, WriteRoundTripIsExact)
{
  std::mt19937_64 eng(11);
  std::normal_distribution<double> z(0.0, 1e3);
  std::vector<double> v(500);
  for (auto & e : v) {e = z(eng) * std::exp(z(eng) / 300.0);}
  const TimeSeries x(v);
  const auto path = (std::filesystem::temp_directory_path() / "tarma_core_rt.csv").string();
  write_series(path, x, "x");
  const auto y = load_series(path);
  EXPECT_EQ(x.vector(), y.vector());
  std::ostringstream a, b;
  write_series(a, x, "x");
  write_series(b, y, "x");
  EXPECT_EQ(a.str(), b.str());
}

TEST(Log10Transform, Examples)
{
  EXPECT_EQ(log10_transform(TimeSeries({1.0, 10.0, 100.0})).vector(), (std::vector<double>{0.0, 1.0, 2.0}));
  EXPECT_EQ(log10_transform(TimeSeries({1.0})).vector(), (std::vector<double>{0.0}));
  EXPECT_THROW(log10_transform(TimeSeries({1.0, 0.0})), DataError);
  EXPECT_THROW(log10_transform(TimeSeries({-1.0})), DataError);
}

TEST(Log10Transform, InverseOracle)
{
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  std::vector<double> v(1000);
  for (auto & e : v) {e = std::pow(10.0, u(eng));}
  const auto y = log10_transform(TimeSeries(v));
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_NEAR(std::pow(10.0, y[i]) / v[i], 1.0, 1e-12);
  }
}

TEST(PercentileGrid, OrderStatisticConvention)
{
  std::vector<double> v;
  for (int i = 1; i <= 10; ++i) {v.push_back(i);}
  const auto g = percentile_grid(TimeSeries(v), 0.25, 0.75, 100);
  EXPECT_EQ(g.candidates, (std::vector<double>{3, 4, 5, 6, 7}));
  EXPECT_DOUBLE_EQ(g.pi0, 0.25);
}

TEST(PercentileGrid, ConstantSeriesIsAnError)
{
  EXPECT_THROW(percentile_grid(TimeSeries({5.0, 5.0, 5.0, 5.0}), 0.25, 0.75), DataError);
  EXPECT_THROW(percentile_grid(TimeSeries({1.0, 2.0}), 0.75, 0.25), std::invalid_argument);
}

TEST(PercentileGrid, ThinningKeepsEndpointsBruteForce)
{
  std::mt19937_64 eng(8);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(137);
    for (auto & e : v) {e = z(eng);}
    const auto g = percentile_grid(TimeSeries(v), 0.2, 0.8, 8);
    auto s = v;
    std::sort(s.begin(), s.end());
    // brute-force order statistics between the quantile indices
    const auto lo = static_cast<std::size_t>(std::ceil(0.2 * 137.0));
    const auto hi = static_cast<std::size_t>(std::floor(0.8 * 137.0));
    ASSERT_LE(g.candidates.size(), 8u);
    EXPECT_EQ(g.candidates.front(), s[lo - 1]);
    EXPECT_EQ(g.candidates.back(), s[hi - 1]);
    for (double c : g.candidates) {
      EXPECT_TRUE(std::binary_search(s.begin() + static_cast<long>(lo - 1), s.begin() + static_cast<long>(hi), c));
    }
    EXPECT_TRUE(std::is_sorted(g.candidates.begin(), g.candidates.end()));
    EXPECT_TRUE(std::adjacent_find(g.candidates.begin(), g.candidates.end()) == g.candidates.end());
  }
}

TEST(PercentileGrid, LocationScaleEquivariantAndInsideRange)
{
  std::mt19937_64 eng(9);
  std::normal_distribution<double> z;
  std::vector<double> v(300);
  for (auto & e : v) {e = z(eng);}
  const auto g = percentile_grid(TimeSeries(v), 0.25, 0.75);
  std::vector<double> w;
  for (double e : v) {w.push_back(2.5 * e + 7.0);}
  const auto h = percentile_grid(TimeSeries(w), 0.25, 0.75);
  ASSERT_EQ(g.candidates.size(), h.candidates.size());
  for (std::size_t i = 0; i < g.candidates.size(); ++i) {
    EXPECT_EQ(h.candidates[i], 2.5 * g.candidates[i] + 7.0);
  }
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  for (double c : g.candidates) {
    EXPECT_GE(c, *mn);
    EXPECT_LT(c, *mx);
  }
}

TEST(ThresholdGrid, FromCandidatesValidates)
{
  EXPECT_THROW(ThresholdGrid::from_candidates({}), DataError);
  EXPECT_THROW(ThresholdGrid::from_candidates({1.0, 1.0}), DataError);
  EXPECT_EQ(ThresholdGrid::from_candidates({0.5}).candidates.size(), 1u);
}

// ------------------------------------------------------------------ rng

TEST(ReplicationSeed, DeterministicAndCollisionFree)
{
  EXPECT_EQ(replication_seed(1, 2, 3), replication_seed(1, 2, 3));
  EXPECT_NE(replication_seed(1, 2, 3), replication_seed(1, 3, 2));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1'100'000);
  for (std::uint64_t m = 0; m < 10; ++m) {
    for (std::uint64_t c = 0; c < 100; ++c) {
      for (std::uint64_t r = 0; r < 1000; ++r) {
        seen.insert(replication_seed(m, fnv1a("cell" + std::to_string(c)), r));
      }
    }
  }
  EXPECT_EQ(seen.size(), 1'000'000u);
}

// ------------------------------------------------------------------ simulate

TEST(Simulate, WhiteNoiseVariance)
{
  const ArmaGarchParams p;  // phi=(0), a=(1)
  const auto x = simulate_arma_garch(p, SimMaConvention::model, 20000, 100, 1);
  EXPECT_NEAR(variance(x.vector()), 1.0, 3.0 * std::sqrt(2.0 / 20000.0));
}

TEST(Simulate, ArchVarianceCaseB)
{
  const ArmaGarchParams p{{0.0}, {}, {1.0, 0.3}, {0.0}};
  const std::size_t n = 1'000'000;
  const auto x = simulate_arma_garch(p, SimMaConvention::model, n, 500, 2).vector();
  // Var(eps^2) for ARCH(1) with Gaussian z, inflated by the eps^2 autocorrelation sum (1+a1)/(1-a1)
  const double a1 = 0.3;
  const double m4 = 3.0 * (1.0 + a1) / ((1.0 - a1) * (1.0 - 3.0 * a1 * a1));
  const double s2 = 1.0 / (1.0 - a1);
  const double se = std::sqrt((m4 - s2 * s2) * (1.0 + a1) / (1.0 - a1) / static_cast<double>(n));
  double m2 = 0.0;
  for (double e : x) {m2 += e * e;}
  m2 /= static_cast<double>(n);
  EXPECT_NEAR(m2, s2, 3.0 * se);
}

TEST(Simulate, SameSeedSamePath)
{
  const ArmaGarchParams p{{0.1, 0.5}, {0.3}, {1.0, 0.1}, {0.8}};
  EXPECT_EQ(simulate_arma_garch(p, SimMaConvention::model, 300, 100, 42),
    simulate_arma_garch(p, SimMaConvention::model, 300, 100, 42));
  EXPECT_NE(simulate_arma_garch(p, SimMaConvention::model, 300, 100, 42),
    simulate_arma_garch(p, SimMaConvention::model, 300, 100, 43));
}

TEST(Simulate, PlusConventionFlipsMa)
{
  const ArmaGarchParams plus{{0.0, 0.5}, {0.4}, {1.0, 0.1}, {0.8}};
  ArmaGarchParams model = plus;
  model.theta = {-0.4};
  EXPECT_EQ(simulate_arma_garch(plus, SimMaConvention::plus, 200, 50, 5),
    simulate_arma_garch(model, SimMaConvention::model, 200, 50, 5));
}

TEST(Simulate, ZeroIncrementAndUnreachableThresholdMatchLinear)
{
  const ArmaGarchParams base{{0.5, 0.5}, {0.5}, {1.0, 0.1}, {0.8}};
  const auto lin = simulate_arma_garch(base, SimMaConvention::plus, 400, 200, 9);
  EXPECT_EQ(simulate_tarma_garch(TarmaGarchParams{base, {0, 0, 0}, 0.0, 1}, SimMaConvention::plus, 400, 200, 9), lin);
  EXPECT_EQ(
    simulate_tarma_garch(TarmaGarchParams{base, {-0.3, -0.3, -0.3}, -1e9, 1}, SimMaConvention::plus, 400, 200, 9),
    lin);
}

TEST(Simulate, LowerRegimeIsNoiseWhenPsiCancels)
{
  const ArmaGarchParams base{{0.5, 0.5}, {0.5}, {1.0, 0.1}, {0.8}};
  const TarmaGarchParams tp{base, {-0.5, -0.5, -0.5}, 0.0, 1};
  const auto x = simulate_tarma_garch(tp, SimMaConvention::plus, 1'000'000, 500, 10).vector();
  double s = 0.0, s2 = 0.0;
  std::size_t k = 0;
  for (std::size_t t = 1; t < x.size(); ++t) {
    if (x[t - 1] <= 0.0) {
      s += x[t];
      s2 += x[t] * x[t];
      ++k;
    }
  }
  ASSERT_GT(k, 1000u);
  const double mean = s / static_cast<double>(k);
  const double sd = std::sqrt(s2 / static_cast<double>(k) - mean * mean);
  // GARCH(1,1) eps is serially uncorrelated; 4 s.e. leaves room for the selection effect on h
  EXPECT_NEAR(mean, 0.0, 4.0 * sd / std::sqrt(static_cast<double>(k)));
}

TEST(Simulate, TarWrapperMatchesGeneral)
{
  const TarmaGarchParams tp{{{0.5, 0.5}, {}, {1.0, 0.1}, {0.8}}, {-0.4, -0.4}, 0.0, 1};
  EXPECT_EQ(simulate_tar_garch(tp, 300, 100, 4), simulate_tarma_garch(tp, SimMaConvention::model, 300, 100, 4));
  TarmaGarchParams with_ma = tp;
  with_ma.base.theta = {0.2};
  with_ma.psi2 = {0, 0, 0};
  EXPECT_THROW(simulate_tar_garch(with_ma, 300, 100, 4), std::invalid_argument);
}

TEST(Simulate, Ar1AutocorrelationCaseA)
{
  const ArmaGarchParams p{{0.0, 0.9}, {}, {1.0, 0.04}, {0.95}};
  const auto x = simulate_arma_garch(p, SimMaConvention::plus, 100000, 1000, 12);
  EXPECT_NEAR(acf(x.values(), 1).values[1], 0.9, 0.05);
}

TEST(Simulate, ExplosiveParametersDiverge)
{
  const ArmaGarchParams p{{0.0, 1.5}, {}, {1.0}, {}};
  EXPECT_THROW(simulate_arma_garch(p, SimMaConvention::model, 5000, 0, 1), DivergenceError);
  const ArmaGarchParams bad{{0.0}, {}, {1.0, 0.6}, {0.5}};
  EXPECT_THROW(simulate_arma_garch(bad, SimMaConvention::model, 10, 0, 1), std::invalid_argument);
}

TEST(MeasurementNoise, InfiniteSnrIsIdentity)
{
  const auto x = simulate_arma_garch(ArmaGarchParams{}, SimMaConvention::model, 100, 10, 1);
  EXPECT_EQ(add_measurement_noise(x, INFINITY, 1.0, 5), x);
}

TEST(MeasurementNoise, NoiseVarianceMatchesSnr)
{
  const std::size_t n = 200000;
  const auto x = simulate_arma_garch(ArmaGarchParams{}, SimMaConvention::model, n, 10, 1);
  const auto y = add_measurement_noise(x, 5.0, 2.0, 7);
  std::vector<double> diff(n);
  for (std::size_t t = 0; t < n; ++t) {diff[t] = y[t] - x[t];}
  const double target = 2.0 / 5.0;
  EXPECT_NEAR(variance(diff), target, 3.0 * target * std::sqrt(2.0 / static_cast<double>(n)));
  EXPECT_THROW(add_measurement_noise(x, 0.0, 1.0, 1), std::invalid_argument);
}

// ------------------------------------------------------------------ filter

struct Reference
{
  std::vector<double> eps, h;
  double loglik;
};

// Scalar recursion written out directly from the model equations.
Reference reference_filter(const std::vector<double> & x, const ArmaGarchParams & p, double h0,
  const std::vector<double> & psi2 = {}, double r = 0.0, int d = 1)
{
  const std::size_t n = x.size();
  auto X = [&](long t) {return t >= 0 ? x[static_cast<std::size_t>(t)] : 0.0;};
  Reference out{std::vector<double>(n), std::vector<double>(n), 0.0};
  auto E = [&](long t) {return t >= 0 ? out.eps[static_cast<std::size_t>(t)] : 0.0;};
  auto H = [&](long t) {return t >= 0 ? out.h[static_cast<std::size_t>(t)] : h0;};
  const int pp = p.p(), qq = p.q();
  for (long t = 0; t < static_cast<long>(n); ++t) {
    double e = X(t) - p.phi[0];
    for (int i = 1; i <= pp; ++i) {e -= p.phi[i] * X(t - i);}
    for (int j = 1; j <= qq; ++j) {e += p.theta[j - 1] * E(t - j);}
    const double z = t - d >= 0 ? X(t - d) : x[0];
    if (!psi2.empty() && z <= r) {
      e -= psi2[0];
      for (int i = 1; i <= pp; ++i) {e -= psi2[i] * X(t - i);}
      for (int j = 1; j <= qq; ++j) {e += psi2[pp + j] * E(t - j);}
    }
    out.eps[static_cast<std::size_t>(t)] = e;
    double ht = p.a[0];
    for (int i = 1; i <= p.u(); ++i) {ht += p.a[i] * E(t - i) * E(t - i);}
    for (int j = 1; j <= p.v(); ++j) {ht += p.b[j - 1] * H(t - j);}
    out.h[static_cast<std::size_t>(t)] = ht;
    out.loglik += -0.5 * (e * e / ht + std::log(ht));
  }
  return out;
}

TEST(FilterNull, ZeroCase)
{
  const ArmaGarchParams p{{0.0}, {0.0}, {1.0, 0.0}, {}};
  const auto f = filter_null(p, TimeSeries(std::vector<double>(20, 0.0)));
  for (std::size_t t = 0; t < 20; ++t) {
    EXPECT_EQ(f.eps[t], 0.0);
    EXPECT_EQ(f.h[t], 1.0);
  }
  EXPECT_EQ(f.loglik, 0.0);
}

TEST(FilterNull, HandRecursionAr1)
{
  const ArmaGarchParams p{{0.0, 0.5}, {}, {1.0}, {}};
  const auto f = filter_null(p, TimeSeries({0.0, 1.0, 1.0}));
  EXPECT_EQ(f.eps, (std::vector<double>{0.0, 1.0, 0.5}));
  EXPECT_EQ(f.h, (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(FilterNull, MatchesScalarReference)
{
  std::mt19937_64 eng(21);
  std::uniform_real_distribution<double> U(-0.6, 0.6);
  for (int rep = 0; rep < 20; ++rep) {
    ArmaGarchParams p{{U(eng), U(eng), U(eng) / 2.0}, {U(eng)}, {0.5 + std::abs(U(eng)), 0.1, 0.05}, {0.6}};
    const auto x = simulate_arma_garch(ArmaGarchParams{{0.0, 0.5}, {}, {1.0, 0.2}, {0.5}},
      SimMaConvention::model, 300, 100, static_cast<std::uint64_t>(rep));
    const double h0 = 1.7;
    const auto f = filter_null(p, x, FilterOptions{h0});
    const auto ref = reference_filter(x.vector(), p, h0);
    for (std::size_t t = 0; t < x.size(); ++t) {
      EXPECT_NEAR(f.eps[t], ref.eps[t], 1e-12 * (1.0 + std::abs(ref.eps[t])));
      EXPECT_NEAR(f.h[t], ref.h[t], 1e-12 * ref.h[t]);
      EXPECT_GE(f.h[t], p.a[0]);
    }
    EXPECT_NEAR(f.loglik, ref.loglik, 1e-10 * std::abs(ref.loglik));
    double ll = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {ll += -0.5 * (f.eps[t] * f.eps[t] / f.h[t] + std::log(f.h[t]));}
    EXPECT_NEAR(f.loglik, ll, 1e-10 * std::abs(ll));
  }
}

TEST(FilterThreshold, ZeroIncrementAndLowThresholdAreIdentities)
{
  const ArmaGarchParams p{{0.2, 0.5}, {0.3}, {1.0, 0.1}, {0.8}};
  const auto x = simulate_arma_garch(p, SimMaConvention::model, 300, 100, 3);
  const auto base = filter_null(p, x);
  const auto [mn, mx] = std::minmax_element(x.values().begin(), x.values().end());
  for (double r : {*mn, 0.0, *mx}) {
    EXPECT_EQ(filter_threshold(TarmaGarchParams{p, {0, 0, 0}, r, 1}, x), base);
  }
  EXPECT_EQ(filter_threshold(TarmaGarchParams{p, {0.4, -0.2, 0.3}, *mn - 1.0, 1}, x), base);
}

TEST(FilterThreshold, TopThresholdDoublesCoefficients)
{
  const ArmaGarchParams p{{0.1, 0.3}, {0.2}, {1.0, 0.1}, {0.8}};
  const auto x = simulate_arma_garch(p, SimMaConvention::model, 300, 100, 4);
  const double mx = *std::max_element(x.values().begin(), x.values().end());
  const auto f = filter_threshold(TarmaGarchParams{p, {0.1, 0.3, 0.2}, mx, 1}, x);
  ArmaGarchParams doubled{{0.2, 0.6}, {0.4}, p.a, p.b};
  const auto ref = reference_filter(x.vector(), doubled, default_h_presample(p));
  for (std::size_t t = 0; t < x.size(); ++t) {
    EXPECT_NEAR(f.eps[t], ref.eps[t], 1e-12 * (1.0 + std::abs(ref.eps[t])));
  }
}

TEST(FilterThreshold, MatchesScalarReferenceWithDelay)
{
  const ArmaGarchParams p{{0.1, 0.3, -0.2}, {0.2}, {1.0, 0.1}, {0.8}};
  const auto x = simulate_arma_garch(p, SimMaConvention::model, 300, 100, 5);
  const std::vector<double> psi2{0.3, -0.2, 0.1, 0.4};
  const auto f = filter_threshold(TarmaGarchParams{p, psi2, 0.1, 2}, x, FilterOptions{2.0});
  const auto ref = reference_filter(x.vector(), p, 2.0, psi2, 0.1, 2);
  for (std::size_t t = 0; t < x.size(); ++t) {
    EXPECT_NEAR(f.eps[t], ref.eps[t], 1e-12 * (1.0 + std::abs(ref.eps[t])));
    EXPECT_NEAR(f.h[t], ref.h[t], 1e-12 * ref.h[t]);
  }
}

TEST(FilterNull, ScaleEquivariance)
{
  const ArmaGarchParams p{{0.25, 0.5}, {0.375}, {1.0, 0.125}, {0.75}};
  const auto x = simulate_arma_garch(p, SimMaConvention::model, 200, 100, 6);
  const double c = 4.0;  // a power of two keeps the scaling exact
  std::vector<double> cx;
  for (double v : x.values()) {cx.push_back(c * v);}
  ArmaGarchParams ps = p;
  ps.phi[0] *= c;
  ps.a[0] *= c * c;
  const auto f = filter_null(p, x);
  const auto g = filter_null(ps, TimeSeries(cx));
  for (std::size_t t = 0; t < x.size(); ++t) {
    EXPECT_EQ(g.eps[t], c * f.eps[t]);
    EXPECT_EQ(g.h[t], c * c * f.h[t]);
  }
}

TEST(FilterNull, NonPositiveVarianceThrows)
{
  const ArmaGarchParams p{{0.0}, {}, {-1.0}, {}};
  EXPECT_THROW(filter_null(p, TimeSeries({1.0, 2.0})), NumericError);
}

// ------------------------------------------------------------------ diagnostics

TEST(Acf, LagZeroAndRange)
{
  std::mt19937_64 eng(1);
  std::normal_distribution<double> z;
  std::vector<double> v(500);
  for (auto & e : v) {e = z(eng);}
  const auto a = acf(v, 20);
  EXPECT_EQ(a.values[0], 1.0);
  for (double r : a.values) {
    EXPECT_GE(r, -1.0);
    EXPECT_LE(r, 1.0);
  }
  EXPECT_NEAR(a.band, 1.96 / std::sqrt(500.0), 1e-15);
  EXPECT_THROW(acf(std::vector<double>(10, 1.0), 2), DataError);
  EXPECT_THROW(acf(v, 250), std::invalid_argument);
}

TEST(Acf, Ar1AnalyticOracle)
{
  const auto x = simulate_arma_garch(ArmaGarchParams{{0.0, 0.9}, {}, {1.0}, {}}, SimMaConvention::model,
    100000, 1000, 2);
  const auto a = acf(x.values(), 3);
  EXPECT_NEAR(a.values[1], 0.9, 0.01);
  EXPECT_NEAR(a.values[2], 0.81, 0.02);
  const auto p = pacf(x.values(), 5);
  EXPECT_NEAR(p.values[0], 0.9, 0.01);
  for (std::size_t k = 1; k < p.values.size(); ++k) {EXPECT_LT(std::abs(p.values[k]), p.band);}
}

TEST(LjungBox, HandComputedFormula)
{
  const std::vector<double> x{0.3, -1.2, 0.8, 2.1, -0.4, 0.0, 1.5, -0.9, 0.6, -0.2};
  const double n = 10.0;
  double m = 0.0;
  for (double v : x) {m += v / n;}
  double c0 = 0.0;
  for (double v : x) {c0 += (v - m) * (v - m);}
  double q = 0.0;
  for (int k = 1; k <= 3; ++k) {
    double ck = 0.0;
    for (int t = k; t < 10; ++t) {ck += (x[t] - m) * (x[t - k] - m);}
    const double rk = ck / c0;
    q += rk * rk / (n - k);
  }
  q *= n * (n + 2.0);
  const auto rep = ljung_box(x, 3);
  EXPECT_NEAR(rep.statistic, q, 1e-10);
  EXPECT_EQ(rep.dof, 3.0);
  EXPECT_THROW(ljung_box(x, 2, 2), std::invalid_argument);
}

TEST(LjungBox, ZeroAutocorrelationAndMonotone)
{
  const auto rep = ljung_box(std::vector<double>{1.0, 0.0, -1.0, 0.0}, 1);
  EXPECT_EQ(rep.statistic, 0.0);
  EXPECT_EQ(rep.p_value, 1.0);
  std::mt19937_64 eng(2);
  std::normal_distribution<double> z;
  std::vector<double> v(300);
  for (auto & e : v) {e = z(eng);}
  double prev = 0.0;
  for (std::size_t k = 1; k < 30; ++k) {
    const double q = ljung_box(v, k).statistic;
    EXPECT_GE(q, prev);
    prev = q;
  }
}

TEST(KolmogorovSmirnov, IdenticalSymmetricInvariant)
{
  std::mt19937_64 eng(3);
  std::normal_distribution<double> z;
  std::vector<double> a(400), b(300);
  for (auto & e : a) {e = z(eng);}
  for (auto & e : b) {e = 0.3 + z(eng);}
  const auto same = ks_two_sample(a, a);
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p_value, 1.0);
  const auto ab = ks_two_sample(a, b);
  const auto ba = ks_two_sample(b, a);
  EXPECT_EQ(ab.statistic, ba.statistic);
  EXPECT_EQ(ab.p_value, ba.p_value);
  std::vector<double> ea, eb;
  for (double v : a) {ea.push_back(std::exp(v));}
  for (double v : b) {eb.push_back(std::exp(v));}
  EXPECT_EQ(ks_two_sample(ea, eb).statistic, ab.statistic);
  EXPECT_THROW(ks_two_sample(std::vector<double>{}, a), std::invalid_argument);
}

TEST(KolmogorovSmirnov, NullCalibration)
{
  std::mt19937_64 eng(4);
  std::normal_distribution<double> z;
  int rejections = 0;
  std::vector<double> a(1000), b(1000);
  for (int rep = 0; rep < 1000; ++rep) {
    for (auto & e : a) {e = z(eng);}
    for (auto & e : b) {e = z(eng);}
    rejections += ks_two_sample(a, b).p_value < 0.05 ? 1 : 0;
  }
  EXPECT_NEAR(rejections / 10.0, 5.0, 2.0);
}

TEST(KolmogorovSmirnov, TailFunctionKnownValues)
{
  // Kolmogorov distribution: P(K > 1.358) = 0.05, P(K > 1.628) = 0.01, both branches agree at 1
  EXPECT_NEAR(kolmogorov_tail(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(kolmogorov_tail(1.6276), 0.01, 1e-4);
  EXPECT_NEAR(kolmogorov_tail(0.5), 0.9639452436648751, 1e-10);
  EXPECT_EQ(kolmogorov_tail(0.0), 1.0);
}

// ------------------------------------------------------------------ svg

TEST(Svg, ChartsAreStandalone)
{
  const auto line = svg::line_chart("t <x>", {{"a", {0, 1, 2}, {1, 3, 2}}}, "x", "y");
  EXPECT_EQ(line.rfind("<svg", 0), 0u);
  EXPECT_NE(line.find("</svg>"), std::string::npos);
  EXPECT_NE(line.find("t &lt;x&gt;"), std::string::npos);
  const auto box = svg::box_chart("b", {{"g", {1, 2, 3, 4}}, {"h", {}}}, "y");
  EXPECT_NE(box.find("<rect"), std::string::npos);
}

}  // namespace
