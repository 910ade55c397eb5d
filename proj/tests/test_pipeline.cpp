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


#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli_app.hpp"
#include "tarma/analysis.hpp"
#include "tarma/mc.hpp"

namespace
{

using namespace tarma;
namespace fs = std::filesystem;

// ------------------------------------------------------------------ MC configuration

mc::McConfig small_size(std::size_t reps, std::size_t n = 100)
{
  mc::McConfig c;
  c.experiment = mc::Experiment::size;
  c.cases = {mc::default_cases(c.experiment)[1]};
  c.sample_sizes = {n};
  c.replications = reps;
  c.max_points = 40;
  c.master_seed = 11;
  c.workers = 1;
  return c;
}

TEST(McConfig, JsonRoundTrip)
{
  auto c = small_size(7);
  c.snr = {mc::kInf, 5.0};
  c.methods = {LmMethod::slm};
  EXPECT_EQ(mc::config_from_json(json::parse(mc::to_json(c).dump())), c);
}

TEST(McConfig, RejectsUnknownAndInvalid)
{
  EXPECT_THROW(mc::config_from_json(json::parse(R"({"experiment":"size","replicatons":5})")), mc::ConfigError);
  EXPECT_THROW(mc::config_from_json(json::parse(R"({"experiment":"size","grid":{"lower_q":0.2,"upper":0.8}})")),
    mc::ConfigError);
  EXPECT_THROW(mc::config_from_json(json::parse(R"({"experiment":"size","replications":0})")), mc::ConfigError);
  EXPECT_THROW(mc::config_from_json(json::parse(R"({"experiment":"size","alpha":1.5})")), mc::ConfigError);
  EXPECT_THROW(mc::config_from_json(json::parse(R"({"experiment":"power"})"), mc::Experiment::size),
    mc::ConfigError);
  EXPECT_THROW(mc::config_from_json(json::parse(R"({"experiment":"power","psi":[-2.0]})")), mc::ConfigError);
  const auto c = mc::config_from_json(json::parse(R"({"experiment":"measurement_error","snr":["inf",10]})"));
  EXPECT_TRUE(std::isinf(c.snr[0]));
  EXPECT_EQ(c.snr[1], 10.0);
}

TEST(McConfig, DefaultCases)
{
  const auto s = mc::default_cases(mc::Experiment::size);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[1], (mc::GarchCase{"B", 1.0, 0.3, 0.0}));
  const auto p = mc::default_cases(mc::Experiment::power);
  EXPECT_EQ(p[0], (mc::GarchCase{"A", 1.0, 0.1, 0.8}));
}

// ------------------------------------------------------------------ MC runs

TEST(McRun, SingleReplicationGivesZeroOrHundred)
{
  const auto res = mc::run_size(small_size(1));
  ASSERT_EQ(res.results.size(), 2u);
  for (const auto & r : res.results) {
    EXPECT_TRUE(r.rejection_pct == 0.0 || r.rejection_pct == 100.0);
    EXPECT_EQ(r.replications, 1u);
  }
}

TEST(McRun, LogAgreesWithTableAndWorkers)
{
  auto c = small_size(12);
  c.log_replications = true;
  const auto one = mc::run_experiment(c, 1);
  const auto three = mc::run_experiment(c, 3);
  EXPECT_TRUE(one.same_outcome(three));
  ASSERT_EQ(one.log.size(), 24u);
  for (const auto & r : one.results) {
    std::size_t ok = 0, rej = 0;
    for (const auto & rec : one.log) {
      if (rec.method != r.method || rec.failed) {continue;}
      ++ok;
      const bool reject = rec.statistic > r.critical_value;
      EXPECT_EQ(reject, rec.reject);
      rej += reject ? 1 : 0;
    }
    EXPECT_EQ(ok, r.successes);
    EXPECT_EQ(rej, r.rejections);
    EXPECT_EQ(r.successes + r.failures, r.replications);
    EXPECT_NEAR(r.rejection_pct, 100.0 * static_cast<double>(rej) / static_cast<double>(ok), 1e-12);
  }
}

TEST(McRun, PowerSizeCorrectionAnchorsAtAlpha)
{
  mc::McConfig c;
  c.experiment = mc::Experiment::power;
  c.cases = {mc::default_cases(c.experiment)[0]};
  c.psi = {-0.9};
  c.sample_sizes = {100};
  c.replications = 40;
  c.max_points = 30;
  c.methods = {LmMethod::slmg};
  c.master_seed = 3;
  const auto res = mc::run_power(c, 1);
  const auto * zero = res.find("A", 100, LmMethod::slmg);
  const auto * alt = res.find("A", 100, LmMethod::slmg, 0.0, 0.0, -0.9);
  ASSERT_NE(zero, nullptr);
  ASSERT_NE(alt, nullptr);
  ASSERT_TRUE(zero->size_corrected_pct.has_value());
  if (zero->failures == 0) {EXPECT_LE(*zero->size_corrected_pct, 5.0);}
  EXPECT_GE(*alt->size_corrected_pct, *zero->size_corrected_pct);
  EXPECT_GE(alt->rejection_pct, zero->rejection_pct);
}

TEST(McRun, InfiniteSnrMatchesSizeCell)
{
  auto size = small_size(6);
  size.cases = {mc::default_cases(mc::Experiment::measurement_error)[0]};
  size.phi = {0.3};
  size.methods = {LmMethod::slmg};
  auto me = size;
  me.experiment = mc::Experiment::measurement_error;
  me.snr = {mc::kInf};
  size.log_replications = me.log_replications = true;
  const auto a = mc::run_experiment(size, 1);
  const auto b = mc::run_experiment(me, 1);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].statistic, b.log[i].statistic);
  }
  EXPECT_EQ(a.cells[0].id, b.cells[0].id);
}

TEST(McRun, CsvAndJsonShapes)
{
  const auto res = mc::run_size(small_size(2));
  std::ostringstream os;
  mc::write_csv(os, res);
  std::istringstream is(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(is, line)) {++lines;}
  EXPECT_EQ(lines, res.results.size() + 1);
  const auto j = mc::to_json(res);
  EXPECT_EQ(j.at("results").size(), res.results.size());
  EXPECT_NE(mc::svg_chart(res).find("<svg"), std::string::npos);
}

TEST(McReference, CaseASmallSampleSize)
{
  // published sizes from 10000 replications; tolerance is 3 standard errors of the difference
  mc::McConfig c;
  c.experiment = mc::Experiment::size;
  c.cases = {mc::default_cases(c.experiment)[0]};
  c.sample_sizes = {100};
  c.replications = 2000;
  c.master_seed = 20240601;
  const auto res = mc::run_size(c);
  for (const auto & [method, published] : {std::pair{LmMethod::slmg, 8.9}, std::pair{LmMethod::slm, 12.0}}) {
    const auto * r = res.find("A", 100, method);
    ASSERT_NE(r, nullptr);
    const double p = published / 100.0;
    const double se = 100.0 * std::sqrt(p * (1.0 - p) * (1.0 / static_cast<double>(r->successes) + 1.0 / 10000.0));
    EXPECT_NEAR(r->rejection_pct, published, 3.0 * se) << to_string(method);
  }
}

// ------------------------------------------------------------------ analysis pipeline

TimeSeries arma_garch_series(std::uint64_t seed, std::size_t n = 400)
{
  return simulate_arma_garch(ArmaGarchParams{{0.1, 0.5}, {-0.3}, {0.5, 0.15}, {0.6}}, SimMaConvention::model,
    n, 300, seed);
}

AnalysisOptions fast_options()
{
  AnalysisOptions o;
  o.orders = std::make_pair(1, 1);
  o.max_points = 40;
  o.ks_sim_length = 5000;
  o.ljung_box_lags = 8;
  o.correlogram_lags = 12;
  o.cv.alphas = {0.05, 0.01};
  return o;
}

TEST(Analysis, DeterministicAndJsonRoundTrip)
{
  const auto x = arma_garch_series(21);
  const auto a = analyze(x, fast_options());
  const auto b = analyze(x, fast_options());
  EXPECT_EQ(a, b);
  const auto back = json::parse(json(a).dump()).get<AnalysisReport>();
  EXPECT_EQ(back, a);
  EXPECT_EQ(a.test.dim, 3);
  EXPECT_EQ(a.diagnostics.acf_residuals.values.size(), 13u);
  EXPECT_FALSE(summary_text(a).empty());
}

TEST(Analysis, SelectsOrdersWhenUnset)
{
  auto o = fast_options();
  o.orders.reset();
  o.p_max = 2;
  o.q_max = 2;
  const auto rep = analyze(arma_garch_series(22), o);
  EXPECT_TRUE(rep.orders_selected);
  EXPECT_EQ(rep.order_table.size(), 9u);
}

TEST(Analysis, ShortSeriesFailsWithStage)
{
  const auto x = arma_garch_series(23, 25);
  try {
    analyze(x, fast_options());
    FAIL() << "expected AnalysisError";
  } catch (const AnalysisError & e) {
    EXPECT_FALSE(e.stage().empty());
    EXPECT_TRUE(e.data_error());
  }
}

TEST(Analysis, OptionsFromJson)
{
  const auto o = analysis_options_from_json(json::parse(
    R"({"log10":true,"orders":[2,1],"grid":{"lower_q":0.2,"upper_q":0.8},"method":"sLM",
        "tarma_spec":{"lower":{"ar":[1,12],"ma":[3]},"upper":{"ar":[1],"ma":[1]},"d":1}})"));
  EXPECT_TRUE(o.log10);
  EXPECT_EQ(o.orders, std::make_pair(2, 1));
  EXPECT_EQ(o.lower_q, 0.2);
  EXPECT_EQ(o.method, LmMethod::slm);
  ASSERT_TRUE(o.tarma_spec.has_value());
  EXPECT_EQ(o.tarma_spec->lower.ar, (std::vector<int>{1, 12}));
  EXPECT_THROW(analysis_options_from_json(json::parse(R"({"lags":3})")), std::invalid_argument);
  EXPECT_THROW(analysis_options_from_json(json::parse(R"({"grid":{"lo":0.1}})")), std::invalid_argument);
}

// ------------------------------------------------------------------ command line

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
      ("tarma_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {fs::remove_all(dir_);}

  int run(std::vector<std::string> args)
  {
    args.insert(args.begin(), {"tarmagarch", "--threads", "1", "--out-dir", dir_.string()});
    std::vector<const char *> argv;
    for (const auto & a : args) {argv.push_back(a.c_str());}
    out_.str("");
    err_.str("");
    return cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::string path(const std::string & name) const {return (dir_ / name).string();}

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, SimulateFitTest)
{
  ASSERT_EQ(run({"--seed", "5", "simulate", "--phi", "0.1,0.5", "--theta", "-0.3", "--a", "0.5,0.15", "--b", "0.6",
      "--n", "300", "--output", path("x.csv")}), cli::kOk);
  const auto x = load_series(path("x.csv"));
  EXPECT_EQ(x.size(), 300u);
  EXPECT_EQ(x, simulate_arma_garch(ArmaGarchParams{{0.1, 0.5}, {-0.3}, {0.5, 0.15}, {0.6}}, SimMaConvention::model,
    300, kDefaultBurnIn, 5));

  EXPECT_EQ(run({"fit", path("x.csv"), "--p", "1", "--q", "1"}), cli::kOk);
  EXPECT_TRUE(fs::exists(path("fit.json")));
  EXPECT_TRUE(fs::exists(path("fit_residuals.csv")));

  const int code = run({"test", path("x.csv"), "--p", "1", "--q", "1"});
  EXPECT_TRUE(code == cli::kOk || code == cli::kReject5 || code == cli::kReject1);
  const auto report = json::parse(std::ifstream(path("test.json"))).get<SupLmResult>();
  EXPECT_EQ(code != cli::kOk, report.rejects(0.05));
}

TEST_F(Cli, ExitCodes)
{
  EXPECT_EQ(run({"no-such-command"}), cli::kUsage);
  EXPECT_EQ(run({"simulate", "--family", "garch"}), cli::kUsage);
  { std::ofstream(path("empty.csv")); }
  EXPECT_EQ(run({"analyze", path("empty.csv")}), cli::kData);
  EXPECT_FALSE(fs::exists(path("analysis_partial.json")));
  EXPECT_EQ(run({"fit", path("missing.csv")}), cli::kData);
  {
    std::ofstream(path("bad.json")) << R"({"experiment":"size","replications":2,"bogus":1})";
  }
  EXPECT_EQ(run({"mc-size", path("bad.json")}), cli::kUsage);
  {
    std::ofstream(path("power.json")) << R"({"experiment":"power"})";
  }
  EXPECT_EQ(run({"mc-size", path("power.json")}), cli::kUsage);
}

TEST_F(Cli, McSizeWritesOutputs)
{
  {
    std::ofstream(path("cfg.json")) <<
      R"({"experiment":"size","cases":["B"],"sample_sizes":[100],"replications":3,"grid":{"max_points":20},"methods":["sLM"]})";
  }
  ASSERT_EQ(run({"mc-size", path("cfg.json"), "--log", "--svg"}), cli::kOk);
  for (const char * f : {"mc_size.csv", "mc_size.json", "mc_size_replications.csv", "mc_size.svg"}) {
    EXPECT_TRUE(fs::exists(path(f))) << f;
  }
}

}  // namespace
