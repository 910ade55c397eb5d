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

#ifndef TOOLS__CLI_APP_HPP_
#define TOOLS__CLI_APP_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tarma/tarma.hpp"

namespace tarma::cli
{

enum ExitCode : int
{
  kOk = 0,
  kReject5 = 1,
  kReject1 = 2,
  kUsage = 64,
  kData = 65,
  kInternal = 70,
};

struct Globals
{
  std::uint64_t seed = 1;
  bool seed_set = false;
  int threads = 0;
  std::string out_dir;
  std::string format = "json";
};

namespace detail
{

inline int default_threads()
{
  if (const char * env = std::getenv("TARMA_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) {return v;}
    } catch (const std::exception &) {
    }
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

inline ColumnSelector column_selector(const std::string & c)
{
  if (!c.empty() && std::all_of(c.begin(), c.end(), [](unsigned char ch) {return std::isdigit(ch);})) {
    return static_cast<std::size_t>(std::stoul(c));
  }
  return c;
}

inline std::filesystem::path out_path(const Globals & g, const std::string & name)
{
  std::filesystem::create_directories(g.out_dir);
  return std::filesystem::path(g.out_dir) / name;
}

inline void write_file(const std::filesystem::path & p, const std::string & content)
{
  std::ofstream f(p);
  if (!f) {throw DataError("cannot write " + p.string());}
  f << content;
}

inline int decision_code(const SupLmResult & r)
{
  auto rejects = [&](double a) {
      auto it = r.critical_values.find(a);
      return it != r.critical_values.end() && r.statistic > it->second;
    };
  if (rejects(0.01)) {return kReject1;}
  if (rejects(0.05)) {return kReject5;}
  return kOk;
}

/// Thresholds closer than `tol` in the stored alpha keys are matched.
inline std::vector<double> ensure_decision_alphas(std::vector<double> alphas)
{
  for (double a : {0.05, 0.01}) {
    if (std::none_of(alphas.begin(), alphas.end(), [&](double x) {return std::abs(x - a) < 1e-12;})) {
      alphas.push_back(a);
    }
  }
  return alphas;
}

struct SeriesInput
{
  std::string path;
  std::string column = "0";
  bool log10 = false;

  void add(CLI::App * cmd)
  {
    cmd->add_option("input", path, "Series CSV file")->required();
    cmd->add_option("--column", column, "Column index or header name");
    cmd->add_flag("--log10", log10, "Apply a base-10 log transform");
  }

  TimeSeries load() const
  {
    auto x = load_series(path, column_selector(column));
    return log10 ? log10_transform(x) : x;
  }
};

struct GridInput
{
  double lower_q = 0.25;
  double upper_q = 0.75;
  std::size_t max_points = 200;

  void add(CLI::App * cmd)
  {
    cmd->add_option("--lower-q", lower_q, "Lower grid quantile")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--upper-q", upper_q, "Upper grid quantile")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--max-points", max_points, "Maximum number of grid points");
  }

  ThresholdGrid grid(const TimeSeries & x) const {return percentile_grid(x, lower_q, upper_q, max_points);}
};

inline std::map<std::string, LmMethod> method_map()
{
  return {{"slmg", LmMethod::slmg}, {"sLMg", LmMethod::slmg}, {"slm", LmMethod::slm}, {"sLM", LmMethod::slm}};
}

inline std::map<std::string, CvSource> cv_map()
{
  return {{"table", CvSource::table}, {"sim", CvSource::simulated}, {"simulated", CvSource::simulated}};
}

inline std::string residual_csv(const FilterOutput & f)
{
  std::ostringstream os;
  os << "t,eps,h\n";
  for (std::size_t t = 0; t < f.eps.size(); ++t) {
    os << t + 1 << ',' << tarma::detail::format_double(f.eps[t]) << ','
       << tarma::detail::format_double(f.h[t]) << '\n';
  }
  return os.str();
}

inline std::string correlogram_csv(const AnalysisDiagnostics & d)
{
  std::ostringstream os;
  os << "lag,acf_residuals,pacf_residuals,acf_squared,band\n";
  const auto & a = d.acf_residuals.values;
  for (std::size_t k = 1; k < a.size(); ++k) {
    os << k << ',' << tarma::detail::format_double(a[k]) << ','
       << (k - 1 < d.pacf_residuals.values.size() ? tarma::detail::format_double(d.pacf_residuals.values[k - 1]) : "")
       << ',' << (k < d.acf_squared.values.size() ? tarma::detail::format_double(d.acf_squared.values[k]) : "")
       << ',' << tarma::detail::format_double(d.acf_residuals.band) << '\n';
  }
  return os.str();
}

}  // namespace detail

/// Entry point shared by the binary and the tests. Output goes to `out`, messages to `err`.
inline int run(int argc, const char * const * argv, std::ostream & out = std::cout, std::ostream & err = std::cerr)
{
  CLI::App app{"Sup-LM tests for threshold ARMA effects under GARCH innovations"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->each([&](const std::string &) {g.seed_set = true;});
  app.add_option("--threads", g.threads, "Worker threads (default: TARMA_THREADS or all cores)")
  ->check(CLI::Range(1, 4096));
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_option("--format", g.format, "Standard output format")->check(CLI::IsMember({"json", "csv"}));

  // simulate
  auto * sim = app.add_subcommand("simulate", "Simulate an ARMA-GARCH, TARMA-GARCH or TAR-GARCH series");
  std::string family = "arma-garch";
  std::vector<double> phi{0.0}, theta, a{1.0}, b, psi2;
  double r = 0.0;
  int d = 1;
  std::string convention = "model";
  std::size_t n = 500, burn_in = kDefaultBurnIn;
  std::string snr_text = "inf";
  std::optional<double> sigma2_x;
  std::string output;
  sim->add_option("--family", family, "arma-garch | tarma-garch | tar-garch")
  ->check(CLI::IsMember({"arma-garch", "tarma-garch", "tar-garch"}));
  sim->add_option("--phi", phi, "Intercept then AR coefficients")->delimiter(',');
  sim->add_option("--theta", theta, "MA coefficients")->delimiter(',');
  sim->add_option("--a", a, "a0 then ARCH coefficients")->delimiter(',');
  sim->add_option("--b", b, "GARCH coefficients")->delimiter(',');
  sim->add_option("--psi2", psi2, "Threshold increments: intercept, AR, MA")->delimiter(',');
  sim->add_option("--r", r, "Threshold");
  sim->add_option("--d", d, "Delay")->check(CLI::PositiveNumber);
  sim->add_option("--ma-convention", convention, "Sign of the MA coefficients: model | plus")
  ->check(CLI::IsMember({"model", "plus"}));
  sim->add_option("--n", n, "Length")->check(CLI::PositiveNumber);
  sim->add_option("--burn-in", burn_in, "Burn-in steps");
  sim->add_option("--snr", snr_text, "Signal-to-noise ratio of added measurement error, or inf");
  sim->add_option("--sigma2-x", sigma2_x, "Signal variance for the noise (default: simulated)");
  sim->add_option("--output", output, "Output CSV (default: standard output)");

  // fit
  auto * fit = app.add_subcommand("fit", "Fit an ARMA-GARCH model by QML or a two-stage TARMA-GARCH model");
  detail::SeriesInput fit_in;
  fit_in.add(fit);
  detail::GridInput fit_grid;
  fit_grid.add(fit);
  std::string model = "arma-garch";
  int p = 1, q = 1, u = 1, v = 1;
  std::vector<int> lower_ar, lower_ma, upper_ar, upper_ma;
  bool no_se = false;
  fit->add_option("--model", model, "arma-garch | tarma")->check(CLI::IsMember({"arma-garch", "tarma"}));
  fit->add_option("--p", p, "AR order")->check(CLI::NonNegativeNumber);
  fit->add_option("--q", q, "MA order")->check(CLI::NonNegativeNumber);
  fit->add_option("--u", u, "ARCH order")->check(CLI::NonNegativeNumber);
  fit->add_option("--v", v, "GARCH order")->check(CLI::NonNegativeNumber);
  fit->add_option("--d", d, "Delay")->check(CLI::PositiveNumber);
  fit->add_option("--lower-ar", lower_ar, "Lower-regime AR lags")->delimiter(',');
  fit->add_option("--lower-ma", lower_ma, "Lower-regime MA lags")->delimiter(',');
  fit->add_option("--upper-ar", upper_ar, "Upper-regime AR lags")->delimiter(',');
  fit->add_option("--upper-ma", upper_ma, "Upper-regime MA lags")->delimiter(',');
  fit->add_flag("--no-std-errors", no_se, "Skip standard errors");

  // test
  auto * test = app.add_subcommand("test", "Sup-LM test of ARMA-GARCH against TARMA-GARCH");
  detail::SeriesInput test_in;
  test_in.add(test);
  detail::GridInput test_grid;
  test_grid.add(test);
  LmMethod method = LmMethod::slmg;
  CvSource cv = CvSource::table;
  int n_sim = 2000;
  bool want_p = false;
  test->add_option("--p", p, "AR order")->check(CLI::NonNegativeNumber);
  test->add_option("--q", q, "MA order")->check(CLI::NonNegativeNumber);
  test->add_option("--u", u, "ARCH order")->check(CLI::NonNegativeNumber);
  test->add_option("--v", v, "GARCH order")->check(CLI::NonNegativeNumber);
  test->add_option("--d", d, "Delay")->check(CLI::PositiveNumber);
  test->add_option("--method", method, "slmg | slm")->transform(CLI::CheckedTransformer(detail::method_map()));
  test->add_option("--cv", cv, "table | sim")->transform(CLI::CheckedTransformer(detail::cv_map()));
  test->add_option("--n-sim", n_sim, "Draws for simulated critical values")->check(CLI::Range(100, 100000000));
  test->add_flag("--p-value", want_p, "Also report a simulated p-value");

  // analyze
  auto * an = app.add_subcommand("analyze", "Full pipeline: transform, orders, test, two-stage fit, diagnostics");
  std::string an_path, an_column = "0", an_config;
  std::optional<bool> an_log10;
  an->add_option("input", an_path, "Series CSV file")->required();
  an->add_option("--column", an_column, "Column index or header name");
  an->add_option("--config", an_config, "Analysis options (JSON)");
  an->add_flag("--log10,!--no-log10", an_log10, "Apply a base-10 log transform");

  // mc
  std::string mc_config;
  bool mc_log = false, mc_svg = false;
  std::optional<std::size_t> mc_reps;
  auto add_mc = [&](const char * name, const char * help) {
      auto * c = app.add_subcommand(name, help);
      c->add_option("config", mc_config, "Experiment configuration (JSON)")->required();
      c->add_flag("--log", mc_log, "Write the per-replication log");
      c->add_flag("--svg", mc_svg, "Write an SVG chart");
      c->add_option("--replications", mc_reps, "Override the replication count")->check(CLI::PositiveNumber);
      return c;
    };
  auto * mc_size = add_mc("mc-size", "Monte Carlo size study");
  auto * mc_power = add_mc("mc-power", "Monte Carlo power study");
  auto * mc_me = add_mc("mc-me", "Monte Carlo measurement-error study");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError & e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (g.threads <= 0) {g.threads = detail::default_threads();}
  const bool csv = g.format == "csv";

  try {
    if (sim->parsed()) {
      TimeSeries x({0.0});
      const auto conv = convention == "plus" ? SimMaConvention::plus : SimMaConvention::model;
      ArmaGarchParams base{phi, theta, a, b};
      TarmaGarchParams tp{base, psi2, r, d};
      if (family == "arma-garch") {
        x = simulate_arma_garch(base, conv, n, burn_in, g.seed);
      } else if (family == "tarma-garch") {
        if (psi2.empty()) {psi2.assign(base.phi.size() + base.theta.size(), 0.0); tp.psi2 = psi2;}
        x = simulate_tarma_garch(tp, conv, n, burn_in, g.seed);
      } else {
        if (!theta.empty()) {throw std::invalid_argument("tar-garch takes no MA coefficients");}
        if (psi2.empty()) {tp.psi2.assign(base.phi.size(), 0.0);}
        x = simulate_tar_garch(tp, n, burn_in, g.seed);
      }
      const double snr = snr_text == "inf" || snr_text == "Inf" ? std::numeric_limits<double>::infinity() :
        std::stod(snr_text);
      if (!std::isinf(snr)) {
        const double s2 = sigma2_x ? *sigma2_x : tarma::detail::sample_variance(x.values());
        x = add_measurement_noise(x, snr, s2, splitmix64(g.seed ^ 0x6E6F697365ULL));
      }
      if (!output.empty()) {
        write_series(output, x, "x");
      } else if (!g.out_dir.empty()) {
        write_series(detail::out_path(g, "simulated.csv").string(), x, "x");
      } else {
        write_series(out, x, "x");
      }
      return kOk;
    }

    if (fit->parsed()) {
      const auto x = fit_in.load();
      json report;
      std::string resid;
      if (model == "arma-garch") {
        FitOptions fo;
        fo.std_errors = !no_se;
        const auto f = fit_arma_garch(x, p, q, u, v, fo);
        report = {{"model", "arma-garch"}, {"fit", f}, {"assumptions", check_assumptions(f.params)}};
        resid = detail::residual_csv(f.filter);
        if (!f.converged) {err << "warning: optimizer did not converge\n";}
      } else {
        TarmaSpec spec = TarmaSpec::dense(p, q, d);
        if (!lower_ar.empty() || !lower_ma.empty() || !upper_ar.empty() || !upper_ma.empty()) {
          spec = TarmaSpec{RegimeSpec{lower_ar, lower_ma}, RegimeSpec{upper_ar, upper_ma}, d};
        }
        FitOptions fo;
        fo.std_errors = !no_se;
        const auto f = fit_two_stage(x, spec, fit_grid.grid(x), u, v, fo);
        report = {{"model", "tarma"}, {"fit", f}, {"assumptions", check_assumptions(f.tarma)}};
        resid = detail::residual_csv(f.garch.filter);
      }
      if (!g.out_dir.empty()) {
        detail::write_file(detail::out_path(g, "fit.json"), report.dump(2) + "\n");
        detail::write_file(detail::out_path(g, "fit_residuals.csv"), resid);
      }
      out << (csv ? resid : report.dump(2) + "\n");
      return kOk;
    }

    if (test->parsed()) {
      const auto x = test_in.load();
      SupLmOptions so;
      so.cv.source = cv;
      so.cv.n_sim = n_sim;
      so.cv.seed = g.seed;
      so.cv.p_value = want_p;
      so.threads = g.threads;
      const auto res = sup_lm_test(x, p, q, u, v, d, test_grid.grid(x), method, so);
      const json j = res;
      std::ostringstream trace;
      trace << "r,statistic,degenerate\n";
      for (const auto & tp : res.trace) {
        trace << tarma::detail::format_double(tp.r) << ',' << tarma::detail::format_double(tp.statistic) << ','
              << (tp.degenerate ? 1 : 0) << '\n';
      }
      if (!g.out_dir.empty()) {
        detail::write_file(detail::out_path(g, "test.json"), j.dump(2) + "\n");
        detail::write_file(detail::out_path(g, "test_trace.csv"), trace.str());
      }
      out << (csv ? trace.str() : j.dump(2) + "\n");
      return detail::decision_code(res);
    }

    if (an->parsed()) {
      AnalysisOptions ao;
      if (!an_config.empty()) {
        std::ifstream f(an_config);
        if (!f) {throw std::invalid_argument("cannot open analysis config: " + an_config);}
        json j;
        try {
          f >> j;
        } catch (const json::parse_error & e) {
          throw std::invalid_argument(std::string("analysis config is not valid JSON: ") + e.what());
        }
        ao = analysis_options_from_json(j);
      }
      if (an_log10) {ao.log10 = *an_log10;}
      if (g.seed_set) {ao.seed = g.seed;}
      ao.cv.seed = ao.seed;
      ao.cv.alphas = detail::ensure_decision_alphas(ao.cv.alphas);
      ao.threads = g.threads;
      TimeSeries x({0.0});
      try {
        x = load_series(an_path, detail::column_selector(an_column));
      } catch (const DataError & e) {
        err << "error: ingest: " << e.what() << "\n";
        return kData;
      }
      try {
        const auto rep = analyze(x, ao);
        const json j = rep;
        const auto text = summary_text(rep);
        const auto corr = detail::correlogram_csv(rep.diagnostics);
        if (!g.out_dir.empty()) {
          detail::write_file(detail::out_path(g, "analysis.json"), j.dump(2) + "\n");
          detail::write_file(detail::out_path(g, "analysis_summary.txt"), text);
          detail::write_file(detail::out_path(g, "analysis_correlogram.csv"), corr);
        }
        err << text;
        out << (csv ? corr : j.dump(2) + "\n");
        return detail::decision_code(rep.test);
      } catch (const AnalysisError & e) {
        err << "error: stage " << e.stage() << ": " << e.message() << "\n";
        if (e.partial() && !g.out_dir.empty()) {
          detail::write_file(detail::out_path(g, "analysis_partial.json"), e.partial()->dump(2) + "\n");
        }
        return e.data_error() ? kData : kInternal;
      }
    }

    for (auto * c : {mc_size, mc_power, mc_me}) {
      if (!c->parsed()) {continue;}
      const auto expected = c == mc_size ? mc::Experiment::size :
        c == mc_power ? mc::Experiment::power : mc::Experiment::measurement_error;
      auto cfg = mc::load_config(mc_config, expected);
      if (g.seed_set) {cfg.master_seed = g.seed;}
      if (mc_reps) {cfg.replications = *mc_reps;}
      if (mc_log) {cfg.log_replications = true;}
      const auto res = mc::run_experiment(cfg, g.threads);
      std::ostringstream table;
      mc::write_csv(table, res);
      const auto stem = "mc_" + mc::to_string(cfg.experiment);
      if (!g.out_dir.empty()) {
        detail::write_file(detail::out_path(g, stem + ".csv"), table.str());
        detail::write_file(detail::out_path(g, stem + ".json"), mc::to_json(res).dump(2) + "\n");
        if (cfg.log_replications) {
          std::ostringstream log;
          mc::write_log_csv(log, res);
          detail::write_file(detail::out_path(g, stem + "_replications.csv"), log.str());
        }
        if (mc_svg) {detail::write_file(detail::out_path(g, stem + ".svg"), mc::svg_chart(res));}
      } else if (mc_svg || mc_log) {
        err << "warning: --svg and --log need --out-dir\n";
      }
      out << (csv ? table.str() : mc::to_json(res).dump(2) + "\n");
      return kOk;
    }
  } catch (const mc::ConfigError & e) {
    err << "error: config: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument & e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError & e) {
    err << "error: data: " << e.what() << "\n";
    return kData;
  } catch (const NumericError & e) {
    err << "error: numeric: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace tarma::cli

#endif  // TOOLS__CLI_APP_HPP_
