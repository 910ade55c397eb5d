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

#ifndef TARMA__MC_HPP_
#define TARMA__MC_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "tarma/core.hpp"
#include "tarma/critical_values.hpp"
#include "tarma/error.hpp"
#include "tarma/json.hpp"
#include "tarma/rng.hpp"
#include "tarma/simulate.hpp"
#include "tarma/sup_lm.hpp"
#include "tarma/svg.hpp"

namespace tarma::mc
{

/// Invalid experiment configuration.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

enum class Experiment { size, power, measurement_error, me_power };

NLOHMANN_JSON_SERIALIZE_ENUM(Experiment, {
  {Experiment::size, "size"},
  {Experiment::power, "power"},
  {Experiment::measurement_error, "measurement_error"},
  {Experiment::me_power, "me_power"}})

inline std::string to_string(Experiment e) {return json(e).get<std::string>();}

inline bool is_power(Experiment e) {return e == Experiment::power || e == Experiment::me_power;}
inline bool is_noisy(Experiment e)
{
  return e == Experiment::measurement_error || e == Experiment::me_power;
}

struct GarchCase
{
  std::string name;
  double a0 = 1.0;
  double a1 = 0.0;
  double b1 = 0.0;

  bool operator==(const GarchCase &) const = default;
};

struct TestOrders
{
  int p = 1;
  int q = 1;
  int u = 1;
  int v = 1;
  int d = 1;

  bool operator==(const TestOrders &) const = default;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct McConfig
{
  Experiment experiment = Experiment::size;
  std::vector<GarchCase> cases;
  std::vector<double> phi{0.0};    // size and measurement_error
  std::vector<double> theta{0.0};  // size; plus convention
  std::vector<double> psi{0.0};    // power and me_power
  std::vector<double> snr{kInf};   // measurement_error and me_power
  std::vector<std::size_t> sample_sizes{500};
  std::size_t replications = 2000;
  double alpha = 0.05;
  double lower_q = 0.25;
  double upper_q = 0.75;
  std::size_t max_points = 200;
  std::vector<LmMethod> methods{LmMethod::slmg, LmMethod::slm};
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0: hardware concurrency
  TestOrders test_orders;
  std::size_t burn_in = kDefaultBurnIn;
  std::size_t variance_sim_length = 100000;
  CvSource cv_source = CvSource::table;
  int cv_n_sim = 2000;
  bool log_replications = false;

  bool operator==(const McConfig &) const = default;
};

/// GARCH cases A, B, C for the given experiment.
inline std::vector<GarchCase> default_cases(Experiment e)
{
  if (is_power(e)) {
    return {{"A", 1.0, 0.1, 0.8}, {"B", 1.0, 0.4, 0.4}, {"C", 1.0, 0.8, 0.1}};
  }
  return {{"A", 1.0, 0.04, 0.95}, {"B", 1.0, 0.3, 0.0}, {"C", 1.0, 0.4, 0.4}};
}

namespace detail
{

inline void reject_unknown(const json & j, const std::set<std::string> & allowed, const std::string & where)
{
  if (!j.is_object()) {throw ConfigError(where + " must be a JSON object");}
  for (const auto & [key, _] : j.items()) {
    if (!allowed.count(key)) {throw ConfigError("unknown key '" + key + "' in " + where);}
  }
}

inline double snr_value(const json & v)
{
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity" || s == "Infinity") {return kInf;}
    throw ConfigError("snr entries must be positive numbers or \"inf\"");
  }
  if (!v.is_number()) {throw ConfigError("snr entries must be positive numbers or \"inf\"");}
  return v.get<double>();
}

template<typename T>
T field(const json & j, const char * key)
{
  try {
    return j.at(key).get<T>();
  } catch (const json::exception & e) {
    throw ConfigError(std::string("invalid value for '") + key + "': " + e.what());
  }
}

}  // namespace detail

/// Check invariants: counts, levels, and that every DGP is stationary.
inline void validate(const McConfig & c)
{
  if (c.replications < 1) {throw ConfigError("replications must be >= 1");}
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) {throw ConfigError("alpha must lie in (0, 1)");}
  if (!(c.lower_q > 0.0 && c.lower_q < c.upper_q && c.upper_q < 1.0)) {
    throw ConfigError("grid quantiles must satisfy 0 < lower_q < upper_q < 1");
  }
  if (c.max_points < 1) {throw ConfigError("grid.max_points must be >= 1");}
  if (c.cases.empty()) {throw ConfigError("at least one GARCH case is required");}
  if (c.sample_sizes.empty()) {throw ConfigError("sample_sizes is empty");}
  for (auto n : c.sample_sizes) {
    if (n < 20) {throw ConfigError("sample sizes must be >= 20");}
  }
  if (c.methods.empty()) {throw ConfigError("methods is empty");}
  for (const auto & gc : c.cases) {
    if (!(gc.a0 > 0.0) || gc.a1 < 0.0 || gc.b1 < 0.0 || !(gc.a1 + gc.b1 < 1.0)) {
      throw ConfigError("GARCH case " + gc.name + " violates positivity or a1 + b1 < 1");
    }
  }
  const auto & o = c.test_orders;
  if (o.p < 0 || o.q < 0 || o.u < 0 || o.v < 0 || o.d < 1) {throw ConfigError("invalid test orders");}
  for (auto m : c.methods) {
    if (m == LmMethod::slmg && o.u + o.v < 1) {throw ConfigError("sLMg needs u + v >= 1");}
  }
  if (c.experiment == Experiment::size || c.experiment == Experiment::measurement_error) {
    if (c.phi.empty()) {throw ConfigError("phi grid is empty");}
    for (double f : c.phi) {
      if (!(std::abs(f) < 1.0)) {throw ConfigError("phi values must satisfy |phi| < 1");}
    }
  }
  if (c.experiment == Experiment::size) {
    if (c.theta.empty()) {throw ConfigError("theta grid is empty");}
    for (double t : c.theta) {
      if (!(std::abs(t) < 1.0)) {throw ConfigError("theta values must satisfy |theta| < 1");}
    }
  }
  if (is_power(c.experiment)) {
    if (c.psi.empty()) {throw ConfigError("psi grid is empty");}
    for (double p : c.psi) {
      // the upper regime is fixed at AR 0.5; the lower one must stay within the unit circle
      if (!(std::abs(0.5 + p) < 1.0 + 1e-12) || !std::isfinite(p)) {
        throw ConfigError("psi values must keep |0.5 + psi| <= 1");
      }
    }
  }
  if (is_noisy(c.experiment)) {
    if (c.snr.empty()) {throw ConfigError("snr list is empty");}
    for (double s : c.snr) {
      if (!(s > 0.0)) {throw ConfigError("snr values must be positive");}
    }
    if (c.variance_sim_length < 1000) {throw ConfigError("variance_sim_length must be >= 1000");}
  }
  if (c.cv_n_sim < 100) {throw ConfigError("cv_n_sim must be >= 100");}
}

/// Parse and validate a configuration. Unknown keys are errors.
inline McConfig config_from_json(const json & j, std::optional<Experiment> expected = std::nullopt)
{
  detail::reject_unknown(j, {
    "experiment", "cases", "phi", "theta", "psi", "snr", "sample_sizes", "replications", "alpha",
    "grid", "methods", "master_seed", "workers", "test_orders", "burn_in", "variance_sim_length",
    "cv_source", "cv_n_sim", "log_replications"}, "config");
  McConfig c;
  if (!j.contains("experiment")) {throw ConfigError("missing key 'experiment'");}
  c.experiment = detail::field<Experiment>(j, "experiment");
  if (!j.at("experiment").is_string() || to_string(c.experiment) != j.at("experiment").get<std::string>()) {
    throw ConfigError("experiment must be one of size, power, measurement_error, me_power");
  }
  if (expected && c.experiment != *expected &&
    !(*expected == Experiment::measurement_error && c.experiment == Experiment::me_power))
  {
    throw ConfigError("config experiment '" + to_string(c.experiment) + "' does not match the command");
  }
  c.cases = default_cases(c.experiment);
  if (j.contains("cases")) {
    const auto & jc = j.at("cases");
    if (!jc.is_array()) {throw ConfigError("cases must be an array");}
    c.cases.clear();
    const auto defaults = default_cases(c.experiment);
    for (const auto & item : jc) {
      if (item.is_string()) {
        const auto name = item.get<std::string>();
        auto it = std::find_if(defaults.begin(), defaults.end(), [&](const auto & d) {return d.name == name;});
        if (it == defaults.end()) {throw ConfigError("unknown GARCH case '" + name + "'");}
        c.cases.push_back(*it);
      } else {
        detail::reject_unknown(item, {"name", "a0", "a1", "b1"}, "cases entry");
        GarchCase gc;
        gc.name = detail::field<std::string>(item, "name");
        gc.a0 = detail::field<double>(item, "a0");
        gc.a1 = detail::field<double>(item, "a1");
        gc.b1 = detail::field<double>(item, "b1");
        c.cases.push_back(gc);
      }
    }
  }
  if (j.contains("phi")) {c.phi = detail::field<std::vector<double>>(j, "phi");}
  if (j.contains("theta")) {c.theta = detail::field<std::vector<double>>(j, "theta");}
  if (j.contains("psi")) {c.psi = detail::field<std::vector<double>>(j, "psi");}
  if (j.contains("snr")) {
    if (!j.at("snr").is_array()) {throw ConfigError("snr must be an array");}
    c.snr.clear();
    for (const auto & v : j.at("snr")) {c.snr.push_back(detail::snr_value(v));}
  }
  if (j.contains("sample_sizes")) {c.sample_sizes = detail::field<std::vector<std::size_t>>(j, "sample_sizes");}
  if (j.contains("replications")) {c.replications = detail::field<std::size_t>(j, "replications");}
  if (j.contains("alpha")) {c.alpha = detail::field<double>(j, "alpha");}
  if (j.contains("grid")) {
    const auto & g = j.at("grid");
    detail::reject_unknown(g, {"lower_q", "upper_q", "max_points"}, "grid");
    if (g.contains("lower_q")) {c.lower_q = detail::field<double>(g, "lower_q");}
    if (g.contains("upper_q")) {c.upper_q = detail::field<double>(g, "upper_q");}
    if (g.contains("max_points")) {c.max_points = detail::field<std::size_t>(g, "max_points");}
  }
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto & m : j.at("methods")) {
      if (!m.is_string() || (m != "sLMg" && m != "sLM")) {
        throw ConfigError("methods must be a subset of [\"sLMg\", \"sLM\"]");
      }
      c.methods.push_back(m.get<LmMethod>());
    }
  }
  if (j.contains("master_seed")) {c.master_seed = detail::field<std::uint64_t>(j, "master_seed");}
  if (j.contains("workers")) {c.workers = detail::field<int>(j, "workers");}
  if (j.contains("test_orders")) {
    const auto & o = j.at("test_orders");
    detail::reject_unknown(o, {"p", "q", "u", "v", "d"}, "test_orders");
    if (o.contains("p")) {c.test_orders.p = detail::field<int>(o, "p");}
    if (o.contains("q")) {c.test_orders.q = detail::field<int>(o, "q");}
    if (o.contains("u")) {c.test_orders.u = detail::field<int>(o, "u");}
    if (o.contains("v")) {c.test_orders.v = detail::field<int>(o, "v");}
    if (o.contains("d")) {c.test_orders.d = detail::field<int>(o, "d");}
  }
  if (j.contains("burn_in")) {c.burn_in = detail::field<std::size_t>(j, "burn_in");}
  if (j.contains("variance_sim_length")) {
    c.variance_sim_length = detail::field<std::size_t>(j, "variance_sim_length");
  }
  if (j.contains("cv_source")) {
    const auto & s = j.at("cv_source");
    if (!s.is_string() || (s != "table" && s != "simulated")) {
      throw ConfigError("cv_source must be \"table\" or \"simulated\"");
    }
    c.cv_source = s.get<CvSource>();
  }
  if (j.contains("cv_n_sim")) {c.cv_n_sim = detail::field<int>(j, "cv_n_sim");}
  if (j.contains("log_replications")) {c.log_replications = detail::field<bool>(j, "log_replications");}
  validate(c);
  return c;
}

inline McConfig load_config(const std::string & path, std::optional<Experiment> expected = std::nullopt)
{
  std::ifstream in(path);
  if (!in) {throw DataError("cannot open config file: " + path);}
  json j;
  try {
    in >> j;
  } catch (const json::parse_error & e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j, expected);
}

inline json snr_to_json(double s) {return std::isinf(s) ? json("inf") : json(s);}

inline json to_json(const McConfig & c)
{
  json cases = json::array();
  for (const auto & gc : c.cases) {
    cases.push_back({{"name", gc.name}, {"a0", gc.a0}, {"a1", gc.a1}, {"b1", gc.b1}});
  }
  json snr = json::array();
  for (double s : c.snr) {snr.push_back(snr_to_json(s));}
  return {
    {"experiment", c.experiment}, {"cases", cases}, {"phi", c.phi}, {"theta", c.theta},
    {"psi", c.psi}, {"snr", snr}, {"sample_sizes", c.sample_sizes},
    {"replications", c.replications}, {"alpha", c.alpha},
    {"grid", {{"lower_q", c.lower_q}, {"upper_q", c.upper_q}, {"max_points", c.max_points}}},
    {"methods", c.methods}, {"master_seed", c.master_seed}, {"workers", c.workers},
    {"test_orders", {{"p", c.test_orders.p}, {"q", c.test_orders.q}, {"u", c.test_orders.u},
      {"v", c.test_orders.v}, {"d", c.test_orders.d}}},
    {"burn_in", c.burn_in}, {"variance_sim_length", c.variance_sim_length},
    {"cv_source", c.cv_source}, {"cv_n_sim", c.cv_n_sim}, {"log_replications", c.log_replications}};
}

/// One simulated design point. `phi`, `theta`, `psi` are the experiment's
/// free parameters; unused ones are zero.
struct McCell
{
  std::string case_name;
  double phi = 0.0;
  double theta = 0.0;
  double psi = 0.0;
  std::size_t n = 0;
  double snr = kInf;
  TarmaGarchParams dgp;  // plus MA convention
  std::uint64_t id = 0;

  bool operator==(const McCell &) const = default;
};

struct McCellResult
{
  std::string case_name;
  double phi = 0.0;
  double theta = 0.0;
  double psi = 0.0;
  std::size_t n = 0;
  double snr = kInf;
  LmMethod method = LmMethod::slmg;
  std::size_t replications = 0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  std::size_t rejections = 0;
  double rejection_pct = 0.0;
  std::optional<double> size_corrected_pct;
  double critical_value = 0.0;  // nominal; NaN when simulated per replication
  bool valid = true;

  bool operator==(const McCellResult &) const = default;
};

struct ReplicationRecord
{
  std::size_t cell = 0;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  LmMethod method = LmMethod::slmg;
  bool failed = false;
  double statistic = 0.0;
  double arg_r = 0.0;
  bool reject = false;
  std::string error;

  bool operator==(const ReplicationRecord &) const = default;
};

struct McResult
{
  McConfig config;
  std::vector<McCell> cells;
  std::vector<McCellResult> results;
  std::vector<ReplicationRecord> log;  // filled when config.log_replications
  double wall_clock_seconds = 0.0;

  /// Equality ignoring wall-clock time.
  bool same_outcome(const McResult & o) const
  {
    return config == o.config && cells == o.cells && results == o.results && log == o.log;
  }

  const McCellResult * find(
    const std::string & case_name, std::size_t n, LmMethod method, double phi = 0.0, double theta = 0.0,
    double psi = 0.0, double snr = kInf) const
  {
    auto eq = [](double a, double b) {return a == b || std::abs(a - b) < 1e-12;};
    for (const auto & r : results) {
      if (r.case_name == case_name && r.n == n && r.method == method && eq(r.phi, phi) &&
        eq(r.theta, theta) && eq(r.psi, psi) && eq(r.snr, snr))
      {
        return &r;
      }
    }
    return nullptr;
  }
};

inline constexpr double kMaxFailureFraction = 0.10;

namespace detail
{

inline std::string canonical(const std::vector<double> & v)
{
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) {s += ',';}
    s += tarma::detail::format_double(v[i]);
  }
  return s + "]";
}

/// Identity of the data-generating process, without sample size, noise, or experiment.
inline std::string dgp_key(const TarmaGarchParams & p)
{
  std::string s = "phi=" + canonical(p.base.phi) + ";theta=" + canonical(p.base.theta) +
    ";a=" + canonical(p.base.a) + ";b=" + canonical(p.base.b);
  if (!p.psi2.empty()) {
    s += ";psi2=" + canonical(p.psi2) + ";r=" + tarma::detail::format_double(p.r) +
      ";d=" + std::to_string(p.d);
  }
  return s;
}

inline TarmaGarchParams make_dgp(Experiment e, const GarchCase & gc, double phi, double theta, double psi)
{
  TarmaGarchParams p;
  p.base.a = {gc.a0, gc.a1};
  p.base.b = {gc.b1};
  p.d = 1;
  p.r = 0.0;
  switch (e) {
    case Experiment::size:
      p.base.phi = {0.0, phi};
      p.base.theta = {theta};
      break;
    case Experiment::measurement_error:
      // theta = 0 keeps the path identical to the matching size cell
      p.base.phi = {0.0, phi};
      p.base.theta = {0.0};
      break;
    case Experiment::power:
      p.base.phi = {0.5, 0.5};
      p.base.theta = {0.5};
      p.psi2 = {psi, psi, psi};
      break;
    case Experiment::me_power:
      p.base.phi = {0.5, 0.5};
      p.psi2 = {psi, psi};
      break;
  }
  return p;
}

inline TimeSeries simulate_dgp(const TarmaGarchParams & p, std::size_t n, std::size_t burn_in, std::uint64_t seed)
{
  if (p.psi2.empty()) {return simulate_arma_garch(p.base, SimMaConvention::plus, n, burn_in, seed);}
  return simulate_tarma_garch(p, SimMaConvention::plus, n, burn_in, seed);
}

inline constexpr std::uint64_t kNoiseStream = 0x6E6F697365ULL;
inline constexpr std::uint64_t kVarianceStream = 0x7661726961ULL;
inline constexpr std::uint64_t kCvStream = 0x6376ULL;

/// Run `fn(i)` for i in [0, count) over `workers` threads; each index is touched once.
template<typename Fn>
void parallel_for(std::size_t count, int workers, Fn && fn)
{
  const auto w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) {fn(i);}
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(w, count); ++t) {
    pool.emplace_back([&]() {
        for (std::size_t i = next++; i < count; i = next++) {fn(i);}
      });
  }
  for (auto & th : pool) {th.join();}
}

}  // namespace detail

inline int resolve_workers(int hint)
{
  if (hint > 0) {return hint;}
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Design points in a fixed order: case, parameter, n, snr.
inline std::vector<McCell> enumerate_cells(const McConfig & c)
{
  std::vector<std::tuple<double, double, double>> params;
  switch (c.experiment) {
    case Experiment::size:
      for (double f : c.phi) {
        for (double t : c.theta) {params.emplace_back(f, t, 0.0);}
      }
      break;
    case Experiment::measurement_error:
      for (double f : c.phi) {params.emplace_back(f, 0.0, 0.0);}
      break;
    case Experiment::power:
    case Experiment::me_power: {
      auto psi = c.psi;
      if (std::none_of(psi.begin(), psi.end(), [](double v) {return v == 0.0;})) {
        psi.insert(psi.begin(), 0.0);
      }
      for (double p : psi) {params.emplace_back(0.0, 0.0, p);}
      break;
    }
  }
  const std::vector<double> snrs = is_noisy(c.experiment) ? c.snr : std::vector<double>{kInf};
  std::vector<McCell> cells;
  for (const auto & gc : c.cases) {
    for (const auto & [f, t, p] : params) {
      for (auto n : c.sample_sizes) {
        for (double s : snrs) {
          McCell cell;
          cell.case_name = gc.name;
          cell.phi = f;
          cell.theta = t;
          cell.psi = p;
          cell.n = n;
          cell.snr = s;
          cell.dgp = detail::make_dgp(c.experiment, gc, f, t, p);
          cell.id = fnv1a(detail::dgp_key(cell.dgp) + ";n=" + std::to_string(n));
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

/// Run the configured experiment. `workers_override` > 0 replaces the config hint.
inline McResult run_experiment(const McConfig & config, int workers_override = 0)
{
  validate(config);
  const auto t_start = std::chrono::steady_clock::now();
  McResult out;
  out.config = config;
  out.cells = enumerate_cells(config);
  const int workers = resolve_workers(workers_override > 0 ? workers_override : config.workers);
  const auto & cells = out.cells;
  const std::size_t n_methods = config.methods.size();
  const std::size_t reps = config.replications;

  // sigma2_x per distinct noisy DGP, computed once
  std::map<std::string, double> sigma2_x;
  if (is_noisy(config.experiment)) {
    for (const auto & cell : cells) {
      if (std::isinf(cell.snr)) {continue;}
      const auto key = detail::dgp_key(cell.dgp);
      if (sigma2_x.count(key)) {continue;}
      const auto seed = replication_seed(config.master_seed, fnv1a(key), detail::kVarianceStream);
      sigma2_x[key] = cell.dgp.psi2.empty() ?
        unconditional_variance(cell.dgp.base, SimMaConvention::plus, config.variance_sim_length, seed) :
        unconditional_variance(cell.dgp, SimMaConvention::plus, config.variance_sim_length, seed);
    }
  }

  SupLmOptions test_opts;
  test_opts.cv.source = config.cv_source;
  test_opts.cv.alphas = {config.alpha};
  test_opts.cv.n_sim = config.cv_n_sim;
  const auto & o = config.test_orders;

  std::vector<ReplicationRecord> records(cells.size() * reps * n_methods);
  detail::parallel_for(cells.size() * reps, workers, [&](std::size_t task) {
      const std::size_t ci = task / reps;
      const std::size_t rep = task % reps;
      const auto & cell = cells[ci];
      const auto seed = replication_seed(config.master_seed, cell.id, rep);
      auto * slot = &records[task * n_methods];
      for (std::size_t m = 0; m < n_methods; ++m) {
        slot[m].cell = ci;
        slot[m].replication = rep;
        slot[m].seed = seed;
        slot[m].method = config.methods[m];
      }
      std::optional<TimeSeries> y;
      ThresholdGrid grid;
      try {
        y = detail::simulate_dgp(cell.dgp, cell.n, config.burn_in, seed);
        if (!std::isinf(cell.snr)) {
          const auto noise_seed = replication_seed(config.master_seed ^ detail::kNoiseStream, cell.id, rep);
          y = add_measurement_noise(*y, cell.snr, sigma2_x.at(detail::dgp_key(cell.dgp)), noise_seed);
        }
        grid = percentile_grid(*y, config.lower_q, config.upper_q, config.max_points);
      } catch (const std::exception & e) {
        for (std::size_t m = 0; m < n_methods; ++m) {
          slot[m].failed = true;
          slot[m].error = std::string("simulate: ") + e.what();
        }
        return;
      }
      for (std::size_t m = 0; m < n_methods; ++m) {
        auto opts = test_opts;
        opts.cv.seed = replication_seed(seed, detail::kCvStream, m);
        try {
          const auto res = sup_lm_test(*y, o.p, o.q, o.u, o.v, o.d, grid, config.methods[m], opts);
          slot[m].statistic = res.statistic;
          slot[m].arg_r = res.arg_r;
          slot[m].reject = res.rejects(config.alpha);
        } catch (const std::exception & e) {
          slot[m].failed = true;
          slot[m].error = e.what();
        }
      }
    });

  const CriticalValueTable & table = default_table();
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      McCellResult r;
      const auto & cell = cells[ci];
      r.case_name = cell.case_name;
      r.phi = cell.phi;
      r.theta = cell.theta;
      r.psi = cell.psi;
      r.n = cell.n;
      r.snr = cell.snr;
      r.method = config.methods[m];
      r.replications = reps;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto & rec = records[(ci * reps + rep) * n_methods + m];
        if (rec.failed) {
          ++r.failures;
        } else {
          ++r.successes;
          if (rec.reject) {++r.rejections;}
        }
      }
      r.rejection_pct = r.successes ? 100.0 * static_cast<double>(r.rejections) /
        static_cast<double>(r.successes) : 0.0;
      r.valid = static_cast<double>(r.failures) <= kMaxFailureFraction * static_cast<double>(reps) &&
        r.successes > 0;
      const auto cv = config.cv_source == CvSource::table ?
        table.lookup(o.p + o.q + 1, config.lower_q, config.alpha) : std::nullopt;
      r.critical_value = cv ? *cv : std::numeric_limits<double>::quiet_NaN();
      out.results.push_back(r);
    }
  }

  if (is_power(config.experiment)) {
    // size correction: empirical (1 - alpha) quantile of the psi = 0 cell sharing (case, n, method, snr)
    for (auto & r : out.results) {
      const auto mi = static_cast<std::size_t>(
        std::find(config.methods.begin(), config.methods.end(), r.method) - config.methods.begin());
      std::size_t null_ci = cells.size();
      std::size_t this_ci = cells.size();
      for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const auto & c = cells[ci];
        if (c.case_name != r.case_name || c.n != r.n || !(c.snr == r.snr)) {continue;}
        if (c.psi == 0.0) {null_ci = ci;}
        if (c.psi == r.psi) {this_ci = ci;}
      }
      auto stats = [&](std::size_t ci) {
          std::vector<double> s;
          for (std::size_t rep = 0; rep < reps; ++rep) {
            const auto & rec = records[(ci * reps + rep) * n_methods + mi];
            if (!rec.failed) {s.push_back(rec.statistic);}
          }
          return s;
        };
      auto null_stats = stats(null_ci);
      const auto alt_stats = stats(this_ci);
      if (null_stats.empty() || alt_stats.empty()) {continue;}
      std::sort(null_stats.begin(), null_stats.end());
      const double q = quantile_from_draws(null_stats, config.alpha);
      const auto above = std::count_if(alt_stats.begin(), alt_stats.end(), [&](double s) {return s > q;});
      r.size_corrected_pct = 100.0 * static_cast<double>(above) / static_cast<double>(alt_stats.size());
    }
  }

  if (config.log_replications) {out.log = std::move(records);}
  out.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

inline McResult run_size(const McConfig & c, int workers = 0)
{
  if (c.experiment != Experiment::size) {throw ConfigError("run_size needs experiment = size");}
  return run_experiment(c, workers);
}

inline McResult run_power(const McConfig & c, int workers = 0)
{
  if (c.experiment != Experiment::power) {throw ConfigError("run_power needs experiment = power");}
  return run_experiment(c, workers);
}

inline McResult run_measurement_error(const McConfig & c, int workers = 0)
{
  if (!is_noisy(c.experiment)) {
    throw ConfigError("run_measurement_error needs experiment = measurement_error or me_power");
  }
  return run_experiment(c, workers);
}

// ---------------------------------------------------------------- output

inline std::string snr_label(double s) {return std::isinf(s) ? "inf" : tarma::detail::format_double(s);}

inline void write_csv(std::ostream & os, const McResult & res)
{
  const auto e = res.config.experiment;
  os << "case,";
  if (e == Experiment::size) {os << "phi,theta,";}
  if (e == Experiment::measurement_error) {os << "phi,";}
  if (is_power(e)) {os << "psi,";}
  os << "n,";
  if (is_noisy(e)) {os << "snr,";}
  os << "method,replications,successes,failures,rejections,rejection_pct,";
  if (is_power(e)) {os << "size_corrected_pct,";}
  os << "valid\n";
  char buf[32];
  auto pct = [&](double v) {std::snprintf(buf, sizeof(buf), "%.2f", v); return std::string(buf);};
  for (const auto & r : res.results) {
    os << r.case_name << ',';
    if (e == Experiment::size) {
      os << tarma::detail::format_double(r.phi) << ',' << tarma::detail::format_double(r.theta) << ',';
    }
    if (e == Experiment::measurement_error) {os << tarma::detail::format_double(r.phi) << ',';}
    if (is_power(e)) {os << tarma::detail::format_double(r.psi) << ',';}
    os << r.n << ',';
    if (is_noisy(e)) {os << snr_label(r.snr) << ',';}
    os << to_string(r.method) << ',' << r.replications << ',' << r.successes << ',' << r.failures << ','
       << r.rejections << ',' << pct(r.rejection_pct) << ',';
    if (is_power(e)) {os << (r.size_corrected_pct ? pct(*r.size_corrected_pct) : "") << ',';}
    os << (r.valid ? "true" : "false") << '\n';
  }
}

inline void write_log_csv(std::ostream & os, const McResult & res)
{
  os << "cell,case,phi,theta,psi,n,snr,replication,seed,method,failed,statistic,arg_r,reject,error\n";
  for (const auto & rec : res.log) {
    const auto & c = res.cells[rec.cell];
    std::string err = rec.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << rec.cell << ',' << c.case_name << ',' << tarma::detail::format_double(c.phi) << ','
       << tarma::detail::format_double(c.theta) << ',' << tarma::detail::format_double(c.psi) << ','
       << c.n << ',' << snr_label(c.snr) << ',' << rec.replication << ',' << rec.seed << ','
       << to_string(rec.method) << ',' << (rec.failed ? 1 : 0) << ','
       << tarma::detail::format_double(rec.statistic) << ',' << tarma::detail::format_double(rec.arg_r)
       << ',' << (rec.reject ? 1 : 0) << ',' << err << '\n';
  }
}

inline json to_json(const McResult & res)
{
  json rows = json::array();
  for (const auto & r : res.results) {
    json row = {
      {"case", r.case_name}, {"phi", r.phi}, {"theta", r.theta}, {"psi", r.psi}, {"n", r.n},
      {"snr", snr_to_json(r.snr)}, {"method", r.method}, {"replications", r.replications},
      {"successes", r.successes}, {"failures", r.failures}, {"rejections", r.rejections},
      {"rejection_pct", r.rejection_pct}, {"valid", r.valid}};
    row["size_corrected_pct"] = r.size_corrected_pct ? json(*r.size_corrected_pct) : json(nullptr);
    row["critical_value"] = std::isnan(r.critical_value) ? json(nullptr) : json(r.critical_value);
    rows.push_back(row);
  }
  return {
    {"config", to_json(res.config)}, {"results", rows},
    {"wall_clock_seconds", res.wall_clock_seconds}};
}

/// Box plots of rejection rates for size experiments; power curves otherwise.
inline std::string svg_chart(const McResult & res)
{
  const auto e = res.config.experiment;
  std::ostringstream os;
  if (!is_power(e)) {
    std::vector<svg::BoxGroup> groups;
    for (const auto & r : res.results) {
      std::string label = r.case_name + " " + to_string(r.method) + " n=" + std::to_string(r.n);
      if (is_noisy(e)) {label += " snr=" + snr_label(r.snr);}
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto & g) {return g.label == label;});
      if (it == groups.end()) {
        groups.push_back({label, {}});
        it = groups.end() - 1;
      }
      it->values.push_back(r.rejection_pct);
    }
    return svg::box_chart("Empirical size (percent)", groups, "rejection %");
  }
  std::vector<svg::LineSeries> lines;
  for (const auto & r : res.results) {
    std::string label = r.case_name + " " + to_string(r.method) + " n=" + std::to_string(r.n);
    if (is_noisy(e)) {label += " snr=" + snr_label(r.snr);}
    auto it = std::find_if(lines.begin(), lines.end(), [&](const auto & s) {return s.label == label;});
    if (it == lines.end()) {
      lines.push_back({label, {}, {}});
      it = lines.end() - 1;
    }
    it->x.push_back(r.psi);
    it->y.push_back(r.size_corrected_pct.value_or(r.rejection_pct));
  }
  for (auto & s : lines) {
    std::vector<std::size_t> idx(s.x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {idx[i] = i;}
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {return s.x[a] < s.x[b];});
    std::vector<double> x, y;
    for (auto i : idx) {x.push_back(s.x[i]); y.push_back(s.y[i]);}
    s.x = std::move(x);
    s.y = std::move(y);
  }
  return svg::line_chart("Size-corrected power (percent)", lines, "Psi", "power %");
}

}  // namespace tarma::mc

#endif  // TARMA__MC_HPP_
