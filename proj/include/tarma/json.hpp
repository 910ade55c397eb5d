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

#ifndef TARMA__JSON_HPP_
#define TARMA__JSON_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tarma/core.hpp"
#include "tarma/critical_values.hpp"
#include "tarma/diagnostics.hpp"
#include "tarma/estimate.hpp"
#include "tarma/simulate.hpp"
#include "tarma/sup_lm.hpp"
#include "tarma/tarma_ls.hpp"

namespace tarma
{

using json = nlohmann::json;

NLOHMANN_JSON_SERIALIZE_ENUM(LmMethod, {{LmMethod::slmg, "sLMg"}, {LmMethod::slm, "sLM"}})
NLOHMANN_JSON_SERIALIZE_ENUM(CvSource, {{CvSource::table, "table"}, {CvSource::simulated, "simulated"}})
NLOHMANN_JSON_SERIALIZE_ENUM(SimMaConvention, {{SimMaConvention::model, "model"}, {SimMaConvention::plus, "plus"}})

namespace detail
{

template<typename T>
void put_optional(json & j, const char * key, const std::optional<T> & v)
{
  j[key] = v ? json(*v) : json(nullptr);
}

template<typename T>
void get_optional(const json & j, const char * key, std::optional<T> & v)
{
  if (!j.contains(key) || j.at(key).is_null()) {
    v.reset();
  } else {
    v = j.at(key).get<T>();
  }
}

}  // namespace detail

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SeriesMeta, start, frequency)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ArmaGarchParams, phi, theta, a, b)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TarmaGarchParams, base, psi2, r, d)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ThresholdGrid, candidates, lower_q, upper_q, pi0)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FilterOutput, eps, h, loglik)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TracePoint, r, statistic, degenerate)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TestReport, statistic, dof, p_value, description)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Correlogram, values, band)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RegimeSpec, ar, ma)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TarmaSpec, lower, upper, d)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
  RegimeCoefficients, intercept, ar, ma, intercept_se, ar_se, ma_se, n_obs)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RssPoint, r, rss)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
  TarmaLsFit, spec, r, lower, upper, rss, sigma2, first_index, residuals, trace)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
  AssumptionReport, ar_root_moduli, ma_root_moduli, ar_stationary, ma_invertible, coprime,
  positivity, persistence, persistence_ok)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TarmaAssumptionReport, upper, lower)

inline void to_json(json & j, const FittedArmaGarch & f)
{
  j = json{{"params", f.params}, {"converged", f.converged}, {"iterations", f.iterations},
    {"starts_used", f.starts_used}, {"h_presample", f.h_presample},
    {"loglik_start", f.loglik_start}, {"loglik", f.filter.loglik}, {"filter", f.filter}};
  detail::put_optional(j, "std_errors", f.std_errors);
}

inline void from_json(const json & j, FittedArmaGarch & f)
{
  j.at("params").get_to(f.params);
  j.at("converged").get_to(f.converged);
  j.at("iterations").get_to(f.iterations);
  j.at("starts_used").get_to(f.starts_used);
  j.at("h_presample").get_to(f.h_presample);
  j.at("loglik_start").get_to(f.loglik_start);
  detail::get_optional(j, "std_errors", f.std_errors);
  j.at("filter").get_to(f.filter);
}

inline void to_json(json & j, const FittedTarmaGarch & f)
{
  j = json{{"stage1", f.stage1}, {"garch", f.garch}, {"tarma", f.tarma}, {"stage1_rss", f.stage1_rss}};
}

inline void from_json(const json & j, FittedTarmaGarch & f)
{
  j.at("stage1").get_to(f.stage1);
  j.at("garch").get_to(f.garch);
  j.at("tarma").get_to(f.tarma);
  j.at("stage1_rss").get_to(f.stage1_rss);
}

inline void to_json(json & j, const SupLmResult & r)
{
  json cvs = json::array();
  for (const auto & [a, v] : r.critical_values) {cvs.push_back({{"alpha", a}, {"value", v}});}
  j = json{{"statistic", r.statistic}, {"arg_r", r.arg_r}, {"arg_index", r.arg_index},
    {"dim", r.dim}, {"pi0", r.pi0}, {"critical_values", cvs}, {"method", r.method},
    {"cv_source", r.cv_source}, {"null_params", r.null_params},
    {"null_converged", r.null_converged}, {"trace", r.trace}};
  detail::put_optional(j, "p_value", r.p_value);
}

inline void from_json(const json & j, SupLmResult & r)
{
  j.at("statistic").get_to(r.statistic);
  j.at("arg_r").get_to(r.arg_r);
  j.at("arg_index").get_to(r.arg_index);
  j.at("dim").get_to(r.dim);
  j.at("pi0").get_to(r.pi0);
  r.critical_values.clear();
  for (const auto & e : j.at("critical_values")) {
    r.critical_values[e.at("alpha").get<double>()] = e.at("value").get<double>();
  }
  j.at("method").get_to(r.method);
  j.at("cv_source").get_to(r.cv_source);
  j.at("null_params").get_to(r.null_params);
  j.at("null_converged").get_to(r.null_converged);
  j.at("trace").get_to(r.trace);
  detail::get_optional(j, "p_value", r.p_value);
}

}  // namespace tarma

#endif  // TARMA__JSON_HPP_
