#include "idpflow/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "idpflow/errors.hpp"
#include "idpflow/graph.hpp"
#include "idpflow/hyperbolic.hpp"
#include "idpflow/parabolic.hpp"

namespace idpflow {

using nlohmann::json;

std::vector<std::string> scenario_names() { return {"sod", "becker", "vortex", "shocktube", "box"}; }

ScenarioConfig default_config(const std::string& scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  if (scenario == "sod") {
    c.cells = {100, 1};
    c.t_final = 0.2;
    c.euler_bc = {{"left", "dirichlet"}, {"right", "dirichlet"}};
    c.params = {{"x0", 0.5}, {"left", {1., 0., 1.}}, {"right", {0.125, 0., 0.1}}};
  } else if (scenario == "becker") {
    c.cells = {64, 64};
    c.cfl = 0.3;
    c.t_final = 0.5;
    c.viscous = true;
    c.mu = 0.01;
    c.lambda = 0.;
    c.kappa_over_cv = c.gamma * 4. / 3. * c.mu;
    c.euler_bc = {{"left", "dirichlet"}, {"right", "dirichlet"}};
    c.velocity_bc = {{"left", "neumann"}, {"right", "neumann"}};
    c.temperature_bc = {{"left", std::nullopt}, {"right", std::nullopt}};
    c.params = {{"mach", 3.}, {"rho0", 1.}, {"v0", 1.}, {"v_galilean", 0.125}, {"x0", 0.5}};
  } else if (scenario == "vortex") {
    c.cells = {80, 80};
    c.cfl = 0.75;
    c.t_final = 4.;
    c.euler_bc = {{"left", "nonreflecting"}, {"right", "nonreflecting"}, {"bottom", "nonreflecting"},
                  {"top", "nonreflecting"}};
    c.params = {{"mach", 0.5}, {"vbar", 0.25}, {"r0", 0.1}, {"center", {0., 0.}}, {"v_inf", 1.}, {"rho_inf", 1.}};
  } else if (scenario == "shocktube") {
    c.cells = {512, 256};
    c.t_final = 1.;
    c.viscous = true;
    c.mu = 1e-3;
    c.lambda = 0.;
    c.kappa_over_cv = c.gamma * c.mu / 0.73;
    c.euler_bc = {{"left", "slip"}, {"right", "slip"}, {"bottom", "slip"}, {"top", "slip"}};
    c.velocity_bc = {{"left", "noslip"}, {"right", "noslip"}, {"bottom", "noslip"}, {"top", "slip"}};
    c.temperature_bc = {{"left", std::nullopt}, {"right", std::nullopt}, {"bottom", std::nullopt},
                        {"top", std::nullopt}};
    c.params = {{"rho_left", 120.}, {"rho_right", 1.2}, {"x0", 0.5}, {"rho_ref", 1.}, {"v_ref", 1.},
                {"cf_tag", "bottom"}};
  } else if (scenario == "box") {
    c.cells = {32, 32};
    c.t_final = 1.;
    c.euler_bc = {{"left", "slip"}, {"right", "slip"}, {"bottom", "slip"}, {"top", "slip"}};
    c.params = {{"amplitude", 0.3}};
  } else {
    std::string names;
    for (const auto& n : scenario_names()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("unknown scenario '" + scenario + "' (available: " + names + ")");
  }
  return c;
}

namespace {

template <class T>
T get(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + path + "': wrong type (got " + std::string(j.type_name()) + ")");
  }
}

void merge_params(json& params, const json& given, const std::string& path) {
  if (!given.is_object()) throw ConfigError("config key '" + path + "': expected an object");
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string key = path + "." + it.key();
    if (!params.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    const auto& def = params[it.key()];
    const bool ok = (def.is_number() && it->is_number()) || (def.is_string() && it->is_string()) ||
                    (def.is_array() && it->is_array() && it->size() == def.size() &&
                     std::all_of(it->begin(), it->end(), [](const json& v) { return v.is_number(); }));
    if (!ok) throw ConfigError("config key '" + key + "': expected " + std::string(def.type_name()) +
                               (def.is_array() ? " of " + std::to_string(def.size()) + " numbers" : ""));
    params[it.key()] = *it;
  }
}

std::map<std::string, std::string> string_map(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError("config key '" + path + "': expected an object");
  std::map<std::string, std::string> m;
  for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = get<std::string>(*it, path + "." + it.key());
  return m;
}

}  // namespace

ScenarioConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  if (!j.contains("scenario")) throw ConfigError("config key 'scenario' is required");
  ScenarioConfig c = default_config(get<std::string>(j["scenario"], "scenario"));

  using Setter = std::function<void(const json&)>;
  const std::map<std::string, Setter> setters = {
      {"scenario", [](const json&) {}},
      {"cells",
       [&](const json& v) {
         if (!v.is_array() || v.empty() || v.size() > 2) throw ConfigError("config key 'cells': expected 1 or 2 integers");
         c.cells = {get<int>(v[0], "cells[0]"), v.size() > 1 ? get<int>(v[1], "cells[1]") : 1};
       }},
      {"perturbation", [&](const json& v) { c.perturbation = get<double>(v, "perturbation"); }},
      {"seed", [&](const json& v) { c.seed = get<std::uint64_t>(v, "seed"); }},
      {"gamma", [&](const json& v) { c.gamma = get<double>(v, "gamma"); }},
      {"cfl", [&](const json& v) { c.cfl = get<double>(v, "cfl"); }},
      {"t_final", [&](const json& v) { c.t_final = get<double>(v, "t_final"); }},
      {"max_steps", [&](const json& v) { c.max_steps = get<long>(v, "max_steps"); }},
      {"limiter_passes", [&](const json& v) { c.limiter_passes = get<int>(v, "limiter_passes"); }},
      {"indicator", [&](const json& v) { c.indicator = get<std::string>(v, "indicator"); }},
      {"entropy", [&](const json& v) { c.entropy = get<std::string>(v, "entropy"); }},
      {"nonreflecting", [&](const json& v) { c.nonreflecting = get<std::string>(v, "nonreflecting"); }},
      {"relax_bounds", [&](const json& v) { c.relax_bounds = get<bool>(v, "relax_bounds"); }},
      {"adaptive_cfl", [&](const json& v) { c.adaptive_cfl = get<bool>(v, "adaptive_cfl"); }},
      {"check_bounds", [&](const json& v) { c.check_bounds = get<bool>(v, "check_bounds"); }},
      {"viscous", [&](const json& v) { c.viscous = get<bool>(v, "viscous"); }},
      {"mu", [&](const json& v) { c.mu = get<double>(v, "mu"); }},
      {"lambda", [&](const json& v) { c.lambda = get<double>(v, "lambda"); }},
      {"kappa_over_cv", [&](const json& v) { c.kappa_over_cv = get<double>(v, "kappa_over_cv"); }},
      {"cg_tol", [&](const json& v) { c.cg_tol = get<double>(v, "cg_tol"); }},
      {"cg_max_iter", [&](const json& v) { c.cg_max_iter = get<int>(v, "cg_max_iter"); }},
      {"euler_bc", [&](const json& v) { c.euler_bc = string_map(v, "euler_bc"); }},
      {"velocity_bc", [&](const json& v) { c.velocity_bc = string_map(v, "velocity_bc"); }},
      {"temperature_bc",
       [&](const json& v) {
         if (!v.is_object()) throw ConfigError("config key 'temperature_bc': expected an object");
         c.temperature_bc.clear();
         for (auto it = v.begin(); it != v.end(); ++it) {
           const std::string path = "temperature_bc." + it.key();
           if (it->is_string()) {
             if (it->get<std::string>() != "neumann")
               throw ConfigError("config key '" + path + "': expected \"neumann\" or a Dirichlet value");
             c.temperature_bc[it.key()] = std::nullopt;
           } else {
             c.temperature_bc[it.key()] = get<double>(*it, path);
           }
         }
       }},
      {"threads", [&](const json& v) { c.threads = get<int>(v, "threads"); }},
      {"output_dir", [&](const json& v) { c.output_dir = get<std::string>(v, "output_dir"); }},
      {"csv_every", [&](const json& v) { c.csv_every = get<int>(v, "csv_every"); }},
      {"vtk_every", [&](const json& v) { c.vtk_every = get<int>(v, "vtk_every"); }},
      {"params", [&](const json& v) { merge_params(c.params, v, "params"); }},
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto s = setters.find(it.key());
    if (s == setters.end()) throw ConfigError("unknown config key '" + it.key() + "'");
    s->second(*it);
  }
  validate(c);
  return c;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

json to_json(const ScenarioConfig& c) {
  json t = json::object();
  for (const auto& [tag, v] : c.temperature_bc) t[tag] = v ? json(*v) : json("neumann");
  return {{"scenario", c.scenario},
          {"cells", {c.cells[0], c.cells[1]}},
          {"perturbation", c.perturbation},
          {"seed", c.seed},
          {"gamma", c.gamma},
          {"cfl", c.cfl},
          {"t_final", c.t_final},
          {"max_steps", c.max_steps},
          {"limiter_passes", c.limiter_passes},
          {"indicator", c.indicator},
          {"entropy", c.entropy},
          {"nonreflecting", c.nonreflecting},
          {"relax_bounds", c.relax_bounds},
          {"adaptive_cfl", c.adaptive_cfl},
          {"check_bounds", c.check_bounds},
          {"viscous", c.viscous},
          {"mu", c.mu},
          {"lambda", c.lambda},
          {"kappa_over_cv", c.kappa_over_cv},
          {"cg_tol", c.cg_tol},
          {"cg_max_iter", c.cg_max_iter},
          {"euler_bc", c.euler_bc},
          {"velocity_bc", c.velocity_bc},
          {"temperature_bc", t},
          {"threads", c.threads},
          {"output_dir", c.output_dir},
          {"csv_every", c.csv_every},
          {"vtk_every", c.vtk_every},
          {"params", c.params}};
}

void validate(const ScenarioConfig& c) {
  auto fail = [](const std::string& key, const std::string& msg) { throw ConfigError("config key '" + key + "': " + msg); };
  if (!(c.gamma > 1.) || !std::isfinite(c.gamma)) fail("gamma", "must be > 1");
  if (!(c.cfl > 0.)) fail("cfl", "must be positive");
  if (c.cfl > 1. && !c.adaptive_cfl) fail("cfl", "values above 1 need adaptive_cfl");
  if (!(c.t_final > 0.)) fail("t_final", "must be positive");
  if (c.max_steps < 1) fail("max_steps", "must be >= 1");
  if (c.limiter_passes < 1) fail("limiter_passes", "must be >= 1");
  if (c.cells[0] < 1 || c.cells[1] < 1) fail("cells", "must be >= 1");
  if (!(c.perturbation >= 0. && c.perturbation < 0.5)) fail("perturbation", "must lie in [0, 0.5)");
  if (c.threads < 1) fail("threads", "must be >= 1");
  if (c.csv_every < 1) fail("csv_every", "must be >= 1");
  if (c.vtk_every < 0) fail("vtk_every", "must be >= 0");
  if (!(c.cg_tol > 0.)) fail("cg_tol", "must be positive");
  if (c.cg_max_iter < 1) fail("cg_max_iter", "must be >= 1");
  indicator_kind_from_string(c.indicator);
  entropy_kind_from_string(c.entropy);
  nonreflecting_method_from_string(c.nonreflecting);
  for (const auto& [tag, k] : c.euler_bc) boundary_kind_from_string(k);
  for (const auto& [tag, k] : c.velocity_bc) velocity_bc_from_string(k);
  for (const auto& [tag, v] : c.temperature_bc)
    if (v && !(*v > 0.)) fail("temperature_bc." + tag, "Dirichlet internal energy must be positive");
  if (c.viscous) ViscousModel{c.mu, c.lambda, c.kappa_over_cv}.validate();
}

}  // namespace idpflow
