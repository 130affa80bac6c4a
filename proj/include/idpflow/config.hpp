#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace idpflow {

/// Complete run configuration. Every key has a per-scenario default; a file
/// only needs the keys it changes.
struct ScenarioConfig {
  std::string scenario;

  std::array<int, 2> cells{1, 1};
  double perturbation = 0.;
  std::uint64_t seed = 0;

  double gamma = 1.4;
  double cfl = 0.9;
  double t_final = 1.;
  long max_steps = 100000000;
  int limiter_passes = 2;
  std::string indicator = "entropy_commutator";
  std::string entropy = "harten";
  std::string nonreflecting = "characteristic";
  bool relax_bounds = true;
  bool adaptive_cfl = false;
  bool check_bounds = false;

  bool viscous = false;
  double mu = 0.;
  double lambda = 0.;
  double kappa_over_cv = 0.;
  double cg_tol = 1e-12;
  int cg_max_iter = 1000;

  /// Euler boundary kind per tag: slip, nonreflecting, dirichlet, none
  std::map<std::string, std::string> euler_bc;
  /// noslip, slip, neumann
  std::map<std::string, std::string> velocity_bc;
  /// "neumann" or a Dirichlet value of the specific internal energy
  std::map<std::string, std::optional<double>> temperature_bc;

  int threads = 1;
  std::string output_dir = "output";
  int csv_every = 1;
  int vtk_every = 0;  ///< 0 writes the final state only

  /// scenario parameters; keys depend on the scenario
  nlohmann::json params = nlohmann::json::object();

  bool operator==(const ScenarioConfig&) const = default;
};

std::vector<std::string> scenario_names();

/// Defaults of a scenario. Throws ConfigError listing the available names.
ScenarioConfig default_config(const std::string& scenario);

/// Reads "scenario" first, then overrides the defaults key by key. Unknown
/// keys and type mismatches raise ConfigError naming the key path.
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig parse_config(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& c);

/// Range and consistency checks; ConfigError on failure.
void validate(const ScenarioConfig& c);

}  // namespace idpflow
