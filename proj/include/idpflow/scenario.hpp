#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "idpflow/config.hpp"
#include "idpflow/diagnostics.hpp"
#include "idpflow/driver.hpp"
#include "idpflow/graph.hpp"
#include "idpflow/hyperbolic.hpp"
#include "idpflow/mesh.hpp"
#include "idpflow/parabolic.hpp"
#include "json.hpp"

namespace idpflow {

/// Steady viscous shock profile in the shock frame, for a gas with
/// kappa / c_v = gamma mu_eff, mu_eff = 4/3 mu + lambda. The upstream state
/// (rho0, v0 > 0, Mach number) sits at x -> -infinity.
class BeckerProfile {
 public:
  BeckerProfile(double mach, double rho0, double v0, double mu_eff, double gamma);

  double v0() const { return v0_; }
  double v1() const { return v1_; }
  double rho0() const { return rho0_; }
  double p0() const { return p0_; }
  double mass_flux() const { return m0_; }
  double total_enthalpy() const { return H0_; }

  /// Position of the velocity level v in (v1, v0); x(v_mid) = 0.
  double position(double v) const;
  /// Inverse of position(), by bisection.
  double velocity(double x) const;

  struct Sample {
    double rho, v, e;  ///< shock-frame velocity, specific internal energy
  };
  Sample at(double x) const;

 private:
  double gamma_, rho0_, v0_, v1_, m0_, p0_, H0_, vm_, scale_;
};

/// (M, vbar) of the four vortex cases "i" .. "iv".
std::pair<double, double> vortex_preset(const std::string& name);

/// 1 for sod, 2 otherwise. Throws ConfigError for unknown names.
int scenario_dim(const std::string& name);

/// Everything a run needs, built from a config. Members reference each
/// other's addresses (graph -> mesh), so a Scenario is not copyable.
template <int dim>
struct Scenario {
  explicit Scenario(const ScenarioConfig& c);
  Scenario(const Scenario&) = delete;
  Scenario& operator=(const Scenario&) = delete;

  ScenarioConfig config;
  GasLaw law;
  Mesh mesh;
  CellValues cv;
  FemGraph g;
  BoundaryMap bm;
  Field<dim> U0;

  /// exact(x, t), empty when the scenario has none
  std::function<State<dim>(const Point&, double)> exact;

  bool viscous = false;
  ViscousModel model;
  ParabolicBoundary pbc;
  BodyForce force;

  bool vortex = false;
  Vec<dim> v_inf{};

  std::string cf_tag;  ///< empty: no skin friction output
  double rho_ref = 1.;
  double v_ref = 1.;
};

/// Scenario plus the solver stack, ready to step.
template <int dim>
class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& c);

  const Scenario<dim>& scenario() const { return *sc_; }
  HyperbolicSolver<dim>& hyperbolic() { return *hyp_; }
  ParabolicSolver<dim>* parabolic() { return par_.get(); }
  SplittingDriver<dim>& driver() { return *drv_; }
  RunState<dim>& state() { return run_; }
  const RunState<dim>& state() const { return run_; }

  StepInfo step() { return drv_->strang_step(run_); }
  bool finished() const { return drv_->finished(run_); }

  /// Exact solution at the current time; empty when there is none.
  ExactSolution<dim> exact_now() const;

 private:
  std::unique_ptr<Scenario<dim>> sc_;
  std::unique_ptr<HyperbolicSolver<dim>> hyp_;
  std::unique_ptr<ParabolicSolver<dim>> par_;
  std::unique_ptr<SplittingDriver<dim>> drv_;
  RunState<dim> run_;
};

/// Runs to t_final and writes into config.output_dir:
///   timeseries.csv  per-step totals and diagnostics (no wall times)
///   final.vtk       rho, m, E, p, schlieren
///   cf.csv          skin friction, when the scenario defines a wall
///   summary.json    everything above in compact form plus timings
/// Returns the summary.
nlohmann::json run_scenario(const ScenarioConfig& config);

/// Wall time per step split into hyperbolic and parabolic stages, for
/// each thread count. Runs `steps` Strang steps per count.
nlohmann::json bench_scenario(const ScenarioConfig& config, const std::vector<int>& threads = {1, 2, 4, 8},
                              int steps = 10);

}  // namespace idpflow
