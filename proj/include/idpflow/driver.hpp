#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "idpflow/hyperbolic.hpp"
#include "idpflow/parabolic.hpp"

namespace idpflow {

struct DriverOptions {
  double t_final = 1.;
  long max_steps = 100000000;
  /// On CflViolation the step is retried with tau scaled by this factor.
  double retry_factor = 0.8;
  int max_retries = 20;
};

/// Accumulated conservation bookkeeping since t0: sum_i m_i U_i(t) should
/// equal initial - boundary_flux + postprocess + parabolic.
template <int dim>
struct Ledger {
  State<dim> initial{};
  State<dim> boundary_flux{};  ///< tau-weighted sum of m_i^b f(U_i) n_i
  State<dim> postprocess{};    ///< change of sum m_i U_i due to boundary post-processing
  State<dim> parabolic{};      ///< change of sum m_i U_i in parabolic steps
  double source_work = 0.;     ///< body-force work inside parabolic steps
};

template <int dim>
struct RunState {
  double t = 0.;
  long step = 0;
  Field<dim> U;
  Ledger<dim> ledger;
  std::vector<double> tau_history;  ///< tau_n of each Strang step (time advances by 2 tau_n)
};

struct StepInfo {
  double tau = 0.;                 ///< hyperbolic step size; the Strang step covers 2 tau
  double tau_max = 0.;
  int retries = 0;
  double max_residual = 0.;        ///< worst per-Euler-stage conservation defect
  double max_bounds_violation = 0.;
  double ledger_residual = 0.;
  bool fct = false;
  int cg_iterations = 0;
  double hyperbolic_seconds = 0.;
  double parabolic_seconds = 0.;
};

template <int dim>
State<dim> total(const Field<dim>& U, const FemGraph& g);

/// Relative defect of the ledger identity, scaled per component by
/// sum_i m_i |U_i|.
template <int dim>
double ledger_residual(const RunState<dim>& run, const FemGraph& g);

/// Strang composition H(tau) P(2 tau) H(tau). Without a parabolic solver
/// the parabolic substep is skipped (Euler-only mode).
template <int dim>
class SplittingDriver {
 public:
  SplittingDriver(HyperbolicSolver<dim>& hyp, ParabolicSolver<dim>* par, const BoundaryMap* bm,
                  DriverOptions opt = {}, BodyForce force = {});

  RunState<dim> start(Field<dim> U0, double t0 = 0.) const;
  /// One Strang step; the last step is shortened to land on t_final.
  StepInfo strang_step(RunState<dim>& run);
  bool finished(const RunState<dim>& run) const;

  const DriverOptions& options() const { return opt_; }
  DriverOptions& options() { return opt_; }

 private:
  HyperbolicSolver<dim>& hyp_;
  ParabolicSolver<dim>* par_;
  const BoundaryMap* bm_;
  DriverOptions opt_;
  BodyForce force_;
};

}  // namespace idpflow
