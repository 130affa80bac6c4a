#include "idpflow/driver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "idpflow/errors.hpp"
#include "idpflow/parallel.hpp"

namespace idpflow {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

template <int dim>
State<dim> total(const Field<dim>& U, const FemGraph& g) {
  State<dim> s{};
  std::vector<double> w(U.size());
  for (int k = 0; k < dim + 2; ++k) {
    for (std::size_t i = 0; i < U.size(); ++i) w[i] = g.mass[i] * U[i][k];
    s[k] = deterministic_sum(w.data(), w.size());
  }
  return s;
}

template <int dim>
double ledger_residual(const RunState<dim>& run, const FemGraph& g) {
  const auto now = total<dim>(run.U, g);
  const auto& l = run.ledger;
  double worst = 0.;
  for (int k = 0; k < dim + 2; ++k) {
    double scale = 0.;
    for (std::size_t i = 0; i < run.U.size(); ++i) scale += g.mass[i] * std::abs(run.U[i][k]);
    const double expect = l.initial[k] - l.boundary_flux[k] + l.postprocess[k] + l.parabolic[k];
    const double d = std::abs(now[k] - expect);
    if (d > 0.) worst = std::max(worst, scale > 0. ? d / scale : d);
  }
  return worst;
}

template <int dim>
SplittingDriver<dim>::SplittingDriver(HyperbolicSolver<dim>& hyp, ParabolicSolver<dim>* par, const BoundaryMap* bm,
                                      DriverOptions opt, BodyForce force)
    : hyp_(hyp), par_(par), bm_(bm), opt_(opt), force_(std::move(force)) {
  if (!(opt_.retry_factor > 0. && opt_.retry_factor < 1.)) throw ConfigError("retry_factor must lie in (0, 1)");
}

template <int dim>
RunState<dim> SplittingDriver<dim>::start(Field<dim> U0, double t0) const {
  for (const auto& u : U0) require_admissible<dim>(u, "initial state");
  if (!(opt_.t_final > t0)) throw ConfigError("t_final must exceed the initial time");
  RunState<dim> run;
  run.t = t0;
  run.U = std::move(U0);
  run.ledger.initial = total<dim>(run.U, hyp_.graph());
  return run;
}

template <int dim>
bool SplittingDriver<dim>::finished(const RunState<dim>& run) const {
  return run.t >= opt_.t_final || run.step >= opt_.max_steps;
}

template <int dim>
StepInfo SplittingDriver<dim>::strang_step(RunState<dim>& run) {
  const auto& g = hyp_.graph();
  const double remaining = opt_.t_final - run.t;
  if (!(remaining > 0.)) throw DomainError("strang_step: already at the final time");

  StepInfo info;
  std::optional<double> dt;
  for (;;) {
    Field<dim> W = run.U;
    const auto c0 = std::chrono::steady_clock::now();
    try {
      const auto h1 = hyp_.ssprk33_step(W, run.t, bm_, dt);
      const double tau = h1.tau;
      if (2. * tau > remaining && !dt) {
        dt = 0.5 * remaining;
        continue;
      }
      info.hyperbolic_seconds = seconds_since(c0);

      State<dim> before{}, after{};
      ParabolicResult pr;
      if (par_) {
        const auto c1 = std::chrono::steady_clock::now();
        before = total<dim>(W, g);
        pr = par_->step(W, run.t, 2. * tau, force_);
        after = total<dim>(W, g);
        info.parabolic_seconds = seconds_since(c1);
      }

      const auto c2 = std::chrono::steady_clock::now();
      const auto h2 = hyp_.ssprk33_step(W, run.t + tau, bm_, tau);
      info.hyperbolic_seconds += seconds_since(c2);

      // commit
      run.U = std::move(W);
      auto& l = run.ledger;
      for (int k = 0; k < dim + 2; ++k) {
        l.boundary_flux[k] += h1.boundary_flux[k] + h2.boundary_flux[k];
        l.postprocess[k] += h1.postprocess[k] + h2.postprocess[k];
        l.parabolic[k] += after[k] - before[k];
      }
      l.source_work += pr.source_work;
      // land exactly on t_final when this was the shortened step
      run.t = dt && *dt == 0.5 * remaining ? opt_.t_final : run.t + 2. * tau;
      ++run.step;
      run.tau_history.push_back(tau);

      info.tau = tau;
      info.tau_max = std::min(h1.tau_max, h2.tau_max);
      info.max_residual = std::max(h1.max_residual, h2.max_residual);
      info.max_bounds_violation = std::max(h1.max_bounds_violation, h2.max_bounds_violation);
      info.fct = pr.fct;
      info.cg_iterations = pr.velocity_iterations + pr.energy_iterations;
      info.ledger_residual = ledger_residual<dim>(run, g);
      return info;
    } catch (const CflViolation& e) {
      if (info.retries >= opt_.max_retries) {
        std::ostringstream os;
        os << "step size control failed after " << info.retries << " retries at t = " << run.t << ": " << e.what();
        throw SolverError(os.str());
      }
      ++info.retries;
      const double base = dt ? std::min(*dt, e.tau_max()) : hyp_.options().cfl * e.tau_max();
      dt = std::min(opt_.retry_factor * base, 0.5 * remaining);
    }
  }
}

template State<1> total<1>(const Field<1>&, const FemGraph&);
template State<2> total<2>(const Field<2>&, const FemGraph&);
template double ledger_residual<1>(const RunState<1>&, const FemGraph&);
template double ledger_residual<2>(const RunState<2>&, const FemGraph&);
template class SplittingDriver<1>;
template class SplittingDriver<2>;

}  // namespace idpflow
