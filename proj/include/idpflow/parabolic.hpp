#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "idpflow/gas.hpp"
#include "idpflow/graph.hpp"
#include "idpflow/mesh.hpp"

namespace idpflow {

/// Constant transport coefficients. kappa is c_v^-1 kappa, acting on the
/// specific internal energy.
struct ViscousModel {
  double mu = 0.;
  double lambda = 0.;
  double kappa = 0.;

  void validate() const;
  bool inviscid() const { return mu == 0. && lambda == 0. && kappa == 0.; }
};

enum class VelocityBC { noslip, slip, neumann };
enum class TemperatureBC { dirichlet, neumann };

std::string to_string(VelocityBC b);
std::string to_string(TemperatureBC b);
VelocityBC velocity_bc_from_string(const std::string& s);
TemperatureBC temperature_bc_from_string(const std::string& s);

struct ParabolicBoundary {
  /// per tag; missing tags default to Neumann
  std::map<std::string, VelocityBC> velocity;
  std::map<std::string, TemperatureBC> temperature;
  /// specific internal energy on Dirichlet nodes, e(x, t)
  std::function<double(const Point&, double)> boundary_energy;
};

/// Body force per unit volume f(x, t), written into f[0 .. d-1].
using BodyForce = std::function<void(const Point& x, double t, double* f)>;

struct CgOptions {
  double tol = 1e-12;
  int max_iter = 1000;
};

struct CgResult {
  int iterations = 0;
  double residual = 0.;  ///< final relative residual
  std::vector<double> history;
};

/// Preconditioned conjugate gradients with a diagonal preconditioner and
/// fixed-order reductions. Stops when |r| <= tol |b|. Throws SolverError
/// with the residual history when max_iter is exceeded.
CgResult cg_solve(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                  const std::vector<double>& diag, const std::vector<double>& rhs, std::vector<double>& x,
                  const CgOptions& opt);

struct ParabolicResult {
  int velocity_iterations = 0;
  int energy_iterations = 0;
  bool fct = false;          ///< the limited low-order fallback was used
  double source_work = 0.;   ///< tau sum_i m_i F_i . V_i^{n+1/2}
  double min_e_before = 0.;
  double min_e_after = 0.;
};

/// Crank-Nicolson parabolic substep with matrix-free cell-loop operators.
template <int dim>
class ParabolicSolver {
 public:
  ParabolicSolver(const Mesh& mesh, const CellValues& cv, const FemGraph& g, const GasLaw& law,
                  ViscousModel model, ParabolicBoundary bc, CgOptions cg = {});

  const ViscousModel& model() const { return model_; }

  /// y_{i,k} = a(w, phi_i e_k), no constraints. Node-major layout [i * dim + k].
  void apply_velocity_operator(const std::vector<double>& w, std::vector<double>& y) const;
  /// y_i = b(e, phi_i), no constraints.
  void apply_conduction_operator(const std::vector<double>& e, std::vector<double>& y) const;
  /// K_i = (1 / m_i) int s(v) : e(v) phi_i.
  std::vector<double> viscous_heating(const std::vector<double>& v) const;

  /// Constrained velocity components, [i * dim + k].
  const std::vector<char>& velocity_constraints() const { return vfix_; }
  const std::vector<char>& energy_constraints() const { return efix_; }

  /// Advances U by tau (the parabolic step size, twice the hyperbolic one)
  /// from time t. The force is evaluated at t + tau / 2.
  ParabolicResult step(Field<dim>& U, double t, double tau, const BodyForce& force = {});

  /// Always take the limited low-order path (testing).
  bool force_fct = false;
  /// Limit whenever min e^{n+1} drops below min e^n; false limits only when
  /// it drops below zero.
  bool min_principle_trigger = true;

 private:
  const Mesh& mesh_;
  const CellValues& cv_;
  const FemGraph& g_;
  GasLaw law_;
  ViscousModel model_;
  ParabolicBoundary bc_;
  CgOptions cgopt_;
  std::vector<char> vfix_;
  std::vector<char> efix_;
};

}  // namespace idpflow
