#pragma once

#include <optional>
#include <string>
#include <vector>

#include "idpflow/boundary.hpp"
#include "idpflow/gas.hpp"
#include "idpflow/graph.hpp"
#include "idpflow/riemann.hpp"

namespace idpflow {

enum class IndicatorKind { entropy_commutator, constant_one, constant_zero };

std::string to_string(IndicatorKind k);
IndicatorKind indicator_kind_from_string(const std::string& s);
EntropyKind entropy_kind_from_string(const std::string& s);
std::string to_string(EntropyKind k);

struct HyperbolicOptions {
  double cfl = 0.9;
  int limiter_passes = 2;
  IndicatorKind indicator = IndicatorKind::entropy_commutator;
  EntropyKind entropy = EntropyKind::harten;
  NonReflectingMethod nonreflecting = NonReflectingMethod::characteristic;
  /// false replaces b_ij by zero (lumped-mass high-order fluxes).
  bool mass_correction = true;
  /// Allow cfl > 1: admissibility of the low-order update is checked
  /// instead of the step bound.
  bool adaptive_cfl = false;
  /// Widen the local bounds by r_i = (m_i / |D|)^(3 / (2 d)) relative to
  /// their values; without it smooth extrema and isentropic regions are
  /// clipped to first order.
  bool relax_bounds = true;
  /// Record the worst local-bound violation after limiting.
  bool check_bounds = false;
};

struct LimiterBounds {
  std::vector<double> rho_min;
  std::vector<double> rho_max;
  std::vector<double> phi_min;
};

/// Largest l in [0, 1] (up to a tiny safety margin) such that u + l p
/// satisfies rho_min <= rho <= rho_max and eps - phi_min rho^gamma >= 0.
/// u is assumed to satisfy the bounds.
template <int dim>
double limiter_value(const State<dim>& u, const State<dim>& p, double rho_min, double rho_max,
                     double phi_min, const GasLaw& law);

template <int dim>
struct EulerResult {
  double tau = 0.;
  double tau_max = 0.;          ///< admissible step of this stage (cfl = 1)
  State<dim> boundary_flux{};   ///< sum over boundary nodes of m_i^b f(U_i) n_i
  double residual = 0.;         ///< relative defect of the conservation balance
  double bounds_violation = 0.; ///< only with check_bounds
};

template <int dim>
struct SsprkResult {
  double tau = 0.;
  double tau_max = 0.;
  State<dim> boundary_flux{};  ///< tau-weighted boundary flux of the three stages
  State<dim> postprocess{};    ///< weighted change of sum m_i U_i due to boundary post-processing
  double max_residual = 0.;
  double max_bounds_violation = 0.;
};

/// Explicit convex-limited update on a finite element graph. Holds the
/// per-stage workspace; not thread-safe itself, its loops are parallel.
template <int dim>
class HyperbolicSolver {
 public:
  using S = State<dim>;

  HyperbolicSolver(const FemGraph& g, const GasLaw& law, HyperbolicOptions opt = {});

  const HyperbolicOptions& options() const { return opt_; }
  HyperbolicOptions& options() { return opt_; }
  const FemGraph& graph() const { return g_; }
  const GasLaw& law() const { return law_; }

  // Individual stages of one forward Euler step, in call order.

  /// Caches pressure, flux and entropy data of U. Throws DomainError when a
  /// node is not admissible.
  void prepare(const Field<dim>& U);
  /// alpha_i in [0, 1].
  const std::vector<double>& compute_indicator(const Field<dim>& U);
  /// d^L on the sparsity (diagonal = minus the off-diagonal row sum).
  /// Returns tau_max = min_i m_i / (2 |d_ii|).
  double compute_viscosity(const Field<dim>& U);
  /// U^L, the limiter bounds and the high-order fluxes F^H.
  void low_order_update(const Field<dim>& U, double tau);
  /// P_ij.
  void compute_corrections(const Field<dim>& U, double tau);
  /// Symmetrized limiters against the given baseline.
  void compute_limiters(const Field<dim>& base);
  /// Limited update with the given number of passes, starting from U^L.
  void apply_limited_update(Field<dim>& out, int passes);

  /// Full forward Euler step. dt overrides the step size; it must not
  /// exceed the admissible step of this stage (CflViolation otherwise).
  EulerResult<dim> forward_euler_step(const Field<dim>& U, Field<dim>& out,
                                      std::optional<double> dt = std::nullopt);

  /// SSPRK(3,3) step from time t. Boundary post-processing is applied after
  /// each stage at times t + tau, t + tau/2, t + tau when bm is given.
  SsprkResult<dim> ssprk33_step(Field<dim>& U, double t, const BoundaryMap* bm,
                                std::optional<double> dt = std::nullopt);

  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<double>& d_low() const { return dL_; }
  /// d^H = (alpha_i + alpha_j) / 2 d^L, evaluated on demand.
  std::vector<double> d_high() const;
  const LimiterBounds& bounds() const { return bounds_; }
  const Field<dim>& low_order() const { return UL_; }
  const Field<dim>& high_order_flux() const { return FH_; }
  const std::vector<S>& corrections() const { return P_; }
  const std::vector<double>& limiters() const { return ell_; }
  /// Unlimited high-order update U^L + sum_j lambda_i P_ij.
  Field<dim> high_order_update() const;
  /// int_Gamma phi_i n per node (column sums of c).
  const std::vector<Vec<dim>>& boundary_normals() const { return bnormal_; }

  /// Largest relative violation of the current bounds by U (0 if none).
  double bounds_violation(const Field<dim>& U) const;

 private:
  struct NodeCache {
    Flux<dim> f;
    WavespeedNode w;
    Vec<dim> v;
    double phi;
    double eta;
    S deta;
  };

  const FemGraph& g_;
  GasLaw law_;
  WavespeedBound bound_;
  HyperbolicOptions opt_;
  std::vector<Vec<dim>> bnormal_;
  std::vector<int> bnodes_;

  std::vector<NodeCache> cache_;
  std::vector<double> alpha_;
  std::vector<double> dL_;
  Field<dim> UL_;
  Field<dim> FH_;
  LimiterBounds bounds_;
  std::vector<S> P_;
  std::vector<double> lraw_;
  std::vector<double> ell_;
  std::vector<double> scale_;
  std::vector<double> relax_;  ///< remaining fraction of P_ij between passes
};

/// Shu-Osher form of SSPRK(3,3) for any linear space T. euler(w) returns
/// w + tau L(w); post(w, time) post-processes a stage at its collocation
/// time. tau is read after the first stage, which may set it.
template <class T, class Axpby, class Euler, class Post>
T ssprk33_combine(const T& u, double t, const double& tau, Axpby axpby, Euler euler, Post post) {
  T w1 = euler(u);
  post(w1, t + tau);
  T w2 = axpby(0.75, u, 0.25, euler(w1));
  post(w2, t + 0.5 * tau);
  T w3 = axpby(1. / 3., u, 2. / 3., euler(w2));
  post(w3, t + tau);
  return w3;
}

}  // namespace idpflow
