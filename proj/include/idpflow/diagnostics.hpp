#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "idpflow/gas.hpp"
#include "idpflow/graph.hpp"
#include "idpflow/mesh.hpp"
#include "idpflow/parabolic.hpp"

namespace idpflow {

struct ErrorNorms {
  double l1 = 0.;
  double l2 = 0.;
  double linf = 0.;
};

template <int dim>
using ExactSolution = std::function<State<dim>(const Point& x)>;

/// Consolidated error: the sum over rho, m (Euclidean norm per node) and E
/// of the relative L^p errors, nodal quadrature with weights m_i.
/// Throws DomainError when an exact component has zero norm.
template <int dim>
ErrorNorms error_norms(const Field<dim>& U, const Mesh& mesh, const FemGraph& g, const ExactSolution<dim>& exact);

/// L1 error of the density alone, weights m_i.
template <int dim>
double density_l1_error(const Field<dim>& U, const Mesh& mesh, const FemGraph& g, const ExactSolution<dim>& exact);

struct WallSample {
  Point x;
  double value;
};

/// Skin friction on the faces carrying `tag`, at the boundary nodes sorted
/// by their x coordinate. The tangent is t = (-n_y, n_x).
std::vector<WallSample> skin_friction(const Field<2>& U, const Mesh& mesh, const ViscousModel& model,
                                      const std::string& tag, double rho_inf, double v_inf);

/// max_i |curl v|_i with the nodal curl (1/m_i) sum_j c_ij x v_j.
double max_vorticity(const Field<2>& U, const FemGraph& g);

struct VortexDiagnostics {
  double delta1 = 0.;
  double delta2 = 0.;
};

VortexDiagnostics vortex_diagnostics(const Field<2>& U, const FemGraph& g, const Vec<2>& v_inf, double curl0);

/// exp(-beta (g_i - g_min) / (g_max - g_min)) with g_i = |sum_j (rho_j - rho_i) c_ij| / m_i;
/// 1 everywhere for constant density.
template <int dim>
std::vector<double> schlieren(const Field<dim>& U, const FemGraph& g, double beta = 10.);

/// Time average of the pressure on the boundary nodes of a tag.
class PressureAverager {
 public:
  PressureAverager(const Mesh& mesh, const std::string& tag);
  void add(const Field<2>& U, const GasLaw& law, double weight);
  /// (x_i, C_p) per node; throws DomainError when nothing was accumulated.
  std::vector<WallSample> coefficient(double p_inf, double rho_inf, double v_inf) const;

 private:
  std::vector<int> nodes_;
  std::vector<Point> x_;
  std::vector<double> sum_;
  double weight_ = 0.;
};

}  // namespace idpflow
