#pragma once

#include <cmath>
#include <string>

#include "idpflow/gas.hpp"
#include "idpflow/graph.hpp"
#include "idpflow/parallel.hpp"
#include "idpflow/riemann.hpp"

namespace idpflow {

enum class NonReflectingMethod { godunov, characteristic };

std::string to_string(NonReflectingMethod m);
NonReflectingMethod nonreflecting_method_from_string(const std::string& s);

template <int dim>
inline Vec<dim> to_vec(const Point& p) {
  Vec<dim> v;
  for (int k = 0; k < dim; ++k) v[k] = p[k];
  return v;
}

/// Removes the normal momentum component; density and total energy are kept.
template <int dim>
State<dim> slip_project(const State<dim>& u, const Vec<dim>& n) {
  double mn = 0.;
  for (int k = 0; k < dim; ++k) mn += u[1 + k] * n[k];
  State<dim> r = u;
  for (int k = 0; k < dim; ++k) r[1 + k] -= mn * n[k];
  return r;
}

/// Value on the ray x/t = 0 of the Riemann problem (u, uD) along n.
template <int dim>
State<dim> godunov_postprocess(const State<dim>& u, const State<dim>& uD, const Vec<dim>& n,
                               const GasLaw& law) {
  const auto fan = solve_exact<dim>(u, uD, n, law);
  return sample_at_zero<dim>(fan, u, uD, n, law);
}

/// The Dirichlet data must satisfy (gamma - 1)/2 Vn^D <= a^D along n.
template <int dim>
bool characteristic_data_admissible(const State<dim>& uD, const Vec<dim>& n, const GasLaw& law) {
  const auto c = characteristic_quantities<dim>(uD, n, law);
  return 0.5 * law.gm1() * c.vn <= c.a;
}

/// Imposes the incoming characteristic quantities of uD and keeps the
/// outgoing ones of u, under a locally isentropic assumption.
template <int dim>
State<dim> characteristic_postprocess(const State<dim>& u, const State<dim>& uD, const Vec<dim>& n,
                                      const GasLaw& law) {
  const auto cu = characteristic_quantities<dim>(u, n, law);
  const auto cd = characteristic_quantities<dim>(uD, n, law);
  if (!(0.5 * law.gm1() * cd.vn <= cd.a))
    throw ConfigError("characteristic boundary: Dirichlet data violate (gamma-1)/2 Vn <= a");
  const double g = law.gamma(), gm1 = law.gm1();
  const Regime regime = classify_regime(cu.vn, cu.a);
  if (regime == Regime::supersonic_inflow) return uD;
  if (regime == Regime::supersonic_outflow) return u;

  const bool inflow = regime == Regime::subsonic_inflow;
  const double S = inflow ? cd.s : cu.s;
  const auto& vperp = inflow ? cd.vperp : cu.vperp;
  const double ap = 0.25 * gm1 * (cu.c3 - cd.c1);
  const double vn = 0.5 * (cd.c1 + cu.c3);
  const double rho = std::pow(ap * ap / (g * S), 1. / gm1);
  const double p = S * std::pow(rho, g);
  State<dim> r;
  r[0] = rho;
  double v2 = 0.;
  for (int k = 0; k < dim; ++k) {
    const double v = vperp[k] + vn * n[k];
    r[1 + k] = rho * v;
    v2 += v * v;
  }
  r[dim + 1] = p / gm1 + 0.5 * rho * v2;
  return r;
}

template <int dim>
State<dim> dirichlet_postprocess(const State<dim>& /*u*/, const State<dim>& uD) {
  return uD;
}

/// Post-processes the boundary nodes of a stage result at collocation time
/// t. Per node the order is slip (with n_s), then non-reflecting (with
/// n_nr), then Dirichlet.
template <int dim>
void apply_all(Field<dim>& U, const BoundaryMap& bm, double t, const GasLaw& law,
               NonReflectingMethod method) {
  const int nb = static_cast<int>(bm.nodes.size());
  ExceptionTrap trap;
#pragma omp parallel for schedule(static)
  for (int b = 0; b < nb; ++b) {
    trap.run([&] {
      const auto& node = bm.nodes[b];
      auto& u = U[node.node];
      if (node.slip) u = slip_project<dim>(u, to_vec<dim>(node.n_s));
      if (node.nonreflecting || node.dirichlet) {
        State<dim> uD;
        bm.far_field(node.x, t, uD.data());
        if (node.nonreflecting) {
          const auto n = to_vec<dim>(node.n_nr);
          u = method == NonReflectingMethod::godunov ? godunov_postprocess<dim>(u, uD, n, law)
                                                     : characteristic_postprocess<dim>(u, uD, n, law);
        }
        if (node.dirichlet) u = dirichlet_postprocess<dim>(u, uD);
      }
    });
  }
  trap.rethrow();
}

}  // namespace idpflow
