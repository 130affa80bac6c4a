#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "idpflow/errors.hpp"

namespace idpflow {

template <int dim>
using Vec = std::array<double, dim>;

/// Conserved state (rho, m_1..m_d, E).
template <int dim>
using State = std::array<double, dim + 2>;

/// Nodal field of conserved states.
template <int dim>
using Field = std::vector<State<dim>>;

/// Flux matrix, one d-vector per conserved component.
template <int dim>
using Flux = std::array<Vec<dim>, dim + 2>;

template <int dim>
inline double dot(const Vec<dim>& a, const Vec<dim>& b) {
  double s = 0.;
  for (int k = 0; k < dim; ++k) s += a[k] * b[k];
  return s;
}

template <int dim>
inline double norm(const Vec<dim>& a) {
  return std::sqrt(dot<dim>(a, a));
}

/// Ideal gas with constant ratio of specific heats.
class GasLaw {
 public:
  explicit GasLaw(double gamma = 1.4);

  double gamma() const { return gamma_; }
  double gm1() const { return gm1_; }

  /// rho^gamma
  double pow_gamma(double rho) const { return std::pow(rho, gamma_); }

 private:
  double gamma_;
  double gm1_;
};

// ---------------------------------------------------------------------------
// Raw accessors. These do not check admissibility and are meant for kernels.

template <int dim>
inline Vec<dim> momentum(const State<dim>& u) {
  Vec<dim> m;
  for (int k = 0; k < dim; ++k) m[k] = u[1 + k];
  return m;
}

template <int dim>
inline Vec<dim> velocity(const State<dim>& u) {
  Vec<dim> v;
  const double inv = 1. / u[0];
  for (int k = 0; k < dim; ++k) v[k] = u[1 + k] * inv;
  return v;
}

template <int dim>
inline double momentum_norm_sq(const State<dim>& u) {
  double s = 0.;
  for (int k = 0; k < dim; ++k) s += u[1 + k] * u[1 + k];
  return s;
}

/// Internal energy per unit volume, E - |m|^2 / (2 rho).
template <int dim>
inline double internal_energy(const State<dim>& u) {
  return u[dim + 1] - 0.5 * momentum_norm_sq<dim>(u) / u[0];
}

/// Specific internal energy e = epsilon / rho.
template <int dim>
inline double specific_internal_energy(const State<dim>& u) {
  return internal_energy<dim>(u) / u[0];
}

template <int dim>
inline double pressure_raw(const State<dim>& u, const GasLaw& law) {
  return law.gm1() * internal_energy<dim>(u);
}

template <int dim>
inline Flux<dim> flux_raw(const State<dim>& u, const GasLaw& law) {
  const double p = pressure_raw<dim>(u, law);
  const auto v = velocity<dim>(u);
  Flux<dim> f;
  for (int l = 0; l < dim; ++l) f[0][l] = u[1 + l];
  for (int k = 0; k < dim; ++k)
    for (int l = 0; l < dim; ++l) f[1 + k][l] = v[l] * u[1 + k] + (k == l ? p : 0.);
  for (int l = 0; l < dim; ++l) f[dim + 1][l] = v[l] * (u[dim + 1] + p);
  return f;
}

/// f(u) c for a d-vector c.
template <int dim>
inline State<dim> flux_dot(const Flux<dim>& f, const Vec<dim>& c) {
  State<dim> r;
  for (int k = 0; k < dim + 2; ++k) r[k] = dot<dim>(f[k], c);
  return r;
}

// ---------------------------------------------------------------------------
// Checked operations.

/// Lower floors for the admissibility test. Zero floors give the strict set.
struct AdmissibilityFloors {
  double rho = 0.;
  double eps = 0.;
};

template <int dim>
inline bool is_admissible(const State<dim>& u, const AdmissibilityFloors& fl = {}) {
  if (!(u[0] > fl.rho) || !std::isfinite(u[0])) return false;
  const double eps = internal_energy<dim>(u);
  return eps > fl.eps && std::isfinite(eps);
}

[[noreturn]] void throw_not_admissible(const char* op, const double* u, int n);

template <int dim>
inline void require_admissible(const State<dim>& u, const char* op) {
  if (!is_admissible<dim>(u)) throw_not_admissible(op, u.data(), dim + 2);
}

template <int dim>
inline double pressure(const State<dim>& u, const GasLaw& law) {
  require_admissible<dim>(u, "pressure");
  return pressure_raw<dim>(u, law);
}

template <int dim>
inline Flux<dim> flux(const State<dim>& u, const GasLaw& law) {
  require_admissible<dim>(u, "flux");
  return flux_raw<dim>(u, law);
}

template <int dim>
inline double sound_speed(const State<dim>& u, const GasLaw& law) {
  return std::sqrt(law.gamma() * pressure_raw<dim>(u, law) / u[0]);
}

/// Which mathematical entropy drives the smoothness indicator.
enum class EntropyKind {
  harten,        ///< (rho eps)^(1/(gamma+1)), a genuine entropy of the Euler system
  spec_literal,  ///< (rho^2 eps)^(1/(gamma+1)); kept for comparison
};

/// Entropy value and its gradient with respect to the conserved variables.
template <int dim>
inline std::pair<double, State<dim>> entropy_raw(const State<dim>& u, const GasLaw& law,
                                                 EntropyKind kind) {
  const double rho = u[0];
  const double E = u[dim + 1];
  const double m2 = momentum_norm_sq<dim>(u);
  const double inv = 1. / (law.gamma() + 1.);
  State<dim> g;
  double base;
  if (kind == EntropyKind::harten) {
    base = rho * E - 0.5 * m2;
    g[0] = E;
    for (int k = 0; k < dim; ++k) g[1 + k] = -u[1 + k];
    g[dim + 1] = rho;
  } else {
    base = rho * rho * E - 0.5 * rho * m2;
    g[0] = 2. * rho * E - 0.5 * m2;
    for (int k = 0; k < dim; ++k) g[1 + k] = -rho * u[1 + k];
    g[dim + 1] = rho * rho;
  }
  const double eta = std::pow(base, inv);
  const double scale = inv * eta / base;
  for (auto& x : g) x *= scale;
  return {eta, g};
}

template <int dim>
inline std::pair<double, State<dim>> harten_entropy_and_gradient(
    const State<dim>& u, const GasLaw& law, EntropyKind kind = EntropyKind::harten) {
  require_admissible<dim>(u, "harten_entropy_and_gradient");
  return entropy_raw<dim>(u, law, kind);
}

/// Phi = eps rho^-gamma, S = p rho^-gamma, eps.
struct SpecificEntropy {
  double phi;
  double s;
  double eps;
};

template <int dim>
inline SpecificEntropy specific_entropy_functionals(const State<dim>& u, const GasLaw& law) {
  require_admissible<dim>(u, "specific_entropy_functionals");
  const double eps = internal_energy<dim>(u);
  const double phi = eps / law.pow_gamma(u[0]);
  return {phi, law.gm1() * phi, eps};
}

/// Riemann-invariant-like quantities along a unit normal.
template <int dim>
struct Characteristics {
  double c1;
  double c3;
  double s;
  double vn;
  Vec<dim> vperp;
  double a;
};

template <int dim>
inline Characteristics<dim> characteristic_quantities_raw(const State<dim>& u, const Vec<dim>& n,
                                                         const GasLaw& law) {
  Characteristics<dim> c;
  const auto v = velocity<dim>(u);
  const double p = pressure_raw<dim>(u, law);
  c.vn = dot<dim>(v, n);
  for (int k = 0; k < dim; ++k) c.vperp[k] = v[k] - c.vn * n[k];
  c.a = std::sqrt(law.gamma() * p / u[0]);
  c.s = p / law.pow_gamma(u[0]);
  c.c1 = c.vn - 2. * c.a / law.gm1();
  c.c3 = c.vn + 2. * c.a / law.gm1();
  return c;
}

template <int dim>
inline Characteristics<dim> characteristic_quantities(const State<dim>& u, const Vec<dim>& n,
                                                     const GasLaw& law) {
  require_admissible<dim>(u, "characteristic_quantities");
  return characteristic_quantities_raw<dim>(u, n, law);
}

enum class Regime { supersonic_inflow, subsonic_inflow, subsonic_outflow, supersonic_outflow };

std::string to_string(Regime r);

/// Sign table of (Vn - a, Vn, Vn + a); ties follow the non-strict inequalities.
inline Regime classify_regime(double vn, double a) {
  if (vn < 0.) return a < -vn ? Regime::supersonic_inflow : Regime::subsonic_inflow;
  return vn < a ? Regime::subsonic_outflow : Regime::supersonic_outflow;
}

template <int dim>
inline Regime classify_regime(const State<dim>& u, const Vec<dim>& n, const GasLaw& law) {
  const auto c = characteristic_quantities<dim>(u, n, law);
  return classify_regime(c.vn, c.a);
}

template <int dim>
struct PrimitiveState {
  double rho;
  Vec<dim> vel;
  double pres;
};

template <int dim>
inline PrimitiveState<dim> to_primitive(const State<dim>& u, const GasLaw& law) {
  require_admissible<dim>(u, "to_primitive");
  return {u[0], velocity<dim>(u), pressure_raw<dim>(u, law)};
}

template <int dim>
inline State<dim> from_primitive(const PrimitiveState<dim>& w, const GasLaw& law) {
  if (!(w.rho > 0.) || !(w.pres > 0.)) throw DomainError("from_primitive: rho and p must be > 0");
  State<dim> u;
  u[0] = w.rho;
  double v2 = 0.;
  for (int k = 0; k < dim; ++k) {
    u[1 + k] = w.rho * w.vel[k];
    v2 += w.vel[k] * w.vel[k];
  }
  u[dim + 1] = w.pres / law.gm1() + 0.5 * w.rho * v2;
  return u;
}

}  // namespace idpflow
