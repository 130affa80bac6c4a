#include "idpflow/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "idpflow/errors.hpp"
#include "idpflow/parallel.hpp"

namespace idpflow {

std::string to_string(IndicatorKind k) {
  switch (k) {
    case IndicatorKind::entropy_commutator: return "entropy_commutator";
    case IndicatorKind::constant_one: return "constant_one";
    case IndicatorKind::constant_zero: return "constant_zero";
  }
  return "?";
}

IndicatorKind indicator_kind_from_string(const std::string& s) {
  if (s == "entropy_commutator") return IndicatorKind::entropy_commutator;
  if (s == "constant_one") return IndicatorKind::constant_one;
  if (s == "constant_zero") return IndicatorKind::constant_zero;
  throw ConfigError("unknown indicator '" + s + "' (entropy_commutator, constant_one, constant_zero)");
}

std::string to_string(EntropyKind k) { return k == EntropyKind::harten ? "harten" : "spec_literal"; }

EntropyKind entropy_kind_from_string(const std::string& s) {
  if (s == "harten") return EntropyKind::harten;
  if (s == "spec_literal") return EntropyKind::spec_literal;
  throw ConfigError("unknown entropy '" + s + "' (harten, spec_literal)");
}

namespace {

template <int dim>
inline Vec<dim> edge_vec(const std::array<std::vector<double>, 2>& a, int e) {
  Vec<dim> v;
  for (int k = 0; k < dim; ++k) v[k] = a[k][e];
  return v;
}

/// psi(l) = eps(u + l p) - phi_min rho(u + l p)^gamma and its derivative.
template <int dim>
struct EntropyConstraint {
  const State<dim>& u;
  const State<dim>& p;
  double phi_min;
  double gamma;
  double slack;

  double operator()(double l, double* df = nullptr) const {
    State<dim> w;
    for (int k = 0; k < dim + 2; ++k) w[k] = u[k] + l * p[k];
    const double rho = w[0];
    double m2 = 0., mp = 0.;
    for (int k = 0; k < dim; ++k) {
      m2 += w[1 + k] * w[1 + k];
      mp += w[1 + k] * p[1 + k];
    }
    const double rg = std::pow(rho, gamma);
    if (df) *df = p[dim + 1] - mp / rho + 0.5 * m2 * p[0] / (rho * rho) - phi_min * gamma * rg / rho * p[0];
    return w[dim + 1] - 0.5 * m2 / rho - phi_min * rg + slack;
  }
};

}  // namespace

template <int dim>
double limiter_value(const State<dim>& u, const State<dim>& p, double rho_min, double rho_max,
                     double phi_min, const GasLaw& law) {
  double l = 1.;
  const double rho = u[0], pr = p[0];
  if (pr > 0. && rho + pr > rho_max) l = (rho_max - rho) / pr;
  if (pr < 0. && rho + pr < rho_min) l = (rho_min - rho) / pr;
  l = std::clamp(l, 0., 1.);
  if (l == 0.) return 0.;

  // Ties phi(u) = phi_min are decided by rounding; a relative slack of
  // 1e-13 keeps them feasible.
  const EntropyConstraint<dim> psi{u, p, phi_min, law.gamma(), 1e-13 * phi_min * law.pow_gamma(rho)};
  double fb = psi(l);
  if (fb >= 0.) return l;
  double fa = psi(0.);
  if (!(fa >= 0.)) return 0.;

  double a = 0., b = l;
  constexpr double gap = 1e-8;
  for (int it = 0; it < 3 && b - a > gap; ++it) {
    // The constraint is concave in l: the chord root is feasible, the
    // tangent root at the infeasible end is not below the true root.
    const double c = a - fa * (b - a) / (fb - fa);
    double db = 0.;
    psi(b, &db);
    const double nt = db < 0. ? b - fb / db : b;
    if (c > a && c < b) {
      const double fc = psi(c);
      if (fc >= 0.) {
        a = c;
        fa = fc;
      } else {
        b = c;
        fb = fc;
      }
    }
    if (nt > a && nt < b) {
      const double fn = psi(nt);
      if (fn < 0.) {
        b = nt;
        fb = fn;
      } else {
        a = nt;
        fa = fn;
      }
    }
  }
  while (b - a > gap) {
    const double m = 0.5 * (a + b);
    const double fm = psi(m);
    if (fm >= 0.) {
      a = m;
    } else {
      b = m;
    }
  }
  return a * (1. - 1e-10);
}

template <int dim>
HyperbolicSolver<dim>::HyperbolicSolver(const FemGraph& g, const GasLaw& law, HyperbolicOptions opt)
    : g_(g), law_(law), bound_(law), opt_(opt) {
  if (g.dim != dim) throw ConfigError("hyperbolic solver: graph dimension mismatch");
  if (g.n == 0) throw SolverError("hyperbolic solver: empty mesh");
  bnormal_.assign(g.n, Vec<dim>{});
  for (int i = 0; i < g.n; ++i)
    for (int e = g.row[i]; e < g.row[i + 1]; ++e)
      for (int k = 0; k < dim; ++k) bnormal_[g.col[e]][k] += g.c[k][e];
  for (int i = 0; i < g.n; ++i) {
    if (!g.boundary[i]) {
      bnormal_[i] = Vec<dim>{};
      continue;
    }
    bnodes_.push_back(i);
  }
  const int n = g.n, nnz = g.nnz();
  cache_.resize(n);
  alpha_.assign(n, 0.);
  dL_.assign(nnz, 0.);
  UL_.resize(n);
  FH_.resize(n);
  bounds_.rho_min.assign(n, 0.);
  bounds_.rho_max.assign(n, 0.);
  bounds_.phi_min.assign(n, 0.);
  P_.assign(nnz, S{});
  lraw_.assign(nnz, 0.);
  ell_.assign(nnz, 0.);
  scale_.assign(nnz, 1.);
  double volume = 0.;
  for (double m : g.mass) volume += m;
  relax_.resize(n);
  for (int i = 0; i < n; ++i) relax_[i] = std::pow(g.mass[i] / volume, 1.5 / dim);
}

template <int dim>
void HyperbolicSolver<dim>::prepare(const Field<dim>& U) {
  if (static_cast<int>(U.size()) != g_.n) throw DomainError("hyperbolic solver: field size mismatch");
  const int n = g_.n;
  const bool need_entropy = opt_.indicator == IndicatorKind::entropy_commutator;
  ExceptionTrap trap;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    trap.run([&] {
      const auto& u = U[i];
      require_admissible<dim>(u, "hyperbolic step");
      auto& c = cache_[i];
      const double p = pressure_raw<dim>(u, law_);
      c.f = flux_raw<dim>(u, law_);
      c.w = bound_.node(u[0], p);
      c.v = velocity<dim>(u);
      c.phi = internal_energy<dim>(u) / law_.pow_gamma(u[0]);
      if (need_entropy) {
        const auto [eta, deta] = entropy_raw<dim>(u, law_, opt_.entropy);
        c.eta = eta;
        c.deta = deta;
      }
    });
  }
  trap.rethrow();
}

template <int dim>
const std::vector<double>& HyperbolicSolver<dim>::compute_indicator(const Field<dim>& /*U*/) {
  const int n = g_.n;
  if (opt_.indicator != IndicatorKind::entropy_commutator) {
    std::fill(alpha_.begin(), alpha_.end(), opt_.indicator == IndicatorKind::constant_one ? 1. : 0.);
    return alpha_;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const auto& ci = cache_[i];
    double num = 0., den = 0., scale = 0.;
    for (int e = g_.row[i]; e < g_.row[i + 1]; ++e) {
      const int j = g_.col[e];
      const auto& cj = cache_[j];
      const auto cij = edge_vec<dim>(g_.c, e);
      double a = 0.;
      for (int k = 0; k < dim + 2; ++k) a += ci.deta[k] * dot<dim>(cj.f[k], cij);
      const double b = cj.eta * dot<dim>(cj.v, cij);
      num += a - b;
      den += std::abs(a - b);
      scale += std::abs(a) + std::abs(b);
    }
    const double floor = 1e-30 + 1e-8 * scale;
    alpha_[i] = std::min(1., std::abs(num) / std::max(den, floor));
  }
  return alpha_;
}

template <int dim>
double HyperbolicSolver<dim>::compute_viscosity(const Field<dim>& /*U*/) {
  const int n = g_.n;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const auto& ci = cache_[i];
    for (int e = g_.row[i]; e < g_.row[i + 1]; ++e) {
      const int j = g_.col[e];
      if (j <= i) continue;
      const auto& cj = cache_[j];
      const auto nij = edge_vec<dim>(g_.nij, e);
      double d = g_.cnorm[e] * bound_(ci.w, dot<dim>(ci.v, nij), cj.w, dot<dim>(cj.v, nij));
      if (g_.boundary[i] && g_.boundary[j]) {
        // c_ji differs from -c_ij on boundary edges.
        const int t = g_.transpose[e];
        const auto nji = edge_vec<dim>(g_.nij, t);
        d = std::max(d, g_.cnorm[t] * bound_(cj.w, dot<dim>(cj.v, nji), ci.w, dot<dim>(ci.v, nji)));
      }
      dL_[e] = d;
      dL_[g_.transpose[e]] = d;
    }
  }
  double tau_max = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : tau_max)
  for (int i = 0; i < n; ++i) {
    double s = 0.;
    for (int e = g_.row[i]; e < g_.row[i + 1]; ++e)
      if (e != g_.diag[i]) s += dL_[e];
    dL_[g_.diag[i]] = -s;
    if (s > 0.) tau_max = std::min(tau_max, g_.mass[i] / (2. * s));
  }
  return tau_max;
}

template <int dim>
void HyperbolicSolver<dim>::low_order_update(const Field<dim>& U, double tau) {
  const int n = g_.n;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const auto& ui = U[i];
    const auto& ci = cache_[i];
    S fl{}, fh{};
    double rmin = ui[0], rmax = ui[0], pmin = ci.phi;
    for (int e = g_.row[i]; e < g_.row[i + 1]; ++e) {
      const int j = g_.col[e];
      if (j == i) continue;
      const auto& uj = U[j];
      const auto& cj = cache_[j];
      const auto cij = edge_vec<dim>(g_.c, e);
      const double d = dL_[e];
      const double dh = 0.5 * (alpha_[i] + alpha_[j]) * d;
      for (int k = 0; k < dim + 2; ++k) {
        double fc = 0.;
        for (int l = 0; l < dim; ++l) fc += (cj.f[k][l] - ci.f[k][l]) * cij[l];
        const double du = uj[k] - ui[k];
        fl[k] += d * du - fc;
        fh[k] += dh * du - fc;
      }
      if (d > 0.) {
        double mc = 0.;
        for (int l = 0; l < dim; ++l) mc += (cj.f[0][l] - ci.f[0][l]) * cij[l];
        const double rbar = 0.5 * (ui[0] + uj[0]) - mc / (2. * d);
        rmin = std::min(rmin, rbar);
        rmax = std::max(rmax, rbar);
      }
      pmin = std::min(pmin, cj.phi);
    }
    const double s = tau * g_.mass_inv[i];
    for (int k = 0; k < dim + 2; ++k) UL_[i][k] = ui[k] + s * fl[k];
    FH_[i] = fh;
    if (opt_.relax_bounds) {
      const double r = relax_[i];
      rmin *= 1. - r;
      rmax *= 1. + r;
      pmin *= 1. - r;
    }
    bounds_.rho_min[i] = rmin;
    bounds_.rho_max[i] = rmax;
    bounds_.phi_min[i] = pmin;
  }
}

template <int dim>
void HyperbolicSolver<dim>::compute_corrections(const Field<dim>& U, double tau) {
  const int n = g_.n;
  const bool mc = opt_.mass_correction;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const auto& ui = U[i];
    const double coef = tau * g_.mass_inv[i] / g_.lambda[i];
    for (int e = g_.row[i]; e < g_.row[i + 1]; ++e) {
      const int j = g_.col[e];
      auto& p = P_[e];
      if (j == i) {
        p = S{};
        continue;
      }
      const double bij = mc ? g_.bij[e] : 0.;
      const double bji = mc ? g_.bij[g_.transpose[e]] : 0.;
      const double d = dL_[e];
      const double dd = 0.5 * (alpha_[i] + alpha_[j]) * d - d;
      const auto& uj = U[j];
      for (int k = 0; k < dim + 2; ++k)
        p[k] = coef * (bij * FH_[j][k] - bji * FH_[i][k] + dd * (uj[k] - ui[k]));
    }
  }
}

template <int dim>
void HyperbolicSolver<dim>::compute_limiters(const Field<dim>& base) {
  const int n = g_.n;
  const double gamma = law_.gamma();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double rmin = bounds_.rho_min[i], rmax = bounds_.rho_max[i], pmin = bounds_.phi_min[i];
    // rho^gamma lies below its chord on [rmin, rmax]; this certifies most
    // full corrections without a pow.
    const double gmin = std::pow(rmin, gamma), gmax = std::pow(rmax, gamma);
    const double slope = rmax > rmin ? (gmax - gmin) / (rmax - rmin) : 0.;
    const auto& u = base[i];
    for (int e = g_.row[i]; e < g_.row[i + 1]; ++e) {
      if (e == g_.diag[i]) {
        lraw_[e] = 0.;
        continue;
      }
      const double s = scale_[e];
      if (s == 0.) {
        lraw_[e] = 1.;
        continue;
      }
      S p = P_[e];
      if (s != 1.)
        for (auto& x : p) x *= s;
      S w;
      for (int k = 0; k < dim + 2; ++k) w[k] = u[k] + p[k];
      if (w[0] >= rmin && w[0] <= rmax) {
        double m2 = 0.;
        for (int k = 0; k < dim; ++k) m2 += w[1 + k] * w[1 + k];
        const double eps = w[dim + 1] - 0.5 * m2 / w[0];
        if (eps >= pmin * (gmin + slope * (w[0] - rmin))) {
          lraw_[e] = 1.;
          continue;
        }
      }
      lraw_[e] = limiter_value<dim>(u, p, rmin, rmax, pmin, law_);
    }
  }
  const int nnz = g_.nnz();
#pragma omp parallel for schedule(static)
  for (int e = 0; e < nnz; ++e) ell_[e] = std::min(lraw_[e], lraw_[g_.transpose[e]]);
}

template <int dim>
void HyperbolicSolver<dim>::apply_limited_update(Field<dim>& out, int passes) {
  const int n = g_.n;
  out = UL_;
  std::fill(scale_.begin(), scale_.end(), 1.);
  for (int pass = 0; pass < passes; ++pass) {
    compute_limiters(out);
    const bool last = pass + 1 == passes;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      S acc{};
      for (int e = g_.row[i]; e < g_.row[i + 1]; ++e) {
        const double w = ell_[e] * scale_[e];
        if (w != 0.)
          for (int k = 0; k < dim + 2; ++k) acc[k] += w * P_[e][k];
        if (!last) scale_[e] *= 1. - ell_[e];
      }
      const double lam = g_.lambda[i];
      for (int k = 0; k < dim + 2; ++k) out[i][k] += lam * acc[k];
    }
  }
}

template <int dim>
std::vector<double> HyperbolicSolver<dim>::d_high() const {
  std::vector<double> dh(dL_.size(), 0.);
  for (int i = 0; i < g_.n; ++i) {
    double s = 0.;
    for (int e = g_.row[i]; e < g_.row[i + 1]; ++e) {
      const int j = g_.col[e];
      if (j == i) continue;
      dh[e] = 0.5 * (alpha_[i] + alpha_[j]) * dL_[e];
      s += dh[e];
    }
    dh[g_.diag[i]] = -s;
  }
  return dh;
}

template <int dim>
Field<dim> HyperbolicSolver<dim>::high_order_update() const {
  Field<dim> r = UL_;
  for (int i = 0; i < g_.n; ++i)
    for (int e = g_.row[i]; e < g_.row[i + 1]; ++e)
      for (int k = 0; k < dim + 2; ++k) r[i][k] += g_.lambda[i] * P_[e][k];
  return r;
}

template <int dim>
double HyperbolicSolver<dim>::bounds_violation(const Field<dim>& U) const {
  double worst = 0.;
  for (int i = 0; i < g_.n; ++i) {
    const auto& u = U[i];
    const double rho = u[0];
    worst = std::max(worst, (bounds_.rho_min[i] - rho) / bounds_.rho_min[i]);
    worst = std::max(worst, (rho - bounds_.rho_max[i]) / bounds_.rho_max[i]);
    const double target = bounds_.phi_min[i] * law_.pow_gamma(rho);
    worst = std::max(worst, (target - internal_energy<dim>(u)) / target);
  }
  return worst;
}

template <int dim>
EulerResult<dim> HyperbolicSolver<dim>::forward_euler_step(const Field<dim>& U, Field<dim>& out,
                                                           std::optional<double> dt) {
  EulerResult<dim> r;
  prepare(U);
  compute_indicator(U);
  r.tau_max = compute_viscosity(U);
  r.tau = dt ? *dt : opt_.cfl * r.tau_max;
  if (!(r.tau > 0.) || !std::isfinite(r.tau)) {
    std::ostringstream os;
    os << "hyperbolic step: invalid step size " << r.tau;
    throw SolverError(os.str());
  }
  if (!opt_.adaptive_cfl && r.tau > r.tau_max * (1. + 1e-12)) {
    std::ostringstream os;
    os << "step " << r.tau << " exceeds the admissible step " << r.tau_max;
    throw CflViolation(os.str(), r.tau_max);
  }
  low_order_update(U, r.tau);
  for (int i = 0; i < g_.n; ++i) {
    if (is_admissible<dim>(UL_[i])) continue;
    std::ostringstream os;
    os << "low-order update not admissible at node " << i << " (tau " << r.tau << ", tau_max " << r.tau_max
       << ")";
    if (opt_.adaptive_cfl || dt) throw CflViolation(os.str(), r.tau_max);
    throw InvariantViolation(os.str());
  }
  compute_corrections(U, r.tau);
  apply_limited_update(out, opt_.limiter_passes);
  for (int i = 0; i < g_.n; ++i) {
    if (is_admissible<dim>(out[i])) continue;
    std::ostringstream os;
    os << "limited update not admissible at node " << i;
    throw InvariantViolation(os.str());
  }

  for (int i : bnodes_) {
    const auto& f = cache_[i].f;
    for (int k = 0; k < dim + 2; ++k) r.boundary_flux[k] += dot<dim>(f[k], bnormal_[i]);
  }
  const int n = g_.n;
  std::vector<double> a(n), b(n), s(n);
  double scale = 0.;
  double worst = 0.;
  for (int k = 0; k < dim + 2; ++k) {
    for (int i = 0; i < n; ++i) {
      a[i] = g_.mass[i] * out[i][k];
      b[i] = g_.mass[i] * U[i][k];
      s[i] = g_.mass[i] * std::abs(U[i][k]);
    }
    const double defect = deterministic_sum(a.data(), n) + r.tau * r.boundary_flux[k] - deterministic_sum(b.data(), n);
    scale += deterministic_sum(s.data(), n);
    worst = std::max(worst, std::abs(defect));
  }
  r.residual = scale > 0. ? worst / scale : worst;
  if (opt_.check_bounds) r.bounds_violation = bounds_violation(out);
  return r;
}

template <int dim>
SsprkResult<dim> HyperbolicSolver<dim>::ssprk33_step(Field<dim>& U, double t, const BoundaryMap* bm,
                                                      std::optional<double> dt) {
  SsprkResult<dim> res;
  double tau = 0.;
  int stage = 0;
  const double wflux[3] = {1. / 6., 1. / 6., 2. / 3.};
  const double wpost[3] = {1. / 6., 2. / 3., 1.};

  auto axpby = [](double a, const Field<dim>& x, double b, const Field<dim>& y) {
    Field<dim> z(x.size());
    const int n = static_cast<int>(x.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < dim + 2; ++k) z[i][k] = a * x[i][k] + b * y[i][k];
    return z;
  };
  auto euler = [&](const Field<dim>& w) {
    Field<dim> out(w.size());
    const auto r = forward_euler_step(w, out, stage == 0 ? dt : std::optional<double>(tau));
    if (stage == 0) {
      tau = r.tau;
      res.tau = r.tau;
      res.tau_max = r.tau_max;
    } else {
      res.tau_max = std::min(res.tau_max, r.tau_max);
    }
    for (int k = 0; k < dim + 2; ++k) res.boundary_flux[k] += wflux[stage] * r.tau * r.boundary_flux[k];
    res.max_residual = std::max(res.max_residual, r.residual);
    res.max_bounds_violation = std::max(res.max_bounds_violation, r.bounds_violation);
    ++stage;
    return out;
  };
  auto post = [&](Field<dim>& w, double time) {
    if (!bm) return;
    const int s = stage - 1;
    std::vector<S> before(bm->nodes.size());
    for (std::size_t b = 0; b < bm->nodes.size(); ++b) before[b] = w[bm->nodes[b].node];
    apply_all<dim>(w, *bm, time, law_, opt_.nonreflecting);
    for (std::size_t b = 0; b < bm->nodes.size(); ++b) {
      const int i = bm->nodes[b].node;
      for (int k = 0; k < dim + 2; ++k) res.postprocess[k] += wpost[s] * g_.mass[i] * (w[i][k] - before[b][k]);
    }
  };
  U = ssprk33_combine(U, t, tau, axpby, euler, post);
  return res;
}

template double limiter_value<1>(const State<1>&, const State<1>&, double, double, double, const GasLaw&);
template double limiter_value<2>(const State<2>&, const State<2>&, double, double, double, const GasLaw&);
template class HyperbolicSolver<1>;
template class HyperbolicSolver<2>;

}  // namespace idpflow
