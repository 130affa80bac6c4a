#pragma once

#include <cmath>

#include "idpflow/gas.hpp"

namespace idpflow {

enum class WaveKind { shock, rarefaction };

/// One-dimensional Riemann data projected on a normal.
struct NormalData {
  double rho;
  double vn;
  double p;
};

/// Exact solution structure of the projected Riemann problem.
struct RiemannFan {
  double pstar = 0.;
  double vstar = 0.;
  double left_wave_speed = 0.;   ///< shock speed or rarefaction head speed
  double right_wave_speed = 0.;
  WaveKind left_kind = WaveKind::rarefaction;
  WaveKind right_kind = WaveKind::rarefaction;
  double rho_star_left = 0.;
  double rho_star_right = 0.;
  int iterations = 0;

  double max_speed() const { return std::max(std::abs(left_wave_speed), std::abs(right_wave_speed)); }
};

/// f_K(p) of the two-sided pressure equation, with its derivative.
double pressure_function(double p, const NormalData& k, const GasLaw& law, double* dfdp = nullptr);

/// Two-rarefaction estimate of p*; may be zero when the numerator is clamped.
double two_rarefaction_pressure(const NormalData& l, const NormalData& r, const GasLaw& law);

RiemannFan solve_exact(const NormalData& l, const NormalData& r, const GasLaw& law);

/// Value of the self-similar solution on the ray x/t = 0 (rho, vn, p).
NormalData sample_at_zero(const RiemannFan& fan, const NormalData& l, const NormalData& r,
                          const GasLaw& law);

/// Guaranteed upper bound on the largest wave speed, closed form.
double max_wavespeed_bound(const NormalData& l, const NormalData& r, const GasLaw& law);

template <int dim>
inline NormalData project(const State<dim>& u, const Vec<dim>& n, const GasLaw& law) {
  return {u[0], dot<dim>(momentum<dim>(u), n) / u[0], pressure_raw<dim>(u, law)};
}

template <int dim>
RiemannFan solve_exact(const State<dim>& ul, const State<dim>& ur, const Vec<dim>& n,
                       const GasLaw& law) {
  require_admissible<dim>(ul, "solve_exact");
  require_admissible<dim>(ur, "solve_exact");
  return solve_exact(project<dim>(ul, n, law), project<dim>(ur, n, law), law);
}

/// Full state on the ray x/t = 0. The tangential velocity is taken from the
/// side of the contact that contains the ray.
template <int dim>
State<dim> sample_at_zero(const RiemannFan& fan, const State<dim>& ul, const State<dim>& ur,
                          const Vec<dim>& n, const GasLaw& law) {
  const auto l = project<dim>(ul, n, law);
  const auto r = project<dim>(ur, n, law);
  const auto w = sample_at_zero(fan, l, r, law);
  const auto& side = fan.vstar >= 0. ? ul : ur;
  const auto vs = velocity<dim>(side);
  const double vns = dot<dim>(vs, n);
  PrimitiveState<dim> prim;
  prim.rho = w.rho;
  prim.pres = w.p;
  for (int k = 0; k < dim; ++k) prim.vel[k] = vs[k] - vns * n[k] + w.vn * n[k];
  return from_primitive<dim>(prim, law);
}

template <int dim>
double max_wavespeed_bound(const State<dim>& ul, const State<dim>& ur, const Vec<dim>& n,
                           const GasLaw& law) {
  return max_wavespeed_bound(project<dim>(ul, n, law), project<dim>(ur, n, law), law);
}

/// x^e with a fast path for small integer exponents (e = 7 for gamma = 1.4).
class PowerFunction {
 public:
  explicit PowerFunction(double e) : e_(e) {
    const double r = std::round(e);
    int_ = std::abs(e - r) < 1e-14 && r >= 1. && r <= 16.;
    n_ = int_ ? static_cast<int>(r) : 0;
  }
  double operator()(double x) const {
    if (!int_) return std::pow(x, e_);
    double result = 1., base = x;
    for (int k = n_; k; k >>= 1) {
      if (k & 1) result *= base;
      base *= base;
    }
    return result;
  }

 private:
  double e_;
  bool int_;
  int n_;
};

/// Per-node data reused by every pair evaluated in a graph-viscosity sweep.
struct WavespeedNode {
  double rho;
  double p;
  double a;      ///< sound speed
  double apow;   ///< a p^{-(gamma-1)/(2 gamma)}
};

/// Closed-form upper bound on the largest wave speed.
///
/// p* is bracketed from above by candidates that each dominate it: the
/// two-rarefaction value (gamma <= 5/3), max(pL, pR) when the pressure
/// function is already nonnegative there, and the root of a lower bound of
/// the shock-shock pressure function (a quadratic in sqrt(p)). When the
/// bracket is wide, at most two chord/tangent refinements follow; since the
/// pressure function is increasing and concave the chord root stays above p*.
class WavespeedBound {
 public:
  explicit WavespeedBound(const GasLaw& law)
      : gamma_(law.gamma()),
        gm1_(law.gm1()),
        expo_((law.gamma() - 1.) / (2. * law.gamma())),
        qcoef_((law.gamma() + 1.) / (2. * law.gamma())),
        acoef_(2. / (law.gamma() + 1.)),
        bcoef_((law.gamma() - 1.) / (law.gamma() + 1.)),
        use_tr_(law.gamma() <= 5. / 3. + 1e-14),
        pow_(2. * law.gamma() / (law.gamma() - 1.)) {}

  WavespeedNode node(double rho, double p) const {
    const double a = std::sqrt(gamma_ * p / rho);
    return {rho, p, a, a * std::pow(p, -expo_)};
  }

  /// Upper bound on p* for data (l, vl), (r, vr).
  double pstar_bound(const WavespeedNode& l, double vl, const WavespeedNode& r, double vr) const {
    const double dv = vr - vl;
    const auto& lo = l.p <= r.p ? l : r;
    const auto& hi = l.p <= r.p ? r : l;

    const double num = std::max(l.a + r.a - 0.5 * gm1_ * dv, 0.);
    const double p_tr = pow_(num / (l.apow + r.apow));
    // Two rarefactions: the estimate is exact.
    if (p_tr <= lo.p) return p_tr;

    double pa, fa, pb;
    const double f_max = shock(hi.p, lo) + dv;
    if (f_max >= 0.) {
      pa = lo.p;
      fa = rarefaction(lo.p, hi) + dv;
      if (fa >= 0.) return p_tr;
      pb = use_tr_ ? std::min(p_tr, hi.p) : hi.p;
    } else {
      pa = hi.p;
      fa = f_max;
      const double sal = std::sqrt(acoef_ / l.rho), sar = std::sqrt(acoef_ / r.rho);
      const double qa = sal + sar;
      const double qc = (1. + bcoef_) * (sal * l.p + sar * r.p);
      const double s = (-dv + std::sqrt(dv * dv + 4. * qa * qc)) / (2. * qa);
      pb = use_tr_ ? std::min(p_tr, s * s) : s * s;
    }
    for (int it = 0; it < 2 && pb > 1.2 * pa; ++it) {
      const double fb = total(pb, l, r, dv, nullptr);
      if (fb <= 0.) break;
      const double pc = pa - fa * (pb - pa) / (fb - fa);
      double dfa = 0.;
      total(pa, l, r, dv, &dfa);
      const double pn = pa - fa / dfa;
      pb = std::min(pb, pc);
      if (pn > pa && pn < pb) {
        pa = pn;
        fa = total(pa, l, r, dv, nullptr);
        if (fa >= 0.) return pb;
      }
    }
    return pb;
  }

  double operator()(const WavespeedNode& l, double vl, const WavespeedNode& r, double vr) const {
    const double phat = pstar_bound(l, vl, r, vr);
    const double ql = std::sqrt(1. + qcoef_ * std::max((phat - l.p) / l.p, 0.));
    const double qr = std::sqrt(1. + qcoef_ * std::max((phat - r.p) / r.p, 0.));
    const double lam1 = std::max(-(vl - l.a * ql), 0.);
    const double lam3 = std::max(vr + r.a * qr, 0.);
    return std::max(lam1, lam3);
  }

 private:
  double rarefaction(double p, const WavespeedNode& k, double* df = nullptr) const {
    const double pr = std::pow(p, expo_);
    if (df) *df = k.apow * pr / (gamma_ * p);
    return 2. / gm1_ * (k.apow * pr - k.a);
  }
  double shock(double p, const WavespeedNode& k, double* df = nullptr) const {
    const double bk = bcoef_ * k.p;
    const double sq = std::sqrt(acoef_ / k.rho / (p + bk));
    if (df) *df = sq * (1. - 0.5 * (p - k.p) / (p + bk));
    return (p - k.p) * sq;
  }
  double total(double p, const WavespeedNode& l, const WavespeedNode& r, double dv,
               double* df) const {
    double dl = 0., dr = 0.;
    const double f = (p > l.p ? shock(p, l, df ? &dl : nullptr) : rarefaction(p, l, df ? &dl : nullptr)) +
                     (p > r.p ? shock(p, r, df ? &dr : nullptr) : rarefaction(p, r, df ? &dr : nullptr)) + dv;
    if (df) *df = dl + dr;
    return f;
  }

  double gamma_;
  double gm1_;
  double expo_;
  double qcoef_;
  double acoef_;
  double bcoef_;
  bool use_tr_;
  PowerFunction pow_;
};

}  // namespace idpflow
