#include "idpflow/riemann.hpp"

#include <algorithm>
#include <sstream>

namespace idpflow {

namespace {

double sound(const NormalData& k, const GasLaw& law) {
  return std::sqrt(law.gamma() * k.p / k.rho);
}

void check(const NormalData& k, const char* side) {
  if (!(k.rho > 0.) || !(k.p > 0.) || !std::isfinite(k.vn))
    throw DomainError(std::string("solve_exact: inadmissible ") + side + " state");
}

double total_pressure_function(double p, const NormalData& l, const NormalData& r,
                               const GasLaw& law, double* df) {
  double dl = 0., dr = 0.;
  const double f = pressure_function(p, l, law, &dl) + pressure_function(p, r, law, &dr) +
                   (r.vn - l.vn);
  if (df) *df = dl + dr;
  return f;
}

}  // namespace

double pressure_function(double p, const NormalData& k, const GasLaw& law, double* dfdp) {
  const double g = law.gamma();
  const double a = sound(k, law);
  if (p > k.p) {
    const double A = 2. / ((g + 1.) * k.rho);
    const double B = (g - 1.) / (g + 1.) * k.p;
    const double s = std::sqrt(A / (p + B));
    if (dfdp) *dfdp = s * (1. - 0.5 * (p - k.p) / (p + B));
    return (p - k.p) * s;
  }
  const double ratio = p / k.p;
  const double e = (g - 1.) / (2. * g);
  const double pr = std::pow(ratio, e);
  if (dfdp) *dfdp = p > 0. ? pr / (k.rho * a * ratio) : INFINITY;
  return 2. * a / (g - 1.) * (pr - 1.);
}

double two_rarefaction_pressure(const NormalData& l, const NormalData& r, const GasLaw& law) {
  const double g = law.gamma();
  const double e = (g - 1.) / (2. * g);
  const double al = sound(l, law), ar = sound(r, law);
  const double num = std::max(al + ar - 0.5 * (g - 1.) * (r.vn - l.vn), 0.);
  const double den = al * std::pow(l.p, -e) + ar * std::pow(r.p, -e);
  return std::pow(num / den, 1. / e);
}

RiemannFan solve_exact(const NormalData& l, const NormalData& r, const GasLaw& law) {
  check(l, "left");
  check(r, "right");
  const double g = law.gamma();
  const double al = sound(l, law), ar = sound(r, law);
  if (2. * (al + ar) / (g - 1.) <= r.vn - l.vn) {
    std::ostringstream os;
    os << "solve_exact: data generate vacuum (dv = " << r.vn - l.vn << ")";
    throw VacuumError(os.str());
  }

  RiemannFan fan;
  // Bracket: F(0) < 0 without vacuum, F increasing.
  double lo = 0., hi = std::max(two_rarefaction_pressure(l, r, law), 1e-300);
  while (total_pressure_function(hi, l, r, law, nullptr) < 0.) {
    lo = hi;
    hi *= 2.;
  }
  double p = std::clamp(two_rarefaction_pressure(l, r, law), lo, hi);
  if (!(p > 0.)) p = 0.5 * (lo + hi);

  bool converged = false;
  int it = 0;
  for (; it < 100; ++it) {
    double df = 0.;
    const double f = total_pressure_function(p, l, r, law, &df);
    if (f == 0.) {
      converged = true;
      break;
    }
    if (f < 0.)
      lo = p;
    else
      hi = p;
    double next = p - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - p) <= 1e-15 * next || hi - lo <= 1e-15 * hi) {
      p = next;
      converged = true;
      break;
    }
    p = next;
  }
  if (!converged) {
    // Bisection fallback.
    for (int k = 0; k < 400 && hi - lo > 1e-15 * hi; ++k, ++it) {
      p = 0.5 * (lo + hi);
      if (total_pressure_function(p, l, r, law, nullptr) < 0.)
        lo = p;
      else
        hi = p;
    }
    p = 0.5 * (lo + hi);
  }

  fan.pstar = p;
  fan.iterations = it;
  const double fl = pressure_function(p, l, law);
  const double fr = pressure_function(p, r, law);
  fan.vstar = 0.5 * (l.vn + r.vn) + 0.5 * (fr - fl);

  const double g6 = (g - 1.) / (g + 1.);
  if (p > l.p) {
    fan.left_kind = WaveKind::shock;
    fan.left_wave_speed = l.vn - al * std::sqrt((g + 1.) / (2. * g) * p / l.p + (g - 1.) / (2. * g));
    fan.rho_star_left = l.rho * (p / l.p + g6) / (g6 * p / l.p + 1.);
  } else {
    fan.left_kind = WaveKind::rarefaction;
    fan.left_wave_speed = l.vn - al;
    fan.rho_star_left = l.rho * std::pow(p / l.p, 1. / g);
  }
  if (p > r.p) {
    fan.right_kind = WaveKind::shock;
    fan.right_wave_speed =
        r.vn + ar * std::sqrt((g + 1.) / (2. * g) * p / r.p + (g - 1.) / (2. * g));
    fan.rho_star_right = r.rho * (p / r.p + g6) / (g6 * p / r.p + 1.);
  } else {
    fan.right_kind = WaveKind::rarefaction;
    fan.right_wave_speed = r.vn + ar;
    fan.rho_star_right = r.rho * std::pow(p / r.p, 1. / g);
  }
  return fan;
}

NormalData sample_at_zero(const RiemannFan& fan, const NormalData& l, const NormalData& r,
                          const GasLaw& law) {
  const double g = law.gamma();
  const double p = fan.pstar, u = fan.vstar;
  if (u >= 0.) {
    const double al = sound(l, law);
    if (fan.left_kind == WaveKind::shock) {
      if (fan.left_wave_speed >= 0.) return l;
      return {fan.rho_star_left, u, p};
    }
    if (l.vn - al >= 0.) return l;
    const double a_star = al * std::pow(p / l.p, (g - 1.) / (2. * g));
    if (u - a_star <= 0.) return {fan.rho_star_left, u, p};
    const double c = 2. / (g + 1.) + (g - 1.) / ((g + 1.) * al) * l.vn;
    return {l.rho * std::pow(c, 2. / (g - 1.)), 2. / (g + 1.) * (al + 0.5 * (g - 1.) * l.vn),
            l.p * std::pow(c, 2. * g / (g - 1.))};
  }
  const double ar = sound(r, law);
  if (fan.right_kind == WaveKind::shock) {
    if (fan.right_wave_speed <= 0.) return r;
    return {fan.rho_star_right, u, p};
  }
  if (r.vn + ar <= 0.) return r;
  const double a_star = ar * std::pow(p / r.p, (g - 1.) / (2. * g));
  if (u + a_star >= 0.) return {fan.rho_star_right, u, p};
  const double c = 2. / (g + 1.) - (g - 1.) / ((g + 1.) * ar) * r.vn;
  return {r.rho * std::pow(c, 2. / (g - 1.)), 2. / (g + 1.) * (-ar + 0.5 * (g - 1.) * r.vn),
          r.p * std::pow(c, 2. * g / (g - 1.))};
}

double max_wavespeed_bound(const NormalData& l, const NormalData& r, const GasLaw& law) {
  const WavespeedBound bound(law);
  return bound(bound.node(l.rho, l.p), l.vn, bound.node(r.rho, r.p), r.vn);
}

}  // namespace idpflow
