#include "idpflow/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "idpflow/errors.hpp"
#include "idpflow/parallel.hpp"

namespace idpflow {

void ViscousModel::validate() const {
  if (!(mu > 0.) || !std::isfinite(mu)) throw ConfigError("viscosity mu must be positive");
  if (!(lambda >= 0.) || !std::isfinite(lambda)) throw ConfigError("bulk viscosity lambda must be >= 0");
  if (!(kappa >= 0.) || !std::isfinite(kappa)) throw ConfigError("conductivity kappa_over_cv must be >= 0");
}

std::string to_string(VelocityBC b) {
  switch (b) {
    case VelocityBC::noslip: return "noslip";
    case VelocityBC::slip: return "slip";
    case VelocityBC::neumann: return "neumann";
  }
  return "?";
}

std::string to_string(TemperatureBC b) { return b == TemperatureBC::dirichlet ? "dirichlet" : "neumann"; }

VelocityBC velocity_bc_from_string(const std::string& s) {
  if (s == "noslip") return VelocityBC::noslip;
  if (s == "slip") return VelocityBC::slip;
  if (s == "neumann") return VelocityBC::neumann;
  throw ConfigError("unknown velocity boundary condition '" + s + "' (noslip, slip, neumann)");
}

TemperatureBC temperature_bc_from_string(const std::string& s) {
  if (s == "dirichlet") return TemperatureBC::dirichlet;
  if (s == "neumann") return TemperatureBC::neumann;
  throw ConfigError("unknown temperature boundary condition '" + s + "' (dirichlet, neumann)");
}

namespace {

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t n = y.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  return deterministic_dot(x.data(), y.data(), x.size());
}

}  // namespace

CgResult cg_solve(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                  const std::vector<double>& diag, const std::vector<double>& rhs, std::vector<double>& x,
                  const CgOptions& opt) {
  const std::size_t n = rhs.size();
  if (diag.size() != n) throw DomainError("cg_solve: preconditioner size mismatch");
  CgResult res;
  const double bnorm = std::sqrt(dot(rhs, rhs));
  if (bnorm == 0.) {
    x.assign(n, 0.);
    return res;
  }
  if (x.size() != n) x.assign(n, 0.);

  std::vector<double> r(n), z(n), p(n), q(n);
  apply(x, q);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = rhs[i] - q[i];
    z[i] = r[i] / diag[i];
    p[i] = z[i];
  }
  double rz = dot(r, z);
  double rn = std::sqrt(dot(r, r)) / bnorm;
  res.history.push_back(rn);
  while (rn > opt.tol) {
    if (res.iterations >= opt.max_iter) {
      std::ostringstream os;
      os << "conjugate gradients did not converge in " << opt.max_iter << " iterations; residual history:";
      const std::size_t h = res.history.size();
      for (std::size_t k = h > 20 ? h - 20 : 0; k < h; ++k) os << ' ' << res.history[k];
      throw SolverError(os.str());
    }
    apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.)) throw SolverError("conjugate gradients: operator is not positive definite");
    const double a = rz / pq;
    axpy(a, p, x);
    axpy(-a, q, r);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++res.iterations;
    rn = std::sqrt(dot(r, r)) / bnorm;
    res.history.push_back(rn);
  }
  res.residual = rn;
  return res;
}

template <int dim>
ParabolicSolver<dim>::ParabolicSolver(const Mesh& mesh, const CellValues& cv, const FemGraph& g, const GasLaw& law,
                                      ViscousModel model, ParabolicBoundary bc, CgOptions cg)
    : mesh_(mesh), cv_(cv), g_(g), law_(law), model_(model), bc_(std::move(bc)), cgopt_(cg) {
  model_.validate();
  if (mesh.dim != dim) throw DomainError("parabolic solver: mesh dimension mismatch");
  for (const auto& [tag, b] : bc_.velocity)
    if (std::find(mesh.tags.begin(), mesh.tags.end(), tag) == mesh.tags.end())
      throw ConfigError("velocity boundary condition for unknown tag '" + tag + "'");
  for (const auto& [tag, b] : bc_.temperature)
    if (std::find(mesh.tags.begin(), mesh.tags.end(), tag) == mesh.tags.end())
      throw ConfigError("temperature boundary condition for unknown tag '" + tag + "'");

  const int n = mesh.n_nodes();
  vfix_.assign(static_cast<std::size_t>(n) * dim, 0);
  efix_.assign(n, 0);
  const int fn = dim == 1 ? 1 : 2;
  // noslip wins over slip at shared nodes since it fixes every component
  for (const auto& f : mesh.faces) {
    const auto it = bc_.velocity.find(f.tag);
    const VelocityBC b = it == bc_.velocity.end() ? VelocityBC::neumann : it->second;
    if (b == VelocityBC::noslip) {
      for (int a = 0; a < fn; ++a)
        for (int k = 0; k < dim; ++k) vfix_[f.nodes[a] * dim + k] = 1;
    } else if (b == VelocityBC::slip) {
      int axis = -1;
      for (int k = 0; k < dim; ++k)
        if (std::abs(std::abs(f.normal[k]) - 1.) < 1e-12) axis = k;
      if (axis < 0) throw ConfigError("slip velocity condition requires axis-aligned faces (tag '" + f.tag + "')");
      for (int a = 0; a < fn; ++a) vfix_[f.nodes[a] * dim + axis] = 1;
    }
    const auto jt = bc_.temperature.find(f.tag);
    if (jt != bc_.temperature.end() && jt->second == TemperatureBC::dirichlet)
      for (int a = 0; a < fn; ++a) efix_[f.nodes[a]] = 1;
  }
  if (std::find(efix_.begin(), efix_.end(), 1) != efix_.end() && !bc_.boundary_energy)
    throw ConfigError("Dirichlet temperature condition without boundary data");
}

template <int dim>
void ParabolicSolver<dim>::apply_velocity_operator(const std::vector<double>& w, std::vector<double>& y) const {
  const int nv = cv_.nv, nq = cv_.nq;
  const double mu = model_.mu, lam = model_.lambda - 2. / 3. * model_.mu;
  y.assign(w.size(), 0.);
  for (const auto& color : mesh_.colors) {
#pragma omp parallel for schedule(static)
    for (std::size_t t = 0; t < color.size(); ++t) {
      const int c = color[t];
      const auto& cn = mesh_.cell_node[c];
      const double* jxw = cv_.cell_jxw(c);
      const double* grad = cv_.cell_grad(c);
      double loc[4][dim] = {};
      for (int q = 0; q < nq; ++q) {
        const double* gq = grad + q * nv * dim;
        double G[dim][dim] = {};
        for (int a = 0; a < nv; ++a)
          for (int k = 0; k < dim; ++k)
            for (int l = 0; l < dim; ++l) G[k][l] += w[cn[a] * dim + k] * gq[a * dim + l];
        double div = 0.;
        for (int k = 0; k < dim; ++k) div += G[k][k];
        double s[dim][dim];
        for (int k = 0; k < dim; ++k)
          for (int l = 0; l < dim; ++l) s[k][l] = mu * (G[k][l] + G[l][k]) + (k == l ? lam * div : 0.);
        for (int a = 0; a < nv; ++a)
          for (int k = 0; k < dim; ++k) {
            double v = 0.;
            for (int l = 0; l < dim; ++l) v += s[k][l] * gq[a * dim + l];
            loc[a][k] += jxw[q] * v;
          }
      }
      for (int a = 0; a < nv; ++a)
        for (int k = 0; k < dim; ++k) y[cn[a] * dim + k] += loc[a][k];
    }
  }
}

template <int dim>
void ParabolicSolver<dim>::apply_conduction_operator(const std::vector<double>& e, std::vector<double>& y) const {
  const int nv = cv_.nv, nq = cv_.nq;
  const double kappa = model_.kappa;
  y.assign(e.size(), 0.);
  if (kappa == 0.) return;
  for (const auto& color : mesh_.colors) {
#pragma omp parallel for schedule(static)
    for (std::size_t t = 0; t < color.size(); ++t) {
      const int c = color[t];
      const auto& cn = mesh_.cell_node[c];
      const double* jxw = cv_.cell_jxw(c);
      const double* grad = cv_.cell_grad(c);
      double loc[4] = {};
      for (int q = 0; q < nq; ++q) {
        const double* gq = grad + q * nv * dim;
        double ge[dim] = {};
        for (int a = 0; a < nv; ++a)
          for (int k = 0; k < dim; ++k) ge[k] += e[cn[a]] * gq[a * dim + k];
        for (int a = 0; a < nv; ++a) {
          double v = 0.;
          for (int k = 0; k < dim; ++k) v += ge[k] * gq[a * dim + k];
          loc[a] += kappa * jxw[q] * v;
        }
      }
      for (int a = 0; a < nv; ++a) y[cn[a]] += loc[a];
    }
  }
}

template <int dim>
std::vector<double> ParabolicSolver<dim>::viscous_heating(const std::vector<double>& v) const {
  const int nv = cv_.nv, nq = cv_.nq;
  const double mu = model_.mu, lam = model_.lambda - 2. / 3. * model_.mu;
  std::vector<double> K(mesh_.n_nodes(), 0.);
  for (const auto& color : mesh_.colors) {
#pragma omp parallel for schedule(static)
    for (std::size_t t = 0; t < color.size(); ++t) {
      const int c = color[t];
      const auto& cn = mesh_.cell_node[c];
      const double* jxw = cv_.cell_jxw(c);
      const double* grad = cv_.cell_grad(c);
      double loc[4] = {};
      for (int q = 0; q < nq; ++q) {
        const double* gq = grad + q * nv * dim;
        const double* phi = cv_.phi.data() + q * nv;
        double G[dim][dim] = {};
        for (int a = 0; a < nv; ++a)
          for (int k = 0; k < dim; ++k)
            for (int l = 0; l < dim; ++l) G[k][l] += v[cn[a] * dim + k] * gq[a * dim + l];
        double div = 0., ee = 0.;
        for (int k = 0; k < dim; ++k) {
          div += G[k][k];
          for (int l = 0; l < dim; ++l) {
            const double e = 0.5 * (G[k][l] + G[l][k]);
            ee += e * e;
          }
        }
        const double se = 2. * mu * ee + lam * div * div;
        for (int a = 0; a < nv; ++a) loc[a] += jxw[q] * se * phi[a];
      }
      for (int a = 0; a < nv; ++a) K[cn[a]] += loc[a];
    }
  }
  for (int i = 0; i < mesh_.n_nodes(); ++i) K[i] *= g_.mass_inv[i];
  return K;
}

template <int dim>
ParabolicResult ParabolicSolver<dim>::step(Field<dim>& U, double t, double tau, const BodyForce& force) {
  if (!(tau > 0.) || !std::isfinite(tau)) throw DomainError("parabolic step: tau must be positive");
  const int n = mesh_.n_nodes();
  const std::size_t nd = static_cast<std::size_t>(n) * dim;
  if (static_cast<int>(U.size()) != n) throw DomainError("parabolic step: field size mismatch");
  for (const auto& u : U) require_admissible<dim>(u, "parabolic step");

  ParabolicResult res;
  const auto& m = g_.mass;
  std::vector<double> rho(n), rm(n), V(nd), e(n), F(nd, 0.);
  for (int i = 0; i < n; ++i) {
    rho[i] = U[i][0];
    rm[i] = rho[i] * m[i];
    double kin = 0.;
    for (int k = 0; k < dim; ++k) {
      // constrained components are removed up front, their kinetic energy
      // becomes internal energy
      const double v = vfix_[i * dim + k] ? 0. : U[i][1 + k] / rho[i];
      V[i * dim + k] = v;
      kin += v * v;
    }
    e[i] = U[i][dim + 1] / rho[i] - 0.5 * kin;
  }
  if (force) {
    for (int i = 0; i < n; ++i) force(mesh_.node[i], t + 0.5 * tau, F.data() + static_cast<std::size_t>(i) * dim);
  }

  // Step 1: velocity
  std::vector<double> vdiag(nd), vrhs(nd);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k) {
      const std::size_t r = static_cast<std::size_t>(i) * dim + k;
      vdiag[r] = rm[i];
      vrhs[r] = vfix_[r] ? 0. : rm[i] * V[r] + 0.5 * tau * m[i] * F[r];
    }
  std::vector<double> tmp(nd);
  auto vop = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t r = 0; r < nd; ++r) tmp[r] = vfix_[r] ? 0. : x[r];
    apply_velocity_operator(tmp, y);
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < nd; ++r) y[r] = vfix_[r] ? vdiag[r] * x[r] : vdiag[r] * x[r] + 0.5 * tau * y[r];
  };
  std::vector<double> Vh = V;
  res.velocity_iterations = cg_solve(vop, vdiag, vrhs, Vh, cgopt_).iterations;
  std::vector<double> Vn(nd), work(nd);
  for (std::size_t r = 0; r < nd; ++r) {
    Vn[r] = 2. * Vh[r] - V[r];
    work[r] = m[r / dim] * F[r] * Vh[r];
  }
  res.source_work = tau * deterministic_sum(work.data(), nd);

  // Step 2: internal energy
  const std::vector<double> K = viscous_heating(Vh);
  std::vector<double> gD(n, 0.);
  for (int i = 0; i < n; ++i)
    if (efix_[i]) gD[i] = bc_.boundary_energy(mesh_.node[i], t + tau);

  std::vector<double> etmp(n);
  auto make_eop = [&](double theta) {
    return [&, theta](const std::vector<double>& x, std::vector<double>& y) {
      for (int i = 0; i < n; ++i) etmp[i] = efix_[i] ? 0. : x[i];
      apply_conduction_operator(etmp, y);
#pragma omp parallel for schedule(static)
      for (int i = 0; i < n; ++i) y[i] = efix_[i] ? rm[i] * x[i] : rm[i] * x[i] + theta * y[i];
    };
  };
  // right-hand side with the Dirichlet lift moved over
  auto energy_rhs = [&](double theta, double ksc, const std::vector<double>& fixed) {
    std::vector<double> lift(n, 0.), b(n);
    bool any = false;
    for (int i = 0; i < n; ++i) {
      etmp[i] = efix_[i] ? fixed[i] : 0.;
      any = any || efix_[i];
    }
    if (any) apply_conduction_operator(etmp, lift);
    for (int i = 0; i < n; ++i)
      b[i] = efix_[i] ? rm[i] * fixed[i] : rm[i] * e[i] + ksc * tau * m[i] * K[i] - theta * lift[i];
    return b;
  };

  std::vector<double> fixed_half(n, 0.);
  for (int i = 0; i < n; ++i)
    if (efix_[i]) fixed_half[i] = 0.5 * (e[i] + gD[i]);
  const auto brhs = energy_rhs(0.5 * tau, 0.5, fixed_half);
  std::vector<double> eh = e;
  res.energy_iterations = cg_solve(make_eop(0.5 * tau), rm, brhs, eh, cgopt_).iterations;
  std::vector<double> eH(n);
  for (int i = 0; i < n; ++i) eH[i] = efix_[i] ? gD[i] : 2. * eh[i] - e[i];

  // Step 3: bounds check and limiting
  const double emin = *std::min_element(e.begin(), e.end());
  const double eHmin = *std::min_element(eH.begin(), eH.end());
  res.min_e_before = emin;
  const double floor = min_principle_trigger ? emin * (1. - 1e-12) : 0.;
  std::vector<double> enew = eH;
  if (force_fct || eHmin < floor || !(eHmin > 0.)) {
    res.fct = true;
    const auto blo = energy_rhs(tau, 1., gD);
    std::vector<double> eL = e;
    res.energy_iterations += cg_solve(make_eop(tau), rm, blo, eL, cgopt_).iterations;
    for (int i = 0; i < n; ++i)
      if (efix_[i]) eL[i] = gD[i];

    const double kappa = model_.kappa;
    std::vector<double> A(g_.nnz(), 0.), Rm(n, 1.);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      if (efix_[i]) continue;
      double lo = eL[i], P = 0.;
      for (int k = g_.row[i]; k < g_.row[i + 1]; ++k) {
        const int j = g_.col[k];
        lo = std::min(lo, eL[j]);
        if (j == i) continue;
        const double a = -0.5 * tau * kappa * g_.lap[k] *
                         (eH[j] + e[j] - 2. * eL[j] - eH[i] - e[i] + 2. * eL[i]);
        A[k] = a;
        P += std::min(0., a);
      }
      const double Q = rm[i] * (lo - eL[i]);
      Rm[i] = P < 0. ? std::clamp(Q / P, 0., 1.) : 1.;
    }
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      if (efix_[i]) {
        enew[i] = gD[i];
        continue;
      }
      double s = 0.;
      for (int k = g_.row[i]; k < g_.row[i + 1]; ++k) {
        const int j = g_.col[k];
        if (j == i) continue;
        const double l = A[k] < 0. ? Rm[i] : (efix_[j] ? 1. : Rm[j]);
        s += l * A[k];
      }
      enew[i] = eL[i] + s / rm[i];
    }
  }
  res.min_e_after = *std::min_element(enew.begin(), enew.end());
  if (!(res.min_e_after > 0.)) {
    std::ostringstream os;
    os << "parabolic step produced non-positive internal energy " << res.min_e_after;
    throw InvariantViolation(os.str());
  }

  for (int i = 0; i < n; ++i) {
    double kin = 0.;
    for (int k = 0; k < dim; ++k) {
      const double v = Vn[i * dim + k];
      U[i][1 + k] = rho[i] * v;
      kin += v * v;
    }
    U[i][dim + 1] = rho[i] * enew[i] + 0.5 * rho[i] * kin;
  }
  return res;
}

template class ParabolicSolver<1>;
template class ParabolicSolver<2>;

}  // namespace idpflow
