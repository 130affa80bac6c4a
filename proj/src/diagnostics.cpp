#include "idpflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "idpflow/errors.hpp"

namespace idpflow {

template <int dim>
ErrorNorms error_norms(const Field<dim>& U, const Mesh& mesh, const FemGraph& g, const ExactSolution<dim>& exact) {
  // [component][norm]: numerator and denominator
  double num[3][3] = {}, den[3][3] = {};
  for (int i = 0; i < g.n; ++i) {
    const auto ue = exact(mesh.node[i]);
    const auto& u = U[i];
    double d[3], r[3];
    d[0] = std::abs(u[0] - ue[0]);
    r[0] = std::abs(ue[0]);
    double dm = 0., rm = 0.;
    for (int k = 0; k < dim; ++k) {
      dm += (u[1 + k] - ue[1 + k]) * (u[1 + k] - ue[1 + k]);
      rm += ue[1 + k] * ue[1 + k];
    }
    d[1] = std::sqrt(dm);
    r[1] = std::sqrt(rm);
    d[2] = std::abs(u[dim + 1] - ue[dim + 1]);
    r[2] = std::abs(ue[dim + 1]);
    const double m = g.mass[i];
    for (int c = 0; c < 3; ++c) {
      num[c][0] += m * d[c];
      den[c][0] += m * r[c];
      num[c][1] += m * d[c] * d[c];
      den[c][1] += m * r[c] * r[c];
      num[c][2] = std::max(num[c][2], d[c]);
      den[c][2] = std::max(den[c][2], r[c]);
    }
  }
  ErrorNorms e;
  for (int c = 0; c < 3; ++c) {
    for (int p = 0; p < 3; ++p)
      if (!(den[c][p] > 0.)) throw DomainError("error_norms: exact solution component has zero norm");
    e.l1 += num[c][0] / den[c][0];
    e.l2 += std::sqrt(num[c][1] / den[c][1]);
    e.linf += num[c][2] / den[c][2];
  }
  return e;
}

template <int dim>
double density_l1_error(const Field<dim>& U, const Mesh& mesh, const FemGraph& g, const ExactSolution<dim>& exact) {
  double s = 0.;
  for (int i = 0; i < g.n; ++i) s += g.mass[i] * std::abs(U[i][0] - exact(mesh.node[i])[0]);
  return s;
}

std::vector<WallSample> skin_friction(const Field<2>& U, const Mesh& mesh, const ViscousModel& model,
                                      const std::string& tag, double rho_inf, double v_inf) {
  if (!(rho_inf > 0.) || !(v_inf != 0.)) throw ConfigError("skin friction needs positive reference density and speed");
  if (mesh.dim != 2) throw DomainError("skin friction is defined for 2D meshes");
  const double lam = model.lambda - 2. / 3. * model.mu;
  std::map<int, std::pair<double, double>> acc;  // node -> (int phi t.sn, int phi)
  bool found = false;
  for (const auto& f : mesh.faces) {
    if (f.tag != tag) continue;
    found = true;
    const auto fv = face_values(mesh, f);
    const auto& cn = mesh.cell_node[f.cell];
    const double n[2] = {f.normal[0], f.normal[1]};
    const double t[2] = {-n[1], n[0]};
    for (int q = 0; q < fv.nq; ++q) {
      double G[2][2] = {};
      for (int a = 0; a < 4; ++a) {
        const auto& u = U[cn[a]];
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) G[k][l] += u[1 + k] / u[0] * fv.grad[q][a][l];
      }
      const double div = G[0][0] + G[1][1];
      double ts = 0.;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const double s = model.mu * (G[k][l] + G[l][k]) + (k == l ? lam * div : 0.);
          ts += t[k] * s * n[l];
        }
      for (int a = 0; a < 4; ++a) {
        const double w = fv.weight[q] * fv.phi[q][a];
        if (w == 0.) continue;
        auto& e = acc[cn[a]];
        e.first += w * ts;
        e.second += w;
      }
    }
  }
  if (!found) throw ConfigError("skin friction: no boundary faces with tag '" + tag + "'");
  const double q = 0.5 * rho_inf * v_inf * v_inf;
  std::vector<WallSample> out;
  for (const auto& [i, e] : acc)
    if (e.second > 0.) out.push_back({mesh.node[i], e.first / e.second / q});
  std::sort(out.begin(), out.end(), [](const WallSample& a, const WallSample& b) {
    return a.x[0] != b.x[0] ? a.x[0] < b.x[0] : a.x[1] < b.x[1];
  });
  return out;
}

namespace {

double nodal_curl(const Field<2>& U, const FemGraph& g, int i) {
  double s = 0.;
  for (int e = g.row[i]; e < g.row[i + 1]; ++e) {
    const int j = g.col[e];
    const double vx = U[j][1] / U[j][0], vy = U[j][2] / U[j][0];
    s += g.c[0][e] * vy - g.c[1][e] * vx;
  }
  return s * g.mass_inv[i];
}

}  // namespace

double max_vorticity(const Field<2>& U, const FemGraph& g) {
  double m = 0.;
  for (int i = 0; i < g.n; ++i) m = std::max(m, std::abs(nodal_curl(U, g, i)));
  return m;
}

VortexDiagnostics vortex_diagnostics(const Field<2>& U, const FemGraph& g, const Vec<2>& v_inf, double curl0) {
  const double vn = std::hypot(v_inf[0], v_inf[1]);
  if (!(vn > 0.) || !(curl0 > 0.)) throw DomainError("vortex diagnostics: zero normalization");
  VortexDiagnostics d;
  for (int i = 0; i < g.n; ++i) {
    const double dx = U[i][1] / U[i][0] - v_inf[0], dy = U[i][2] / U[i][0] - v_inf[1];
    d.delta1 = std::max(d.delta1, std::hypot(dx, dy));
  }
  d.delta1 /= vn;
  d.delta2 = max_vorticity(U, g) / curl0;
  return d;
}

template <int dim>
std::vector<double> schlieren(const Field<dim>& U, const FemGraph& g, double beta) {
  std::vector<double> gr(g.n, 0.);
  for (int i = 0; i < g.n; ++i) {
    double s = 0.;
    for (int k = 0; k < dim; ++k) {
      double v = 0.;
      for (int e = g.row[i]; e < g.row[i + 1]; ++e) v += (U[g.col[e]][0] - U[i][0]) * g.c[k][e];
      s += v * v;
    }
    gr[i] = std::sqrt(s) * g.mass_inv[i];
  }
  const auto [lo, hi] = std::minmax_element(gr.begin(), gr.end());
  const double gmin = *lo, gmax = *hi;
  std::vector<double> out(g.n, 1.);
  if (gmax > gmin)
    for (int i = 0; i < g.n; ++i) out[i] = std::exp(-beta * (gr[i] - gmin) / (gmax - gmin));
  return out;
}

PressureAverager::PressureAverager(const Mesh& mesh, const std::string& tag) {
  std::map<int, Point> nodes;
  for (const auto& f : mesh.faces) {
    if (f.tag != tag) continue;
    for (int a = 0; a < (mesh.dim == 1 ? 1 : 2); ++a) nodes[f.nodes[a]] = mesh.node[f.nodes[a]];
  }
  if (nodes.empty()) throw ConfigError("pressure coefficient: no boundary faces with tag '" + tag + "'");
  for (const auto& [i, x] : nodes) {
    nodes_.push_back(i);
    x_.push_back(x);
  }
  sum_.assign(nodes_.size(), 0.);
}

void PressureAverager::add(const Field<2>& U, const GasLaw& law, double weight) {
  for (std::size_t k = 0; k < nodes_.size(); ++k) sum_[k] += weight * pressure<2>(U[nodes_[k]], law);
  weight_ += weight;
}

std::vector<WallSample> PressureAverager::coefficient(double p_inf, double rho_inf, double v_inf) const {
  if (!(weight_ > 0.)) throw DomainError("pressure coefficient: empty averaging window");
  const double q = 0.5 * rho_inf * v_inf * v_inf;
  if (!(q > 0.)) throw ConfigError("pressure coefficient needs positive reference density and speed");
  std::vector<WallSample> out;
  for (std::size_t k = 0; k < nodes_.size(); ++k) out.push_back({x_[k], (sum_[k] / weight_ - p_inf) / q});
  return out;
}

template ErrorNorms error_norms<1>(const Field<1>&, const Mesh&, const FemGraph&, const ExactSolution<1>&);
template ErrorNorms error_norms<2>(const Field<2>&, const Mesh&, const FemGraph&, const ExactSolution<2>&);
template double density_l1_error<1>(const Field<1>&, const Mesh&, const FemGraph&, const ExactSolution<1>&);
template double density_l1_error<2>(const Field<2>&, const Mesh&, const FemGraph&, const ExactSolution<2>&);
template std::vector<double> schlieren<1>(const Field<1>&, const FemGraph&, double);
template std::vector<double> schlieren<2>(const Field<2>&, const FemGraph&, double);

}  // namespace idpflow
