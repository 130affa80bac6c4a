#include "idpflow/graph.hpp"

#include <algorithm>
#include <cmath>

#include "idpflow/errors.hpp"

namespace idpflow {

int FemGraph::find(int i, int j) const {
  const auto b = col.begin() + row[i], e = col.begin() + row[i + 1];
  const auto it = std::lower_bound(b, e, j);
  return it != e && *it == j ? static_cast<int>(it - col.begin()) : -1;
}

FemGraph assemble_graph(const Mesh& mesh, const CellValues& cv) {
  FemGraph g;
  g.dim = mesh.dim;
  g.n = mesh.n_nodes();
  const int nv = cv.nv, nq = cv.nq, d = cv.dim;

  std::vector<std::vector<int>> adj(g.n);
  for (const auto& cn : mesh.cell_node)
    for (int a = 0; a < nv; ++a)
      for (int b = 0; b < nv; ++b) adj[cn[a]].push_back(cn[b]);
  g.row.assign(g.n + 1, 0);
  for (int i = 0; i < g.n; ++i) {
    auto& r = adj[i];
    r.push_back(i);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    g.row[i + 1] = g.row[i] + static_cast<int>(r.size());
  }
  g.col.reserve(g.row[g.n]);
  for (auto& r : adj) g.col.insert(g.col.end(), r.begin(), r.end());
  adj.clear();

  const std::size_t nnz = g.col.size();
  g.diag.resize(g.n);
  g.transpose.resize(nnz);
  g.lambda.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    g.diag[i] = g.find(i, i);
    const int card = g.row[i + 1] - g.row[i];
    g.lambda[i] = card > 1 ? 1. / (card - 1) : 0.;
    for (int e = g.row[i]; e < g.row[i + 1]; ++e) g.transpose[e] = g.find(g.col[e], i);
  }

  g.mass.assign(g.n, 0.);
  g.mij.assign(nnz, 0.);
  g.lap.assign(nnz, 0.);
  for (int k = 0; k < 2; ++k) g.c[k].assign(k < d ? nnz : 0, 0.);

  for (const auto& color : mesh.colors) {
#pragma omp parallel for schedule(static)
    for (std::size_t t = 0; t < color.size(); ++t) {
      const int c = color[t];
      const auto& cn = mesh.cell_node[c];
      const double* jxw = cv.cell_jxw(c);
      const double* grad = cv.cell_grad(c);
      double lm[4][4] = {}, ll[4][4] = {}, lc[4][4][2] = {}, lmi[4] = {};
      for (int q = 0; q < nq; ++q) {
        const double* phi = cv.phi.data() + q * nv;
        const double* gq = grad + q * nv * d;
        for (int a = 0; a < nv; ++a) {
          lmi[a] += phi[a] * jxw[q];
          for (int b = 0; b < nv; ++b) {
            lm[a][b] += phi[a] * phi[b] * jxw[q];
            double s = 0.;
            for (int k = 0; k < d; ++k) {
              lc[a][b][k] += phi[a] * gq[b * d + k] * jxw[q];
              s += gq[a * d + k] * gq[b * d + k];
            }
            ll[a][b] += s * jxw[q];
          }
        }
      }
      for (int a = 0; a < nv; ++a) {
        g.mass[cn[a]] += lmi[a];
        for (int b = 0; b < nv; ++b) {
          const int e = g.find(cn[a], cn[b]);
          g.mij[e] += lm[a][b];
          g.lap[e] += ll[a][b];
          for (int k = 0; k < d; ++k) g.c[k][e] += lc[a][b][k];
        }
      }
    }
  }

  g.mass_inv.resize(g.n);
  for (int i = 0; i < g.n; ++i) g.mass_inv[i] = 1. / g.mass[i];

  g.cnorm.assign(nnz, 0.);
  for (int k = 0; k < 2; ++k) g.nij[k].assign(k < d ? nnz : 0, 0.);
  for (std::size_t e = 0; e < nnz; ++e) {
    double s = 0.;
    for (int k = 0; k < d; ++k) s += g.c[k][e] * g.c[k][e];
    s = std::sqrt(s);
    g.cnorm[e] = s;
    if (s > 0.)
      for (int k = 0; k < d; ++k) g.nij[k][e] = g.c[k][e] / s;
  }

  g.boundary.assign(g.n, 0);
  for (const auto& f : mesh.faces)
    for (int a = 0; a < (mesh.dim == 1 ? 1 : 2); ++a) g.boundary[f.nodes[a]] = 1;

  compute_b_matrix(g);
  return g;
}

void compute_b_matrix(FemGraph& g) {
  g.bij.resize(g.col.size());
  for (int i = 0; i < g.n; ++i)
    for (int e = g.row[i]; e < g.row[i + 1]; ++e) {
      const int j = g.col[e];
      g.bij[e] = (i == j ? 1. : 0.) - g.mij[e] / g.mass[j];
    }
}

std::string to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::slip: return "slip";
    case BoundaryKind::nonreflecting: return "nonreflecting";
    case BoundaryKind::dirichlet: return "dirichlet";
    case BoundaryKind::none: return "none";
  }
  return "?";
}

BoundaryKind boundary_kind_from_string(const std::string& s) {
  if (s == "slip") return BoundaryKind::slip;
  if (s == "nonreflecting") return BoundaryKind::nonreflecting;
  if (s == "dirichlet") return BoundaryKind::dirichlet;
  if (s == "none") return BoundaryKind::none;
  throw ConfigError("unknown boundary kind '" + s + "' (slip, nonreflecting, dirichlet, none)");
}

bool BoundaryMap::needs_far_field() const {
  for (const auto& [tag, kind] : table)
    if (kind == BoundaryKind::dirichlet || kind == BoundaryKind::nonreflecting) return true;
  return false;
}

BoundaryMap assemble_boundary_map(const Mesh& mesh, const std::map<std::string, BoundaryKind>& table,
                                  FarField far_field) {
  BoundaryMap bm;
  bm.table = table;
  bm.far_field = std::move(far_field);
  for (const auto& t : mesh.tags)
    if (!table.count(t)) throw ConfigError("boundary tag '" + t + "' has no condition");
  if (bm.needs_far_field() && !bm.far_field)
    throw ConfigError("boundary conditions need far-field data but none was given");

  struct Acc {
    Point all{0., 0.}, s{0., 0.}, nr{0., 0.};
    bool slip = false, nonreflecting = false, dirichlet = false, any = false;
  };
  std::vector<Acc> acc(mesh.n_nodes());
  const int per_face = mesh.dim == 1 ? 1 : 2;
  for (const auto& f : mesh.faces) {
    const BoundaryKind kind = table.at(f.tag);
    // int_F phi_a n ds: the trace of phi_a is linear on a straight face.
    const double w = mesh.dim == 1 ? 1. : 0.5 * f.measure;
    auto& tn = bm.tag_nodes[f.tag];
    for (int a = 0; a < per_face; ++a) {
      auto& A = acc[f.nodes[a]];
      A.any = true;
      for (int k = 0; k < 2; ++k) {
        A.all[k] += w * f.normal[k];
        if (kind == BoundaryKind::slip)
          A.s[k] += w * f.normal[k];
        else
          A.nr[k] += w * f.normal[k];
      }
      A.slip |= kind == BoundaryKind::slip;
      A.nonreflecting |= kind == BoundaryKind::nonreflecting;
      A.dirichlet |= kind == BoundaryKind::dirichlet;
      tn.emplace_back(f.nodes[a], w);
    }
  }
  for (auto& [tag, list] : bm.tag_nodes) {
    std::sort(list.begin(), list.end());
    std::vector<std::pair<int, double>> merged;
    for (const auto& [i, w] : list) {
      if (!merged.empty() && merged.back().first == i)
        merged.back().second += w;
      else
        merged.emplace_back(i, w);
    }
    list = std::move(merged);
  }
  auto normalize = [](const Point& v, double& m, Point& n) {
    m = std::hypot(v[0], v[1]);
    n = m > 0. ? Point{v[0] / m, v[1] / m} : Point{0., 0.};
  };
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    const auto& A = acc[i];
    if (!A.any) continue;
    BoundaryNode b;
    b.node = i;
    b.x = mesh.node[i];
    normalize(A.all, b.m_bd, b.n_bd);
    normalize(A.s, b.m_s, b.n_s);
    normalize(A.nr, b.m_nr, b.n_nr);
    b.slip = A.slip;
    b.nonreflecting = A.nonreflecting;
    b.dirichlet = A.dirichlet;
    bm.nodes.push_back(b);
  }
  return bm;
}

}  // namespace idpflow
