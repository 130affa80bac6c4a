#include "idpflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "idpflow/errors.hpp"
#include "idpflow/parallel.hpp"

namespace idpflow {

namespace {

const std::array<double, 3> gauss_x{0.5 - 0.5 * 0.7745966692414834, 0.5, 0.5 + 0.5 * 0.7745966692414834};
const std::array<double, 3> gauss_w{5. / 18., 8. / 18., 5. / 18.};

Side side_from_name(const std::string& s) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  if (s == "bottom") return Side::bottom;
  if (s == "top") return Side::top;
  throw ConfigError("mesh.tag_rules: unknown side '" + s + "'");
}

// Reference shape functions on [0,1]^d with lexicographic vertex order.
void shape(int dim, double xi, double eta, double* phi, double (*dphi)[2]) {
  if (dim == 1) {
    phi[0] = 1. - xi;
    phi[1] = xi;
    dphi[0][0] = -1.;
    dphi[1][0] = 1.;
    return;
  }
  phi[0] = (1. - xi) * (1. - eta);
  phi[1] = xi * (1. - eta);
  phi[2] = (1. - xi) * eta;
  phi[3] = xi * eta;
  dphi[0][0] = -(1. - eta);
  dphi[0][1] = -(1. - xi);
  dphi[1][0] = 1. - eta;
  dphi[1][1] = -xi;
  dphi[2][0] = -eta;
  dphi[2][1] = 1. - xi;
  dphi[3][0] = eta;
  dphi[3][1] = xi;
}

// Physical gradients and Jacobian determinant at reference point (xi, eta).
double map_point(const Mesh& mesh, int c, double xi, double eta, double* phi, double (*grad)[2]) {
  const int nv = mesh.vertices_per_cell();
  double dref[4][2];
  shape(mesh.dim, xi, eta, phi, dref);
  if (mesh.dim == 1) {
    const double J = mesh.vertex[mesh.cell_vertex[c][1]][0] - mesh.vertex[mesh.cell_vertex[c][0]][0];
    if (!(J > 0.)) throw MeshError("cell " + std::to_string(c) + " has non-positive length");
    for (int a = 0; a < nv; ++a) grad[a][0] = dref[a][0] / J;
    return J;
  }
  double J[2][2] = {{0., 0.}, {0., 0.}};
  for (int a = 0; a < nv; ++a) {
    const auto& x = mesh.vertex[mesh.cell_vertex[c][a]];
    for (int r = 0; r < 2; ++r)
      for (int s = 0; s < 2; ++s) J[r][s] += x[r] * dref[a][s];
  }
  const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  if (!(det > 0.)) throw MeshError("cell " + std::to_string(c) + " has non-positive Jacobian");
  const double inv[2][2] = {{J[1][1] / det, -J[0][1] / det}, {-J[1][0] / det, J[0][0] / det}};
  for (int a = 0; a < nv; ++a)
    for (int k = 0; k < 2; ++k) grad[a][k] = dref[a][0] * inv[0][k] + dref[a][1] * inv[1][k];
  return det;
}

}  // namespace

std::string to_string(Side s) {
  switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::bottom: return "bottom";
    case Side::top: return "top";
  }
  return "?";
}

double Mesh::volume() const {
  double v = 1.;
  for (int k = 0; k < dim; ++k) v *= hi[k] - lo[k];
  return v;
}

Mesh build_structured_mesh(const MeshSpec& spec) {
  if (spec.dim != 1 && spec.dim != 2) throw ConfigError("mesh.dim must be 1 or 2");
  for (int k = 0; k < spec.dim; ++k) {
    if (spec.cells[k] < 1) throw ConfigError("mesh.cells must be >= 1");
    if (!(spec.hi[k] > spec.lo[k])) throw ConfigError("mesh extents are degenerate");
  }
  if (!(spec.perturbation >= 0. && spec.perturbation < 0.5))
    throw ConfigError("mesh.perturbation must lie in [0, 0.5)");

  std::map<Side, std::string> tag_of;
  tag_of[Side::left] = "left";
  tag_of[Side::right] = "right";
  tag_of[Side::bottom] = "bottom";
  tag_of[Side::top] = "top";
  for (const auto& [name, tag] : spec.tag_rules) {
    const Side s = side_from_name(name);
    const int dir = (s == Side::left || s == Side::right) ? 0 : 1;
    if (dir >= spec.dim) throw ConfigError("mesh.tag_rules: side '" + name + "' does not exist in 1D");
    if (spec.periodic[dir])
      throw ConfigError("mesh.tag_rules: side '" + name + "' lies in a periodic direction");
    tag_of[s] = tag;
  }

  Mesh m;
  m.dim = spec.dim;
  m.lo = spec.lo;
  m.hi = spec.hi;
  m.cells = {spec.cells[0], spec.dim == 2 ? spec.cells[1] : 1};
  m.periodic = {spec.periodic[0], spec.dim == 2 && spec.periodic[1]};
  const int nx = m.cells[0], ny = m.cells[1];
  const int vx = nx + 1, vy = spec.dim == 2 ? ny + 1 : 1;
  const int ux = m.periodic[0] ? nx : nx + 1;
  const int uy = spec.dim == 2 ? (m.periodic[1] ? ny : ny + 1) : 1;
  const double hx = (spec.hi[0] - spec.lo[0]) / nx;
  const double hy = spec.dim == 2 ? (spec.hi[1] - spec.lo[1]) / ny : 0.;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(-1., 1.);
  m.vertex.resize(static_cast<std::size_t>(vx) * vy);
  m.vertex_to_node.resize(m.vertex.size());
  for (int j = 0; j < vy; ++j)
    for (int i = 0; i < vx; ++i) {
      Point p{spec.lo[0] + i * hx, spec.dim == 2 ? spec.lo[1] + j * hy : 0.};
      if (i == nx) p[0] = spec.hi[0];
      if (spec.dim == 2 && j == ny) p[1] = spec.hi[1];
      const bool interior_x = i > 0 && i < nx;
      const bool interior_y = spec.dim == 1 || (j > 0 && j < ny);
      if (spec.perturbation > 0. && interior_x && interior_y) {
        p[0] += spec.perturbation * hx * unif(rng);
        if (spec.dim == 2) p[1] += spec.perturbation * hy * unif(rng);
      }
      const int v = i + vx * j;
      m.vertex[v] = p;
      const int ni = m.periodic[0] ? i % nx : i;
      const int nj = spec.dim == 2 && m.periodic[1] ? j % ny : j;
      m.vertex_to_node[v] = ni + ux * nj;
    }
  m.node.resize(static_cast<std::size_t>(ux) * uy);
  for (int j = 0; j < uy; ++j)
    for (int i = 0; i < ux; ++i) m.node[i + ux * j] = m.vertex[i + vx * j];

  const int nv = m.vertices_per_cell();
  m.cell_vertex.resize(static_cast<std::size_t>(nx) * ny);
  m.cell_node.resize(m.cell_vertex.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int c = i + nx * j;
      std::array<int, 4> cv{};
      if (spec.dim == 1) {
        cv = {i, i + 1, -1, -1};
      } else {
        cv = {i + vx * j, i + 1 + vx * j, i + vx * (j + 1), i + 1 + vx * (j + 1)};
      }
      m.cell_vertex[c] = cv;
      std::array<int, 4> cn{-1, -1, -1, -1};
      for (int a = 0; a < nv; ++a) cn[a] = m.vertex_to_node[cv[a]];
      m.cell_node[c] = cn;
    }

  auto add_tag = [&](const std::string& t) {
    if (std::find(m.tags.begin(), m.tags.end(), t) == m.tags.end()) m.tags.push_back(t);
  };
  if (spec.dim == 1) {
    if (!m.periodic[0]) {
      m.faces.push_back({0, Side::left, tag_of[Side::left], {0, -1}, {-1., 0.}, 1.});
      m.faces.push_back({nx - 1, Side::right, tag_of[Side::right], {m.cell_node[nx - 1][1], -1}, {1., 0.}, 1.});
    }
  } else {
    if (!m.periodic[0])
      for (int j = 0; j < ny; ++j) {
        const int cl = nx * j, cr = nx - 1 + nx * j;
        m.faces.push_back({cl, Side::left, tag_of[Side::left], {m.cell_node[cl][0], m.cell_node[cl][2]},
                           {-1., 0.}, 0.});
        m.faces.push_back({cr, Side::right, tag_of[Side::right], {m.cell_node[cr][1], m.cell_node[cr][3]},
                           {1., 0.}, 0.});
      }
    if (!m.periodic[1])
      for (int i = 0; i < nx; ++i) {
        const int cb = i, ct = i + nx * (ny - 1);
        m.faces.push_back({cb, Side::bottom, tag_of[Side::bottom], {m.cell_node[cb][0], m.cell_node[cb][1]},
                           {0., -1.}, 0.});
        m.faces.push_back({ct, Side::top, tag_of[Side::top], {m.cell_node[ct][2], m.cell_node[ct][3]},
                           {0., 1.}, 0.});
      }
    for (auto& f : m.faces) {
      const auto& cv = m.cell_vertex[f.cell];
      std::array<int, 2> lv{};
      switch (f.side) {
        case Side::left: lv = {0, 2}; break;
        case Side::right: lv = {1, 3}; break;
        case Side::bottom: lv = {0, 1}; break;
        case Side::top: lv = {2, 3}; break;
      }
      const auto& a = m.vertex[cv[lv[0]]];
      const auto& b = m.vertex[cv[lv[1]]];
      f.measure = std::hypot(b[0] - a[0], b[1] - a[1]);
    }
  }
  std::stable_sort(m.faces.begin(), m.faces.end(),
                   [](const BoundaryFace& a, const BoundaryFace& b) { return a.side < b.side; });
  for (const auto& f : m.faces) add_tag(f.tag);

  // Parity coloring per direction; a periodic direction with an odd cell
  // count needs a third class for its last layer.
  auto cls = [&](int i, int dir) {
    const int n = m.cells[dir];
    if (m.periodic[dir] && n % 2 == 1 && n > 1 && i == n - 1) return 2;
    return i % 2;
  };
  std::map<int, std::vector<int>> groups;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) groups[cls(i, 0) + 3 * (spec.dim == 2 ? cls(j, 1) : 0)].push_back(i + nx * j);
  for (auto& [k, g] : groups) m.colors.push_back(std::move(g));
  return m;
}

CellValues build_cell_values(const Mesh& mesh) {
  CellValues cv;
  cv.dim = mesh.dim;
  cv.nv = mesh.vertices_per_cell();
  cv.nq = mesh.dim == 1 ? 3 : 9;
  const int nc = mesh.n_cells();
  cv.phi.resize(static_cast<std::size_t>(cv.nq) * cv.nv);
  cv.jxw.resize(static_cast<std::size_t>(nc) * cv.nq);
  cv.grad.resize(static_cast<std::size_t>(nc) * cv.nq * cv.nv * cv.dim);
  std::vector<std::array<double, 3>> pts;  // xi, eta, weight
  if (mesh.dim == 1)
    for (int q = 0; q < 3; ++q) pts.push_back({gauss_x[q], 0., gauss_w[q]});
  else
    for (int qy = 0; qy < 3; ++qy)
      for (int qx = 0; qx < 3; ++qx) pts.push_back({gauss_x[qx], gauss_x[qy], gauss_w[qx] * gauss_w[qy]});

  for (int q = 0; q < cv.nq; ++q) {
    double phi[4], d[4][2];
    shape(mesh.dim, pts[q][0], pts[q][1], phi, d);
    for (int a = 0; a < cv.nv; ++a) cv.phi[q * cv.nv + a] = phi[a];
  }
  ExceptionTrap trap;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < nc; ++c) {
    trap.run([&] {
      double phi[4], g[4][2];
      for (int q = 0; q < cv.nq; ++q) {
        const double det = map_point(mesh, c, pts[q][0], pts[q][1], phi, g);
        cv.jxw[static_cast<std::size_t>(c) * cv.nq + q] = det * pts[q][2];
        double* out = cv.grad.data() + (static_cast<std::size_t>(c) * cv.nq + q) * cv.nv * cv.dim;
        for (int a = 0; a < cv.nv; ++a)
          for (int k = 0; k < cv.dim; ++k) out[a * cv.dim + k] = g[a][k];
      }
    });
  }
  trap.rethrow();
  return cv;
}

FaceValues face_values(const Mesh& mesh, const BoundaryFace& face) {
  FaceValues fv;
  if (mesh.dim == 1) {
    fv.nq = 1;
    const double xi = face.side == Side::left ? 0. : 1.;
    double g[4][2];
    map_point(mesh, face.cell, xi, 0., fv.phi[0].data(), g);
    for (int a = 0; a < 2; ++a) fv.grad[0][a] = {g[a][0], 0.};
    fv.weight[0] = 1.;
    return fv;
  }
  fv.nq = 3;
  for (int q = 0; q < 3; ++q) {
    double xi = 0., eta = 0.;
    switch (face.side) {
      case Side::left: xi = 0.; eta = gauss_x[q]; break;
      case Side::right: xi = 1.; eta = gauss_x[q]; break;
      case Side::bottom: xi = gauss_x[q]; eta = 0.; break;
      case Side::top: xi = gauss_x[q]; eta = 1.; break;
    }
    double g[4][2];
    map_point(mesh, face.cell, xi, eta, fv.phi[q].data(), g);
    for (int a = 0; a < 4; ++a) fv.grad[q][a] = {g[a][0], g[a][1]};
    fv.weight[q] = gauss_w[q] * face.measure;
  }
  return fv;
}

void write_vtk(const std::string& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, std::vector<double>>>& point_data) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  os.precision(17);
  // Periodic meshes are written on the full vertex grid so that cells do not wrap.
  const std::size_t nv = mesh.vertex.size();
  os << "# vtk DataFile Version 3.0\nidpflow\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << nv << " double\n";
  for (const auto& p : mesh.vertex) os << p[0] << ' ' << p[1] << " 0\n";
  const int per = mesh.vertices_per_cell();
  os << "CELLS " << mesh.n_cells() << ' ' << mesh.n_cells() * (per + 1) << '\n';
  for (const auto& c : mesh.cell_vertex) {
    if (per == 2)
      os << "2 " << c[0] << ' ' << c[1] << '\n';
    else
      os << "4 " << c[0] << ' ' << c[1] << ' ' << c[3] << ' ' << c[2] << '\n';
  }
  os << "CELL_TYPES " << mesh.n_cells() << '\n';
  for (int c = 0; c < mesh.n_cells(); ++c) os << (per == 2 ? 3 : 9) << '\n';
  if (!point_data.empty()) {
    os << "POINT_DATA " << nv << '\n';
    for (const auto& [name, values] : point_data) {
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (std::size_t v = 0; v < nv; ++v) os << values[mesh.vertex_to_node[v]] << '\n';
    }
  }
}

}  // namespace idpflow
