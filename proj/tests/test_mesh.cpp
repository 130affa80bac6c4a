#include <cmath>

#include "doctest.h"
#include "idpflow/errors.hpp"
#include "idpflow/graph.hpp"
#include "test_util.hpp"

using namespace idpflow;
using testutil::close;

namespace {

MeshSpec spec1d(int n, double a = 0., double b = 1.) {
  MeshSpec s;
  s.dim = 1;
  s.lo = {a, 0.};
  s.hi = {b, 0.};
  s.cells = {n, 1};
  return s;
}

MeshSpec spec2d(int nx, int ny, double perturb = 0., std::uint64_t seed = 0) {
  MeshSpec s;
  s.dim = 2;
  s.cells = {nx, ny};
  s.perturbation = perturb;
  s.seed = seed;
  return s;
}

FemGraph graph_of(const Mesh& m) { return assemble_graph(m, build_cell_values(m)); }

void check_identities(const Mesh& m, const FemGraph& g) {
  double vol = 0.;
  for (int i = 0; i < g.n; ++i) {
    vol += g.mass[i];
    double msum = 0., cs[2] = {0., 0.};
    for (int e = g.row[i]; e < g.row[i + 1]; ++e) {
      msum += g.mij[e];
      for (int k = 0; k < g.dim; ++k) cs[k] += g.c[k][e];
    }
    CHECK(close(msum, g.mass[i], 1e-13));
    if (!g.boundary[i])
      for (int k = 0; k < g.dim; ++k) CHECK(std::abs(cs[k]) <= 1e-13 * std::sqrt(g.mass[i]));
    for (int e = g.row[i]; e < g.row[i + 1]; ++e) {
      const int j = g.col[e], t = g.transpose[e];
      CHECK(g.col[t] == i);
      CHECK(close(g.mij[e], g.mij[t], 1e-14));
      CHECK(close(g.lap[e], g.lap[t], 1e-12, 1e-14));
      if (!g.boundary[i] || !g.boundary[j])
        for (int k = 0; k < g.dim; ++k) CHECK(std::abs(g.c[k][e] + g.c[k][t]) <= 1e-13 * g.cnorm[e] + 1e-15);
      if (g.cnorm[e] > 0.) {
        double s = 0.;
        for (int k = 0; k < g.dim; ++k) s += g.nij[k][e] * g.nij[k][e];
        CHECK(std::abs(s - 1.) < 1e-14);
      }
    }
  }
  CHECK(close(vol, m.volume(), 1e-13));
  // Column sums of b vanish.
  std::vector<double> colsum(g.n, 0.);
  for (int i = 0; i < g.n; ++i)
    for (int e = g.row[i]; e < g.row[i + 1]; ++e) colsum[g.col[e]] += g.bij[e];
  for (double s : colsum) CHECK(std::abs(s) < 1e-13);
}

}  // namespace

TEST_CASE("mesh counts") {
  auto m1 = build_structured_mesh(spec1d(4));
  CHECK(m1.n_nodes() == 5);
  CHECK(m1.faces.size() == 2);
  CHECK(m1.faces[0].tag == "left");
  CHECK(m1.faces[1].tag == "right");

  auto m2 = build_structured_mesh(spec2d(2, 2));
  CHECK(m2.n_nodes() == 9);
  CHECK(m2.faces.size() == 8);

  auto sp = spec2d(2, 2);
  sp.periodic = {false, true};
  auto m3 = build_structured_mesh(sp);
  CHECK(m3.n_nodes() == 6);
  CHECK(m3.faces.size() == 4);
  for (const auto& f : m3.faces) CHECK((f.side == Side::left || f.side == Side::right));
}

TEST_CASE("tag rules") {
  auto sp = spec2d(3, 2);
  sp.tag_rules = {{"bottom", "wall"}, {"top", "wall"}};
  auto m = build_structured_mesh(sp);
  int walls = 0;
  for (const auto& f : m.faces) walls += f.tag == "wall";
  CHECK(walls == 6);
  CHECK(m.tags.size() == 3);

  sp.periodic = {false, true};
  CHECK_THROWS_AS(build_structured_mesh(sp), ConfigError);
  sp.tag_rules = {{"front", "x"}};
  CHECK_THROWS_AS(build_structured_mesh(sp), ConfigError);
}

TEST_CASE("coloring separates cells sharing a node") {
  for (auto per : {std::array<bool, 2>{false, false}, {true, true}, {true, false}}) {
    for (auto n : {std::array<int, 2>{3, 5}, {4, 4}, {5, 2}}) {
      auto sp = spec2d(n[0], n[1]);
      sp.periodic = per;
      auto m = build_structured_mesh(sp);
      int total = 0;
      for (const auto& col : m.colors) {
        std::vector<int> seen(m.n_nodes(), -1);
        for (int c : col)
          for (int a = 0; a < 4; ++a) {
            const int i = m.cell_node[c][a];
            CHECK((seen[i] == -1 || seen[i] == c));
            seen[i] = c;
          }
        total += static_cast<int>(col.size());
      }
      CHECK(total == m.n_cells());
    }
  }
}

TEST_CASE("1D uniform closed-form entries") {
  const int n = 8;
  const double h = 2. / n;
  auto m = build_structured_mesh(spec1d(n, -1., 1.));
  auto g = graph_of(m);
  for (int i = 1; i < n; ++i) {
    CHECK(close(g.mass[i], h, 1e-14));
    CHECK(close(g.mij[g.find(i, i + 1)], h / 6., 1e-14));
    CHECK(close(g.mij[g.find(i, i - 1)], h / 6., 1e-14));
    CHECK(close(g.mij[g.diag[i]], 2. * h / 3., 1e-14));
    CHECK(close(g.c[0][g.find(i, i + 1)], 0.5, 1e-14));
    CHECK(close(g.c[0][g.find(i, i - 1)], -0.5, 1e-14));
    CHECK(std::abs(g.c[0][g.diag[i]]) < 1e-15);
    if (i + 1 < n) CHECK(close(g.bij[g.find(i, i + 1)], -1. / 6., 1e-14));
    CHECK(close(g.bij[g.diag[i]], 1. - (2. * h / 3.) / h, 1e-14));
    CHECK(close(g.lap[g.diag[i]], 2. / h, 1e-14));
    CHECK(close(g.lap[g.find(i, i + 1)], -1. / h, 1e-14));
    CHECK(g.lambda[i] == 0.5);
  }
  CHECK(close(g.mass[0], h / 2., 1e-14));
  // Boundary pair: c_ij + c_ji equals the boundary integral of phi_i phi_j n.
  CHECK(close(g.c[0][g.diag[0]], -0.5, 1e-14));
  CHECK(g.boundary[0]);
  CHECK(!g.boundary[1]);
  check_identities(m, g);
}

TEST_CASE("2D uniform closed-form entries") {
  const int n = 4;
  const double h = 1. / n;
  auto m = build_structured_mesh(spec2d(n, n));
  auto g = graph_of(m);
  const int i = 2 + 5 * 2;  // center node
  CHECK(close(g.mass[i], h * h, 1e-14));
  CHECK(close(g.mij[g.diag[i]], 4. * h * h / 9., 1e-14));
  CHECK(close(g.mij[g.find(i, i + 1)], h * h / 9., 1e-14));
  CHECK(close(g.mij[g.find(i, i + 6)], h * h / 36., 1e-14));
  CHECK(close(g.c[0][g.find(i, i + 1)], h / 3., 1e-14));
  CHECK(std::abs(g.c[1][g.find(i, i + 1)]) < 1e-16);
  CHECK(close(g.c[0][g.find(i, i + 6)], h / 12., 1e-14));
  CHECK(close(g.c[1][g.find(i, i + 6)], h / 12., 1e-14));
  CHECK(close(g.c[1][g.find(i, i - 5)], -h / 3., 1e-14));
  CHECK(close(g.lap[g.diag[i]], 8. / 3., 1e-14));
  CHECK(close(g.lap[g.find(i, i + 1)], -1. / 3., 1e-14));
  CHECK(close(g.lap[g.find(i, i + 6)], -1. / 3., 1e-14));
  CHECK(g.row[i + 1] - g.row[i] == 9);
  CHECK(g.lambda[i] == doctest::Approx(1. / 8.));
  CHECK(close(g.mass[0], h * h / 4., 1e-14));
  check_identities(m, g);
}

TEST_CASE("identities on perturbed and periodic meshes") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto sp = spec2d(7, 5, 0.3, seed);
    sp.hi = {2., 1.5};
    auto m = build_structured_mesh(sp);
    check_identities(m, graph_of(m));
  }
  auto sp = spec2d(5, 4, 0.25, 9);
  sp.periodic = {true, false};
  auto m = build_structured_mesh(sp);
  auto g = graph_of(m);
  check_identities(m, g);
  // Every node of the periodic direction has a full stencil in x.
  for (int i = 0; i < g.n; ++i)
    if (!g.boundary[i]) CHECK(g.row[i + 1] - g.row[i] == 9);

  auto m1 = build_structured_mesh([] {
    auto s = spec1d(6);
    s.periodic = {true, false};
    s.perturbation = 0.3;
    s.seed = 4;
    return s;
  }());
  auto g1 = graph_of(m1);
  CHECK(m1.faces.empty());
  check_identities(m1, g1);
}

TEST_CASE("boundary pairs: c_ij + c_ji is the boundary integral") {
  const double h = 0.25;
  auto m = build_structured_mesh(spec2d(4, 4, 0.2, 3));
  auto g = graph_of(m);
  // Bottom edge nodes 1 and 2: int phi_1 phi_2 n ds = h/6 (0, -1).
  const int e = g.find(1, 2);
  CHECK(close(g.c[1][e] + g.c[1][g.transpose[e]], -h / 6., 1e-13));
  CHECK(std::abs(g.c[0][e] + g.c[0][g.transpose[e]]) < 1e-15);
  // Diagonal entry at a bottom edge node: 2 c_ii = int phi_i^2 n ds = 2h/3 (0, -1).
  CHECK(close(2. * g.c[1][g.diag[1]], -2. * h / 3., 1e-13));
}

TEST_CASE("degenerate cells are rejected") {
  auto sp = spec1d(2);
  sp.hi = {0., 0.};
  CHECK_THROWS_AS(build_structured_mesh(sp), ConfigError);
  Mesh m = build_structured_mesh(spec1d(3));
  m.vertex[1][0] = 0.9;  // fold the first cell over the second
  CHECK_THROWS_AS(build_cell_values(m), MeshError);
}

TEST_CASE("boundary map normals and masses") {
  const double h = 0.25;
  auto m = build_structured_mesh(spec2d(4, 4));
  std::map<std::string, BoundaryKind> slip{{"left", BoundaryKind::slip},
                                           {"right", BoundaryKind::slip},
                                           {"bottom", BoundaryKind::slip},
                                           {"top", BoundaryKind::slip}};
  auto bm = assemble_boundary_map(m, slip);
  CHECK(bm.nodes.size() == 16);
  const auto& c0 = bm.nodes[0];
  CHECK(c0.node == 0);
  CHECK(close(c0.n_bd[0], -std::sqrt(0.5), 1e-15));
  CHECK(close(c0.n_bd[1], -std::sqrt(0.5), 1e-15));
  CHECK(close(c0.m_bd, std::sqrt(2.) * h / 2., 1e-15));
  CHECK(c0.m_nr == 0.);
  const auto& e1 = bm.nodes[1];  // straight bottom edge node
  CHECK(e1.n_bd[0] == 0.);
  CHECK(e1.n_bd[1] == -1.);
  CHECK(close(e1.m_bd, h, 1e-15));

  auto mixed = slip;
  mixed["right"] = BoundaryKind::nonreflecting;
  CHECK_THROWS_AS(assemble_boundary_map(m, mixed), ConfigError);  // far field missing
  auto bm3 = assemble_boundary_map(m, mixed, [](const Point&, double, double* u) {
    u[0] = 1.;
    u[1] = u[2] = 0.;
    u[3] = 2.5;
  });
  int interface = 0;
  for (const auto& b : bm3.nodes) {
    for (int k = 0; k < 2; ++k)
      CHECK(std::abs(b.m_bd * b.n_bd[k] - b.m_s * b.n_s[k] - b.m_nr * b.n_nr[k]) < 1e-14);
    if (b.slip && b.nonreflecting) {
      ++interface;
      CHECK(b.n_s[1] != 0.);
      CHECK(b.n_nr[0] == 1.);
    }
  }
  CHECK(interface == 2);

  std::map<std::string, BoundaryKind> partial{{"left", BoundaryKind::slip}};
  CHECK_THROWS_AS(assemble_boundary_map(m, partial), ConfigError);
}

TEST_CASE("per-tag boundary masses sum to the face lengths") {
  auto sp = spec2d(6, 3, 0.2, 8);
  sp.hi = {3., 1.};
  auto m = build_structured_mesh(sp);
  std::map<std::string, BoundaryKind> t{{"left", BoundaryKind::none},
                                        {"right", BoundaryKind::none},
                                        {"bottom", BoundaryKind::slip},
                                        {"top", BoundaryKind::slip}};
  auto bm = assemble_boundary_map(m, t);
  double s = 0.;
  for (const auto& [i, w] : bm.tag_nodes.at("bottom")) s += w;
  CHECK(close(s, 3., 1e-14));
  CHECK(bm.tag_nodes.at("bottom").size() == 7);
}
