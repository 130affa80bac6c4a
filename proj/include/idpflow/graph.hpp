#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "idpflow/mesh.hpp"

namespace idpflow {

/// Finite element graph quantities on a CSR sparsity pattern. Rows are sorted
/// and include the diagonal.
struct FemGraph {
  int dim = 1;
  int n = 0;
  std::vector<int> row;        ///< size n + 1
  std::vector<int> col;
  std::vector<int> diag;       ///< entry index of (i, i)
  std::vector<int> transpose;  ///< entry index of (j, i)

  std::vector<double> mass;      ///< m_i
  std::vector<double> mass_inv;  ///< 1 / m_i
  std::vector<double> lambda;    ///< 1 / (card I(i) - 1)
  std::vector<char> boundary;    ///< node carries a boundary face

  std::vector<double> mij;                 ///< consistent mass
  std::vector<double> bij;                 ///< delta_ij - m_ij / m_j
  std::array<std::vector<double>, 2> c;    ///< int phi_i grad phi_j
  std::vector<double> cnorm;               ///< |c_ij|
  std::array<std::vector<double>, 2> nij;  ///< c_ij / |c_ij|, zero where |c_ij| = 0
  std::vector<double> lap;                 ///< int grad phi_i . grad phi_j

  int nnz() const { return static_cast<int>(col.size()); }
  /// Entry index of (i, j), or -1.
  int find(int i, int j) const;
};

FemGraph assemble_graph(const Mesh& mesh, const CellValues& cv);

/// Fills bij from mass and mij.
void compute_b_matrix(FemGraph& g);

enum class BoundaryKind { slip, nonreflecting, dirichlet, none };

std::string to_string(BoundaryKind k);
BoundaryKind boundary_kind_from_string(const std::string& s);

/// Far-field or Dirichlet data u(x, t), written into u[0 .. d+1].
using FarField = std::function<void(const Point& x, double t, double* u)>;

struct BoundaryNode {
  int node;
  Point x{0., 0.};
  double m_bd = 0.;        ///< |int_Gamma phi_i n|
  Point n_bd{0., 0.};
  double m_s = 0.;         ///< slip portion
  Point n_s{0., 0.};
  double m_nr = 0.;        ///< complement of the slip portion
  Point n_nr{0., 0.};
  bool slip = false;           ///< touches a slip face
  bool nonreflecting = false;  ///< touches a non-reflecting face
  bool dirichlet = false;      ///< touches a Dirichlet face
};

struct BoundaryMap {
  std::vector<BoundaryNode> nodes;  ///< sorted by node index
  std::map<std::string, BoundaryKind> table;
  FarField far_field;
  /// per tag: (node, int_tag phi_i ds)
  std::map<std::string, std::vector<std::pair<int, double>>> tag_nodes;

  bool needs_far_field() const;
};

/// Boundary normals and masses per node. Every mesh tag must appear in the
/// table. The far field is required when a Dirichlet or non-reflecting tag
/// is present.
BoundaryMap assemble_boundary_map(const Mesh& mesh,
                                  const std::map<std::string, BoundaryKind>& table,
                                  FarField far_field = {});

}  // namespace idpflow
