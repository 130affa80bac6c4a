#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace idpflow {

using Point = std::array<double, 2>;

enum class Side { left, right, bottom, top };

std::string to_string(Side s);

struct BoundaryFace {
  int cell;
  Side side;
  std::string tag;
  std::array<int, 2> nodes;   ///< one node in 1D
  std::array<double, 2> normal;
  double measure;             ///< face length (1 in 1D)
};

struct MeshSpec {
  int dim = 1;
  Point lo{0., 0.};
  Point hi{1., 1.};
  std::array<int, 2> cells{1, 1};
  std::array<bool, 2> periodic{false, false};
  /// side name ("left", "right", "bottom", "top") -> tag; unnamed sides keep the side name
  std::map<std::string, std::string> tag_rules;
  /// random displacement of interior vertices, as a fraction of the local cell size
  double perturbation = 0.;
  std::uint64_t seed = 0;
};

/// Tensor-product mesh of segments (d = 1) or bilinear quadrilaterals (d = 2).
///
/// Vertices form the full (nx+1) x (ny+1) grid; periodic directions identify
/// the last vertex layer with the first, so several vertices may map to one
/// node. Node numbering is lexicographic in the unique node grid.
struct Mesh {
  int dim = 1;
  std::array<int, 2> cells{1, 1};
  std::array<bool, 2> periodic{false, false};
  Point lo{0., 0.};
  Point hi{1., 1.};

  std::vector<Point> vertex;            ///< geometric vertex coordinates
  std::vector<int> vertex_to_node;
  std::vector<Point> node;              ///< coordinates of each node's representative vertex
  std::vector<std::array<int, 4>> cell_vertex;  ///< local order (0,0), (1,0), (0,1), (1,1)
  std::vector<std::array<int, 4>> cell_node;
  std::vector<BoundaryFace> faces;
  std::vector<std::string> tags;        ///< distinct tags in first-seen order
  std::vector<std::vector<int>> colors; ///< cells grouped so that no two cells of a group share a node

  int n_nodes() const { return static_cast<int>(node.size()); }
  int n_cells() const { return static_cast<int>(cell_node.size()); }
  int vertices_per_cell() const { return dim == 1 ? 2 : 4; }
  double volume() const;
};

Mesh build_structured_mesh(const MeshSpec& spec);

/// Shape function values, gradients and weights at the 3^d Gauss points of
/// every cell. Exact for products of (bi)linear functions on affine cells and
/// for the mass entries on general quadrilaterals.
struct CellValues {
  int dim = 1;
  int nv = 2;  ///< vertices per cell
  int nq = 3;  ///< quadrature points per cell
  std::vector<double> phi;   ///< [q][a], shared by all cells
  std::vector<double> jxw;   ///< [cell][q]
  std::vector<double> grad;  ///< [cell][q][a][k]

  const double* cell_jxw(int c) const { return jxw.data() + static_cast<std::size_t>(c) * nq; }
  const double* cell_grad(int c) const {
    return grad.data() + static_cast<std::size_t>(c) * nq * nv * dim;
  }
};

CellValues build_cell_values(const Mesh& mesh);

/// Values and gradients at 3 Gauss points on one boundary face of a cell.
struct FaceValues {
  int nq = 3;
  std::array<double, 3> weight{};                  ///< includes the face measure
  std::array<std::array<double, 4>, 3> phi{};      ///< [q][a]
  std::array<std::array<std::array<double, 2>, 4>, 3> grad{};  ///< [q][a][k]
};

FaceValues face_values(const Mesh& mesh, const BoundaryFace& face);

/// Legacy VTK (ASCII) unstructured grid of the mesh, optionally with point data.
void write_vtk(const std::string& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, std::vector<double>>>& point_data = {});

}  // namespace idpflow
