#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

namespace dp1 {

/// Point or vector in the plane. 1D meshes leave y at zero, so the same
/// type carries coordinates, gradients and flux vectors in both dimensions.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double norm() const { return std::sqrt(x * x + y * y); }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Conforming simplex mesh of an interval (0,L) or an axis-aligned
/// rectangle (0,lx)x(0,ly). Cells are segments in 1D and triangles in 2D,
/// obtained from a uniform grid split along the lower-left to upper-right
/// diagonal. Node and cell ordering is deterministic. Immutable once built.
struct Mesh {
  int dim = 0;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> cells;  // third index unused (-1) in 1D
  std::vector<int> boundary_nodes;        // ascending node ids on the boundary
  std::vector<char> node_on_boundary;     // per-node flag
  std::vector<double> cell_volumes;
  // Gradients of the nodal hat functions, constant per cell; entry [c][k]
  // belongs to local vertex k of cell c. Cached because every assembly
  // loop needs them.
  std::vector<std::array<Vec2, 3>> cell_basis_grads;
  double extent_x = 0.0;
  double extent_y = 0.0;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int verts_per_cell() const { return dim + 1; }

  double domain_volume() const;
  double max_cell_diameter() const;
  Vec2 cell_midpoint(int c) const;
};

std::shared_ptr<const Mesh> build_interval_mesh(int n_cells, double length);
std::shared_ptr<const Mesh> build_rect_mesh(int nx, int ny, double lx, double ly);

/// Piecewise-linear scalar field given by one value per node.
struct ScalarField {
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(std::shared_ptr<const Mesh> m, std::vector<double> v);
  explicit ScalarField(std::shared_ptr<const Mesh> m, double fill = 0.0);
};

/// Cell-wise constant vector field (gradients, flux fields, certificates).
struct VectorField {
  std::shared_ptr<const Mesh> mesh;
  std::vector<Vec2> values;

  VectorField() = default;
  VectorField(std::shared_ptr<const Mesh> m, std::vector<Vec2> v);
  explicit VectorField(std::shared_ptr<const Mesh> m);
};

/// Exact cell-wise gradient of the piecewise-linear interpolant. Linear in u.
VectorField gradient(const ScalarField& u);

/// Restriction of nodal values to the boundary, in ascending node order.
std::vector<std::pair<int, double>> trace(const ScalarField& u);

double max_magnitude(const VectorField& v);
VectorField subtract(const VectorField& a, const VectorField& b);

}  // namespace dp1
