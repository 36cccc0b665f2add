#include "dp1/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dp1 {

namespace {

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

double Mesh::domain_volume() const {
  double s = 0.0;
  for (double v : cell_volumes) s += v;
  return s;
}

double Mesh::max_cell_diameter() const {
  double d = 0.0;
  for (int c = 0; c < n_cells(); ++c) {
    const auto& cl = cells[c];
    if (dim == 1) {
      d = std::max(d, (nodes[cl[1]] - nodes[cl[0]]).norm());
    } else {
      for (int k = 0; k < 3; ++k) {
        Vec2 e = nodes[cl[(k + 1) % 3]] - nodes[cl[k]];
        d = std::max(d, e.norm());
      }
    }
  }
  return d;
}

Vec2 Mesh::cell_midpoint(int c) const {
  const auto& cl = cells[c];
  if (dim == 1) {
    Vec2 m = nodes[cl[0]] + nodes[cl[1]];
    return m * 0.5;
  }
  Vec2 m = nodes[cl[0]] + nodes[cl[1]] + nodes[cl[2]];
  return m * (1.0 / 3.0);
}

std::shared_ptr<const Mesh> build_interval_mesh(int n_cells, double length) {
  if (n_cells < 1) throw std::invalid_argument("build_interval_mesh: n_cells must be >= 1");
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("build_interval_mesh: length must be positive");
  }
  auto mesh = std::make_shared<Mesh>();
  mesh->dim = 1;
  mesh->extent_x = length;
  mesh->nodes.resize(n_cells + 1);
  const double h = length / n_cells;
  for (int i = 0; i <= n_cells; ++i) mesh->nodes[i] = {i * h, 0.0};
  // keep endpoints exact
  mesh->nodes[n_cells] = {length, 0.0};

  mesh->cells.resize(n_cells);
  mesh->cell_volumes.resize(n_cells);
  mesh->cell_basis_grads.resize(n_cells);
  for (int c = 0; c < n_cells; ++c) {
    mesh->cells[c] = {c, c + 1, -1};
    const double hc = mesh->nodes[c + 1].x - mesh->nodes[c].x;
    mesh->cell_volumes[c] = hc;
    mesh->cell_basis_grads[c] = {Vec2{-1.0 / hc, 0.0}, Vec2{1.0 / hc, 0.0}, Vec2{}};
  }
  mesh->boundary_nodes = {0, n_cells};
  mesh->node_on_boundary.assign(n_cells + 1, 0);
  mesh->node_on_boundary[0] = 1;
  mesh->node_on_boundary[n_cells] = 1;
  return mesh;
}

std::shared_ptr<const Mesh> build_rect_mesh(int nx, int ny, double lx, double ly) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: nx, ny must be >= 1");
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw std::invalid_argument("build_rect_mesh: extents must be positive");
  }
  auto mesh = std::make_shared<Mesh>();
  mesh->dim = 2;
  mesh->extent_x = lx;
  mesh->extent_y = ly;
  const int nnx = nx + 1, nny = ny + 1;
  mesh->nodes.resize(nnx * nny);
  const double hx = lx / nx, hy = ly / ny;
  for (int j = 0; j < nny; ++j) {
    for (int i = 0; i < nnx; ++i) {
      double x = (i == nx) ? lx : i * hx;
      double y = (j == ny) ? ly : j * hy;
      mesh->nodes[j * nnx + i] = {x, y};
    }
  }

  mesh->node_on_boundary.assign(nnx * nny, 0);
  for (int j = 0; j < nny; ++j) {
    for (int i = 0; i < nnx; ++i) {
      if (i == 0 || i == nx || j == 0 || j == ny) mesh->node_on_boundary[j * nnx + i] = 1;
    }
  }
  for (int n = 0; n < nnx * nny; ++n) {
    if (mesh->node_on_boundary[n]) mesh->boundary_nodes.push_back(n);
  }

  // Two triangles per grid square, split along the lower-left to
  // upper-right diagonal, both oriented counter-clockwise.
  mesh->cells.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = j * nnx + i;
      const int n10 = n00 + 1;
      const int n01 = n00 + nnx;
      const int n11 = n01 + 1;
      mesh->cells.push_back({n00, n10, n11});
      mesh->cells.push_back({n00, n11, n01});
    }
  }

  const int nc = mesh->n_cells();
  mesh->cell_volumes.resize(nc);
  mesh->cell_basis_grads.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto& cl = mesh->cells[c];
    const Vec2 p0 = mesh->nodes[cl[0]];
    const Vec2 e1 = mesh->nodes[cl[1]] - p0;
    const Vec2 e2 = mesh->nodes[cl[2]] - p0;
    const double det = e1.x * e2.y - e1.y * e2.x;  // twice the signed area
    if (!(det > 0.0)) throw std::invalid_argument("build_rect_mesh: degenerate cell");
    mesh->cell_volumes[c] = 0.5 * det;
    const Vec2 g1{e2.y / det, -e2.x / det};
    const Vec2 g2{-e1.y / det, e1.x / det};
    mesh->cell_basis_grads[c] = {Vec2{-g1.x - g2.x, -g1.y - g2.y}, g1, g2};
  }
  return mesh;
}

ScalarField::ScalarField(std::shared_ptr<const Mesh> m, std::vector<double> v)
    : mesh(std::move(m)), values(std::move(v)) {
  if (!mesh) throw std::invalid_argument("ScalarField: null mesh");
  if (static_cast<int>(values.size()) != mesh->n_nodes()) {
    throw std::invalid_argument("ScalarField: value count does not match node count");
  }
  check_finite(values, "ScalarField");
}

ScalarField::ScalarField(std::shared_ptr<const Mesh> m, double fill) : mesh(std::move(m)) {
  if (!mesh) throw std::invalid_argument("ScalarField: null mesh");
  values.assign(mesh->n_nodes(), fill);
}

VectorField::VectorField(std::shared_ptr<const Mesh> m, std::vector<Vec2> v)
    : mesh(std::move(m)), values(std::move(v)) {
  if (!mesh) throw std::invalid_argument("VectorField: null mesh");
  if (static_cast<int>(values.size()) != mesh->n_cells()) {
    throw std::invalid_argument("VectorField: value count does not match cell count");
  }
  for (const Vec2& w : values) {
    if (!std::isfinite(w.x) || !std::isfinite(w.y)) {
      throw std::invalid_argument("VectorField contains a non-finite component");
    }
  }
}

VectorField::VectorField(std::shared_ptr<const Mesh> m) : mesh(std::move(m)) {
  if (!mesh) throw std::invalid_argument("VectorField: null mesh");
  values.assign(mesh->n_cells(), Vec2{});
}

VectorField gradient(const ScalarField& u) {
  const Mesh& mesh = *u.mesh;
  VectorField g(u.mesh);
  const int nv = mesh.verts_per_cell();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    Vec2 s{};
    for (int k = 0; k < nv; ++k) {
      const double uv = u.values[mesh.cells[c][k]];
      const Vec2& bg = mesh.cell_basis_grads[c][k];
      s.x += uv * bg.x;
      s.y += uv * bg.y;
    }
    g.values[c] = s;
  }
  return g;
}

std::vector<std::pair<int, double>> trace(const ScalarField& u) {
  std::vector<std::pair<int, double>> out;
  out.reserve(u.mesh->boundary_nodes.size());
  for (int n : u.mesh->boundary_nodes) out.emplace_back(n, u.values[n]);
  return out;
}

double max_magnitude(const VectorField& v) {
  double m = 0.0;
  for (const Vec2& w : v.values) m = std::max(m, w.norm());
  return m;
}

VectorField subtract(const VectorField& a, const VectorField& b) {
  if (a.mesh != b.mesh) throw std::invalid_argument("subtract: fields live on different meshes");
  VectorField out(a.mesh);
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = a.values[i] - b.values[i];
  return out;
}

}  // namespace dp1
