#include "dp1/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dp1 {

namespace {

// Midpoint value of the linear interpolant: mean of the cell's nodal values.
std::vector<double> cell_midpoint_values(const Mesh& mesh, const std::vector<double>& nodal) {
  std::vector<double> out(mesh.n_cells());
  const int nv = mesh.verts_per_cell();
  const double inv = 1.0 / nv;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    double s = 0.0;
    for (int k = 0; k < nv; ++k) s += nodal[mesh.cells[c][k]];
    out[c] = s * inv;
  }
  return out;
}

std::vector<double> cell_magnitudes(const ScalarField& u) {
  std::vector<double> m = cell_midpoint_values(*u.mesh, u.values);
  for (double& v : m) v = std::abs(v);
  return m;
}

std::vector<double> cell_magnitudes(const VectorField& g) {
  std::vector<double> m(g.values.size());
  for (std::size_t i = 0; i < g.values.size(); ++i) m[i] = g.values[i].norm();
  return m;
}

double modular_from_magnitudes(const std::vector<double>& mag, const Mesh& mesh, const Weight& w,
                               double p, double q) {
  double s = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double t = mag[c];
    s += (std::pow(t, p) + w.cell()[c] * std::pow(t, q)) * mesh.cell_volumes[c];
  }
  return s;
}

double luxemburg_from_magnitudes(const std::vector<double>& mag, const Mesh& mesh, const Weight& w,
                                 double p, double q) {
  bool all_zero = true;
  for (double t : mag) {
    if (t != 0.0) {
      all_zero = false;
      break;
    }
  }
  if (all_zero) return 0.0;

  auto rho = [&](double lambda) {
    double s = 0.0;
    const double inv = 1.0 / lambda;
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const double t = mag[c] * inv;
      s += (std::pow(t, p) + w.cell()[c] * std::pow(t, q)) * mesh.cell_volumes[c];
    }
    return s;
  };

  // Bracket the root of rho(u/lambda) = 1 by doubling/halving, then bisect.
  double lo = 1.0, hi = 1.0;
  if (rho(1.0) > 1.0) {
    for (int i = 0; i < 200 && rho(hi) > 1.0; ++i) hi *= 2.0;
    lo = hi * 0.5;
  } else {
    for (int i = 0; i < 200 && rho(lo) <= 1.0; ++i) lo *= 0.5;
    hi = lo * 2.0;
  }
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double r = rho(mid);
    if (std::abs(r - 1.0) <= 1e-10) break;
    if (r > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * mid) break;
  }
  return mid;
}

}  // namespace

Exponents::Exponents(double p, double q, int dim) : p_(p), q_(q), dim_(dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("Exponents: dim must be 1 or 2");
  if (!std::isfinite(p) || !std::isfinite(q) || !(1.0 < p) || !(p < q)) {
    throw std::invalid_argument("Exponents: need 1 < p < q");
  }
  if (!(q / p < 1.0 + 1.0 / dim)) {
    throw std::invalid_argument("exponent admissibility violated: q/p < 1 + 1/N fails for p=" +
                                std::to_string(p) + ", q=" + std::to_string(q));
  }
}

Exponents Exponents::unchecked(double p, double q, int dim) {
  Exponents e;
  e.p_ = p;
  e.q_ = q;
  e.dim_ = dim;
  return e;
}

Weight::Weight(std::shared_ptr<const Mesh> mesh, std::vector<double> nodal)
    : mesh_(std::move(mesh)), nodal_(std::move(nodal)) {
  if (!mesh_) throw std::invalid_argument("Weight: null mesh");
  if (static_cast<int>(nodal_.size()) != mesh_->n_nodes()) {
    throw std::invalid_argument("Weight: sample count does not match node count");
  }
  for (double a : nodal_) {
    if (!std::isfinite(a)) throw std::invalid_argument("Weight: non-finite sample");
    if (a < 0.0) throw std::invalid_argument("Weight: negative sample (a >= 0 required)");
  }
  cell_ = cell_midpoint_values(*mesh_, nodal_);
}

double Weight::max_value() const {
  double m = 0.0;
  for (double a : nodal_) m = std::max(m, a);
  return m;
}

double Weight::lipschitz_ratio() const {
  const Mesh& mesh = *mesh_;
  double r = 0.0;
  const int nv = mesh.verts_per_cell();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int k = 0; k < nv; ++k) {
      const int i = mesh.cells[c][k];
      const int j = mesh.cells[c][(k + 1) % nv];
      const double d = (mesh.nodes[i] - mesh.nodes[j]).norm();
      if (d > 0.0) r = std::max(r, std::abs(nodal_[i] - nodal_[j]) / d);
    }
  }
  return r;
}

bool Weight::positive_on_boundary() const {
  for (int n : mesh_->boundary_nodes) {
    if (!(nodal_[n] > 0.0)) return false;
  }
  return true;
}

double modular_theta_p(const ScalarField& u, const Weight& w, const Exponents& e) {
  if (u.mesh != w.mesh()) throw std::invalid_argument("modular_theta_p: mesh mismatch");
  return modular_from_magnitudes(cell_magnitudes(u), *u.mesh, w, e.p(), e.q());
}

double modular_theta_p(const VectorField& g, const Weight& w, const Exponents& e) {
  if (g.mesh != w.mesh()) throw std::invalid_argument("modular_theta_p: mesh mismatch");
  return modular_from_magnitudes(cell_magnitudes(g), *g.mesh, w, e.p(), e.q());
}

double luxemburg_norm(const ScalarField& u, const Weight& w, const Exponents& e) {
  if (u.mesh != w.mesh()) throw std::invalid_argument("luxemburg_norm: mesh mismatch");
  return luxemburg_from_magnitudes(cell_magnitudes(u), *u.mesh, w, e.p(), e.q());
}

double luxemburg_norm(const VectorField& g, const Weight& w, const Exponents& e) {
  if (g.mesh != w.mesh()) throw std::invalid_argument("luxemburg_norm: mesh mismatch");
  return luxemburg_from_magnitudes(cell_magnitudes(g), *g.mesh, w, e.p(), e.q());
}

double weighted_lq_norm(const VectorField& g, const Weight& w, double q) {
  if (g.mesh != w.mesh()) throw std::invalid_argument("weighted_lq_norm: mesh mismatch");
  if (!(q > 1.0)) throw std::invalid_argument("weighted_lq_norm: q must be > 1");
  const Mesh& mesh = *g.mesh;
  double s = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    s += w.cell()[c] * std::pow(g.values[c].norm(), q) * mesh.cell_volumes[c];
  }
  return std::pow(s, 1.0 / q);
}

double weighted_lq_norm(const ScalarField& u, const Weight& w, double q) {
  if (u.mesh != w.mesh()) throw std::invalid_argument("weighted_lq_norm: mesh mismatch");
  if (!(q > 1.0)) throw std::invalid_argument("weighted_lq_norm: q must be > 1");
  const Mesh& mesh = *u.mesh;
  const std::vector<double> mag = cell_magnitudes(u);
  double s = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    s += w.cell()[c] * std::pow(mag[c], q) * mesh.cell_volumes[c];
  }
  return std::pow(s, 1.0 / q);
}

double total_variation(const ScalarField& u) {
  const Mesh& mesh = *u.mesh;
  const VectorField g = gradient(u);
  double s = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) s += g.values[c].norm() * mesh.cell_volumes[c];
  return s;
}

double muckenhoupt_aq_estimate(const Weight& w, double q, int depth) {
  if (!(q > 1.0)) throw std::invalid_argument("muckenhoupt_aq_estimate: q must be > 1");
  if (depth < 0) throw std::invalid_argument("muckenhoupt_aq_estimate: depth must be >= 0");
  const Mesh& mesh = *w.mesh();
  for (double a : w.cell()) {
    if (a == 0.0) return std::numeric_limits<double>::infinity();
  }

  const int nc = mesh.n_cells();
  std::vector<Vec2> mids(nc);
  std::vector<double> inv_pow(nc);
  const double s_exp = -1.0 / (q - 1.0);
  for (int c = 0; c < nc; ++c) {
    mids[c] = mesh.cell_midpoint(c);
    inv_pow[c] = std::pow(w.cell()[c], s_exp);
  }

  double best = 0.0;
  for (int level = 0; level <= depth; ++level) {
    const int n = 1 << level;
    const double dx = mesh.extent_x / n;
    const double dy = (mesh.dim == 2) ? mesh.extent_y / n : 0.0;
    const int ny = (mesh.dim == 2) ? n : 1;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < n; ++i) {
        const double x0 = i * dx, x1 = (i + 1) * dx;
        const double y0 = j * dy, y1 = (j + 1) * dy;
        double vol = 0.0, avg_a = 0.0, avg_inv = 0.0;
        for (int c = 0; c < nc; ++c) {
          const Vec2 m = mids[c];
          if (m.x < x0 || m.x >= x1) continue;
          if (mesh.dim == 2 && (m.y < y0 || m.y >= y1)) continue;
          const double v = mesh.cell_volumes[c];
          vol += v;
          avg_a += w.cell()[c] * v;
          avg_inv += inv_pow[c] * v;
        }
        if (vol == 0.0) continue;
        const double value = (avg_a / vol) * std::pow(avg_inv / vol, q - 1.0);
        best = std::max(best, value);
      }
    }
  }
  return best;
}

}  // namespace dp1
