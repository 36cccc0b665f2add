#include "dp1/energy.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

namespace dp1 {

namespace {

// 2x2 symmetric block, stored as [xx, xy, yy].
struct SymBlock {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  void add_identity(double s) {
    xx += s;
    yy += s;
  }
  void add_outer(const Vec2& g, double s) {
    xx += s * g.x * g.x;
    xy += s * g.x * g.y;
    yy += s * g.y * g.y;
  }
  double quad(const Vec2& a, const Vec2& b) const {
    return a.x * (xx * b.x + xy * b.y) + a.y * (xy * b.x + yy * b.y);
  }
};

// d2/dg2 of t^r/r at t = |g|, with the floor applied for r < 2 where the
// formula is singular at t = 0. Written through the unit direction so no
// intermediate power can overflow.
SymBlock power_block(const Vec2& g, double r, bool& floored) {
  SymBlock b;
  double t = g.norm();
  if (r < 2.0 && t < kHessianFloor) {
    t = kHessianFloor;
    floored = true;
  }
  if (t == 0.0) {
    if (r == 2.0) b.add_identity(1.0);
    return b;  // r > 2: zero block
  }
  const double tr2 = std::pow(t, r - 2.0);
  b.add_identity(tr2);
  if (r != 2.0) {
    const Vec2 dir = g * (1.0 / t);  // |dir| <= 1 (< 1 on floored cells)
    b.add_outer(dir, (r - 2.0) * tr2);
  }
  return b;
}

// d2/dg2 of phi_eps(|g|) = sqrt(|g|^2 + eps^2) - eps.
SymBlock smoothed_tv_block(const Vec2& g, double eps) {
  const double s = std::sqrt(g.dot(g) + eps * eps);
  SymBlock b;
  b.add_identity(1.0 / s);
  b.add_outer(g * (1.0 / s), -1.0 / s);
  return b;
}

// Flux dF/dg of the cell integrand for the requested energy kind.
Vec2 cell_flux(const Vec2& g, double a, double q, double p_or_eps, EnergyKind kind) {
  const double t = g.norm();
  if (t == 0.0) return {};
  const Vec2 dir = g * (1.0 / t);
  Vec2 f{};
  if (kind == EnergyKind::DoublePhase) {
    f = dir * std::pow(t, p_or_eps - 1.0);
  } else {
    f = dir * (t / std::sqrt(t * t + p_or_eps * p_or_eps));
  }
  if (a != 0.0) f = f + dir * (a * std::pow(t, q - 1.0));
  return f;
}

}  // namespace

ProblemSpec::ProblemSpec(std::shared_ptr<const Mesh> mesh, Weight weight, double q,
                         std::optional<double> p, std::vector<double> boundary_values,
                         double epsilon)
    : mesh_(std::move(mesh)),
      weight_(std::move(weight)),
      q_(q),
      p_(p),
      boundary_values_(std::move(boundary_values)),
      epsilon_(epsilon) {
  finish(true);
}

ProblemSpec ProblemSpec::unchecked(std::shared_ptr<const Mesh> mesh, Weight weight, double q,
                                   std::optional<double> p, std::vector<double> boundary_values,
                                   double epsilon) {
  ProblemSpec s;
  s.mesh_ = std::move(mesh);
  s.weight_ = std::move(weight);
  s.q_ = q;
  s.p_ = p;
  s.boundary_values_ = std::move(boundary_values);
  s.epsilon_ = epsilon;
  s.finish(false);
  return s;
}

void ProblemSpec::finish(bool checked) {
  if (!mesh_) throw std::invalid_argument("ProblemSpec: null mesh");
  if (weight_.mesh() != mesh_) throw std::invalid_argument("ProblemSpec: weight mesh mismatch");
  if (boundary_values_.size() != mesh_->boundary_nodes.size()) {
    throw std::invalid_argument("ProblemSpec: boundary value count does not match boundary nodes");
  }
  for (double h : boundary_values_) {
    if (!std::isfinite(h)) throw std::invalid_argument("ProblemSpec: non-finite boundary value");
  }
  if (!(q_ > 1.0) || !std::isfinite(q_)) throw std::invalid_argument("ProblemSpec: q must be > 1");
  if (!(epsilon_ >= 0.0) || !std::isfinite(epsilon_)) {
    throw std::invalid_argument("ProblemSpec: epsilon must be >= 0");
  }
  if (checked) {
    if (p_) Exponents(*p_, q_, mesh_->dim);  // throws naming the violated clause
    if (!weight_.positive_on_boundary()) {
      throw std::invalid_argument(
          "weight admissibility violated: a(x) ≠ 0 on ∂Ω fails (weight vanishes "
          "at a boundary node)");
    }
  }

  free_index_.assign(mesh_->n_nodes(), -1);
  for (int n = 0; n < mesh_->n_nodes(); ++n) {
    if (!mesh_->node_on_boundary[n]) {
      free_index_[n] = static_cast<int>(free_nodes_.size());
      free_nodes_.push_back(n);
    }
  }
}

ProblemSpec ProblemSpec::with_p(double p) const {
  ProblemSpec s(*this);
  s.p_ = p;
  Exponents(p, s.q_, s.mesh_->dim);
  return s;
}

ProblemSpec ProblemSpec::with_epsilon(double eps) const {
  ProblemSpec s(*this);
  if (!(eps >= 0.0)) throw std::invalid_argument("with_epsilon: eps must be >= 0");
  s.epsilon_ = eps;
  return s;
}

EnergyReport energy_double_phase(const ScalarField& u, const ProblemSpec& spec) {
  if (!spec.p()) throw std::invalid_argument("energy_double_phase: spec has no exponent p");
  if (u.mesh != spec.mesh_ptr()) throw std::invalid_argument("energy_double_phase: mesh mismatch");
  const double p = *spec.p(), q = spec.q();
  const Mesh& mesh = spec.mesh();
  const VectorField g = gradient(u);
  EnergyReport r;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double t = g.values[c].norm();
    const double vol = mesh.cell_volumes[c];
    r.principal += std::pow(t, p) / p * vol;
    r.weighted += spec.weight().cell()[c] * std::pow(t, q) / q * vol;
  }
  r.total = r.principal + r.weighted;
  return r;
}

EnergyReport energy_limit(const ScalarField& u, const ProblemSpec& spec, double eps) {
  if (u.mesh != spec.mesh_ptr()) throw std::invalid_argument("energy_limit: mesh mismatch");
  if (!(eps >= 0.0)) throw std::invalid_argument("energy_limit: eps must be >= 0");
  const double q = spec.q();
  const Mesh& mesh = spec.mesh();
  const VectorField g = gradient(u);
  EnergyReport r;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double t = g.values[c].norm();
    const double vol = mesh.cell_volumes[c];
    const double phi = (eps == 0.0) ? t : std::sqrt(t * t + eps * eps) - eps;
    r.principal += phi * vol;
    r.weighted += spec.weight().cell()[c] * std::pow(t, q) / q * vol;
  }
  r.total = r.principal + r.weighted;
  return r;
}

ScalarField grad_energy(const ScalarField& u, const ProblemSpec& spec, EnergyKind kind) {
  if (u.mesh != spec.mesh_ptr()) throw std::invalid_argument("grad_energy: mesh mismatch");
  double p_or_eps;
  if (kind == EnergyKind::DoublePhase) {
    if (!spec.p()) throw std::invalid_argument("grad_energy: spec has no exponent p");
    p_or_eps = *spec.p();
  } else {
    if (!(spec.epsilon() > 0.0)) {
      throw std::invalid_argument("grad_energy: smoothed limit gradient needs epsilon > 0");
    }
    p_or_eps = spec.epsilon();
  }

  const Mesh& mesh = spec.mesh();
  const VectorField g = gradient(u);
  ScalarField out(u.mesh, 0.0);
  const int nv = mesh.verts_per_cell();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Vec2 flux =
        cell_flux(g.values[c], spec.weight().cell()[c], spec.q(), p_or_eps, kind);
    const double vol = mesh.cell_volumes[c];
    for (int k = 0; k < nv; ++k) {
      const int n = mesh.cells[c][k];
      if (mesh.node_on_boundary[n]) continue;
      out.values[n] += vol * flux.dot(mesh.cell_basis_grads[c][k]);
    }
  }
  return out;
}

HessianResult hess_energy(const ScalarField& u, const ProblemSpec& spec, EnergyKind kind) {
  if (u.mesh != spec.mesh_ptr()) throw std::invalid_argument("hess_energy: mesh mismatch");
  double p_or_eps;
  if (kind == EnergyKind::DoublePhase) {
    if (!spec.p()) throw std::invalid_argument("hess_energy: spec has no exponent p");
    p_or_eps = *spec.p();
  } else {
    if (!(spec.epsilon() > 0.0)) {
      throw std::invalid_argument("hess_energy: smoothed limit Hessian needs epsilon > 0");
    }
    p_or_eps = spec.epsilon();
  }

  const Mesh& mesh = spec.mesh();
  const VectorField g = gradient(u);
  const int nv = mesh.verts_per_cell();
  HessianResult result;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.n_cells()) * nv * nv);

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Vec2& gc = g.values[c];
    const double a = spec.weight().cell()[c];
    bool floored = false;
    SymBlock block;
    if (kind == EnergyKind::DoublePhase) {
      block = power_block(gc, p_or_eps, floored);
    } else {
      block = smoothed_tv_block(gc, p_or_eps);
    }
    if (a != 0.0) {
      SymBlock qb = power_block(gc, spec.q(), floored);
      block.xx += a * qb.xx;
      block.xy += a * qb.xy;
      block.yy += a * qb.yy;
    }
    if (floored) ++result.floored_cells;

    const double vol = mesh.cell_volumes[c];
    for (int ki = 0; ki < nv; ++ki) {
      const int ni = mesh.cells[c][ki];
      const int fi = spec.free_index(ni);
      if (fi < 0) continue;
      for (int kj = 0; kj < nv; ++kj) {
        const int nj = mesh.cells[c][kj];
        const int fj = spec.free_index(nj);
        if (fj < 0) continue;
        triplets.emplace_back(fi, fj,
                              vol * block.quad(mesh.cell_basis_grads[c][ki],
                                               mesh.cell_basis_grads[c][kj]));
      }
    }
  }

  result.matrix.resize(spec.n_free(), spec.n_free());
  result.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return result;
}

ScalarField pinned_field(const ProblemSpec& spec, double interior) {
  ScalarField u(spec.mesh_ptr(), interior);
  apply_boundary(u, spec);
  return u;
}

void apply_boundary(ScalarField& u, const ProblemSpec& spec) {
  const auto& bn = spec.mesh().boundary_nodes;
  for (std::size_t i = 0; i < bn.size(); ++i) u.values[bn[i]] = spec.boundary_values()[i];
}

ScalarField quadratic_extension(const ProblemSpec& spec) {
  const Mesh& mesh = spec.mesh();
  ScalarField u = pinned_field(spec, 0.0);
  if (spec.n_free() == 0) return u;

  // Stiffness with coefficient (1 + a): the Hessian of the p = q = 2 energy.
  const int nv = mesh.verts_per_cell();
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(spec.n_free());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double coef = (1.0 + spec.weight().cell()[c]) * mesh.cell_volumes[c];
    for (int ki = 0; ki < nv; ++ki) {
      const int ni = mesh.cells[c][ki];
      const int fi = spec.free_index(ni);
      if (fi < 0) continue;
      for (int kj = 0; kj < nv; ++kj) {
        const int nj = mesh.cells[c][kj];
        const double kij =
            coef * mesh.cell_basis_grads[c][ki].dot(mesh.cell_basis_grads[c][kj]);
        const int fj = spec.free_index(nj);
        if (fj >= 0) {
          triplets.emplace_back(fi, fj, kij);
        } else {
          rhs[fi] -= kij * u.values[nj];
        }
      }
    }
  }
  Eigen::SparseMatrix<double> stiffness(spec.n_free(), spec.n_free());
  stiffness.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(stiffness);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("quadratic_extension: factorization failed");
  }
  const Eigen::VectorXd x = solver.solve(rhs);
  for (int i = 0; i < spec.n_free(); ++i) u.values[spec.free_nodes()[i]] = x[i];
  return u;
}

double free_max_norm(const ScalarField& g, const ProblemSpec& spec) {
  double m = 0.0;
  for (int n : spec.free_nodes()) m = std::max(m, std::abs(g.values[n]));
  return m;
}

Eigen::VectorXd gather_free(const ScalarField& g, const ProblemSpec& spec) {
  Eigen::VectorXd v(spec.n_free());
  for (int i = 0; i < spec.n_free(); ++i) v[i] = g.values[spec.free_nodes()[i]];
  return v;
}

void scatter_add_free(ScalarField& u, const ProblemSpec& spec, const Eigen::VectorXd& delta,
                      double step) {
  for (int i = 0; i < spec.n_free(); ++i) u.values[spec.free_nodes()[i]] += step * delta[i];
}

}  // namespace dp1
