#include "dp1/double_phase_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace dp1 {

VectorField power_flux(const ScalarField& u, double p) {
  const VectorField g = gradient(u);
  VectorField out(u.mesh);
  for (int c = 0; c < u.mesh->n_cells(); ++c) {
    const double t = g.values[c].norm();
    if (t > 0.0) out.values[c] = g.values[c] * (1.0 / t) * std::pow(t, p - 1.0);
  }
  return out;
}

VectorField weighted_power_flux(const ScalarField& u, const Weight& w, double q) {
  if (u.mesh != w.mesh()) throw std::invalid_argument("weighted_power_flux: mesh mismatch");
  const VectorField g = gradient(u);
  VectorField out(u.mesh);
  for (int c = 0; c < u.mesh->n_cells(); ++c) {
    const double t = g.values[c].norm();
    const double a = w.cell()[c];
    if (t > 0.0 && a != 0.0) {
      out.values[c] = g.values[c] * (1.0 / t) * (a * std::pow(t, q - 1.0));
    }
  }
  return out;
}

DoublePhaseSolution solve_double_phase(const ProblemSpec& spec,
                                       const std::optional<ScalarField>& init, double tol,
                                       int max_iter) {
  if (!spec.p()) throw std::invalid_argument("solve_double_phase: spec has no exponent p");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_double_phase: tol must be > 0");
  const double p = *spec.p();

  NewtonOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  // Very small p makes the power-law Hessian stiff where |grad u| varies;
  // the floored blocks stay usable but may cost a few more steps.
  if (p < 1.05) opts.max_iter += 5;

  ScalarField start = init ? *init : quadratic_extension(spec);
  NewtonOutcome outcome = newton_minimize(spec, EnergyKind::DoublePhase, std::move(start), opts);

  DoublePhaseSolution sol;
  sol.u = std::move(outcome.u);
  sol.iterations = outcome.iterations;
  sol.final_grad_norm = outcome.final_grad_norm;
  sol.converged = outcome.converged;
  sol.hessian_floor_activations = outcome.floored_cells_last;
  sol.energy_history = std::move(outcome.energy_history);
  sol.sigma = power_flux(sol.u, p);
  sol.tau = weighted_power_flux(sol.u, spec.weight(), spec.q());
  sol.energy = energy_double_phase(sol.u, spec);
  sol.lambda_p = luxemburg_norm(gradient(sol.u), spec.weight(),
                                Exponents::unchecked(p, spec.q(), spec.mesh().dim));
  return sol;
}

double weak_residual(const DoublePhaseSolution& sol, const ProblemSpec& spec) {
  const Mesh& mesh = spec.mesh();
  if (sol.u.mesh != spec.mesh_ptr()) throw std::invalid_argument("weak_residual: mesh mismatch");
  std::vector<double> r(mesh.n_nodes(), 0.0);
  const int nv = mesh.verts_per_cell();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Vec2 flux = sol.sigma.values[c] + sol.tau.values[c];
    for (int k = 0; k < nv; ++k) {
      const int n = mesh.cells[c][k];
      if (mesh.node_on_boundary[n]) continue;
      r[n] += mesh.cell_volumes[c] * flux.dot(mesh.cell_basis_grads[c][k]);
    }
  }
  double m = 0.0;
  for (int n = 0; n < mesh.n_nodes(); ++n) m = std::max(m, std::abs(r[n]));
  return m;
}

}  // namespace dp1
