#include "dp1/newton.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

namespace dp1 {

namespace {

double eval_energy(const ScalarField& u, const ProblemSpec& spec, EnergyKind kind) {
  return kind == EnergyKind::DoublePhase ? energy_double_phase(u, spec).total
                                         : energy_limit(u, spec, spec.epsilon()).total;
}

}  // namespace

NewtonOutcome newton_minimize(const ProblemSpec& spec, EnergyKind kind, ScalarField u0,
                              const NewtonOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("newton_minimize: tol must be > 0");
  NewtonOutcome out;
  out.u = std::move(u0);
  apply_boundary(out.u, spec);

  double energy = eval_energy(out.u, spec, kind);
  out.energy_history.push_back(energy);

  if (spec.n_free() == 0) {
    out.converged = true;
    return out;
  }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  bool polished = false;

  while (true) {
    const ScalarField grad = grad_energy(out.u, spec, kind);
    const double gn = free_max_norm(grad, spec);
    out.final_grad_norm = gn;

    if (gn <= opts.tol) {
      out.converged = true;
      // One full polishing step unless the gradient is already at the
      // floating-point floor; keeps independent restarts landing on the
      // same iterate.
      if (!polished && gn > 1e-13) {
        polished = true;
        const HessianResult hess = hess_energy(out.u, spec, kind);
        solver.compute(hess.matrix);
        if (solver.info() == Eigen::Success) {
          const Eigen::VectorXd step = solver.solve(-gather_free(grad, spec));
          ScalarField trial = out.u;
          scatter_add_free(trial, spec, step);
          const double trial_energy = eval_energy(trial, spec, kind);
          const double trial_gn = free_max_norm(grad_energy(trial, spec, kind), spec);
          if (trial_gn < gn && trial_energy <= energy) {
            out.u = std::move(trial);
            energy = trial_energy;
            out.energy_history.push_back(energy);
            out.final_grad_norm = trial_gn;
            ++out.iterations;
          }
        }
      }
      break;
    }
    if (out.iterations >= opts.max_iter) {
      out.converged = false;
      break;
    }

    const HessianResult hess = hess_energy(out.u, spec, kind);
    out.floored_cells_last = hess.floored_cells;
    solver.compute(hess.matrix);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("newton_minimize: Hessian factorization failed");
    }
    const Eigen::VectorXd g_free = gather_free(grad, spec);
    const Eigen::VectorXd step = solver.solve(-g_free);
    const double slope = g_free.dot(step);  // negative for a descent direction

    double alpha = 1.0;
    bool accepted = false;
    ScalarField trial = out.u;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      trial = out.u;
      scatter_add_free(trial, spec, step, alpha);
      const double trial_energy = eval_energy(trial, spec, kind);
      const double threshold = energy + opts.armijo_c * alpha * slope;
      if (std::isfinite(trial_energy) && trial_energy <= threshold) {
        accepted = true;
        energy = trial_energy;
        break;
      }
      // End game: once the predicted decrease is below the energy's
      // floating-point resolution the Armijo comparison is pure rounding
      // noise; fall back to descent of the gradient norm instead.
      if (std::isfinite(trial_energy) && threshold == energy) {
        const double trial_gn = free_max_norm(grad_energy(trial, spec, kind), spec);
        if (trial_gn < gn) {
          accepted = true;
          energy = std::min(energy, trial_energy);
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      throw std::runtime_error(
          "newton_minimize: line search failed to produce descent (non-descent direction "
          "indicates an assembly inconsistency)");
    }
    out.u = std::move(trial);
    out.energy_history.push_back(energy);
    ++out.iterations;
  }
  return out;
}

}  // namespace dp1
