#pragma once

#include <optional>

#include "dp1/energy.hpp"
#include "dp1/newton.hpp"

namespace dp1 {

/// Minimizer of the double-phase energy for one fixed exponent pair,
/// together with its flux fields:
///   sigma = |grad u|^(p-2) grad u,   tau = a(x) |grad u|^(q-2) grad u.
struct DoublePhaseSolution {
  ScalarField u;
  VectorField sigma;
  VectorField tau;
  int iterations = 0;
  double final_grad_norm = 0.0;
  EnergyReport energy;
  double lambda_p = 0.0;  // Luxemburg norm of grad u under theta_p
  bool converged = false;
  int hessian_floor_activations = 0;
  std::vector<double> energy_history;  // accepted Newton iterates, non-increasing
};

/// Per-cell flux |grad u|^(p-2) grad u.
VectorField power_flux(const ScalarField& u, double p);
/// Per-cell flux a(x) |grad u|^(q-2) grad u with the shared cell weights.
VectorField weighted_power_flux(const ScalarField& u, const Weight& w, double q);

/// Damped Newton minimization of the double-phase energy with pinned
/// boundary values. Default start is the quadratic extension of the
/// boundary data. Non-convergence within max_iter returns the best iterate
/// flagged; a failed line search is a hard error.
DoublePhaseSolution solve_double_phase(const ProblemSpec& spec,
                                       const std::optional<ScalarField>& init = std::nullopt,
                                       double tol = 1e-9, int max_iter = 200);

/// Max over interior nodal test functions of the weak-form residual
/// |integral (sigma + tau) . grad(hat_i)|, computed from the stored fluxes.
double weak_residual(const DoublePhaseSolution& sol, const ProblemSpec& spec);

}  // namespace dp1
