#pragma once

#include <vector>

#include "dp1/energy.hpp"

namespace dp1 {

struct NewtonOptions {
  double tol = 1e-9;      // max-norm of the free-node gradient
  int max_iter = 200;
  double armijo_c = 1e-4;
  int max_halvings = 40;
};

struct NewtonOutcome {
  ScalarField u;
  int iterations = 0;
  double final_grad_norm = 0.0;
  bool converged = false;
  int floored_cells_last = 0;          // floor activations in the last Hessian
  std::vector<double> energy_history;  // accepted iterates, non-increasing
};

/// Damped Newton minimization of the requested energy over the free nodes,
/// with Armijo backtracking. Boundary values are pinned from the spec. The
/// iteration stops once the free-node gradient max-norm drops to `tol`; a
/// single extra full step then polishes the iterate so the returned field
/// sits as close to the exact discrete minimizer as the arithmetic allows.
/// Throws when the line search cannot produce descent (an assembly bug).
NewtonOutcome newton_minimize(const ProblemSpec& spec, EnergyKind kind, ScalarField u0,
                              const NewtonOptions& opts);

}  // namespace dp1
