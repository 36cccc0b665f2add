#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dp1/double_phase_solver.hpp"

namespace dp1 {

/// Geometric exponent schedule p_k = 1 + (p_start - 1) * ratio^k, k = 0..K.
struct ScheduleParams {
  double p_start = 1.3;
  double ratio = 0.5;
  int num_steps = 12;  // K; the schedule has K + 1 entries
};

/// Per-step diagnostics collected while driving p toward 1.
struct ContinuationStep {
  int k = 0;
  double p = 0.0;
  double energy_double_phase = 0.0;
  double energy_limit_exact = 0.0;  // limit energy of the iterate at eps = 0
  double lambda_p = 0.0;            // Luxemburg norm of grad u under theta_p
  double sigma_inf = 0.0;           // max cell |sigma|
  double dist_prev_lqa = 0.0;       // weighted L^q_a distance of gradients, 0 at k = 0
  double sigma_drift_inf = 0.0;     // max cell |sigma_k - sigma_{k-1}|, 0 at k = 0
  int iterations = 0;
  double final_grad_norm = 0.0;
  std::string snapshot_path;  // empty unless snapshots were persisted
};

struct ContinuationTrace {
  std::vector<double> schedule;
  std::vector<ContinuationStep> steps;
};

/// Final iterate of the schedule together with its p-power flux, the
/// discrete stand-in for the limit pair (u, z).
struct LimitCandidate {
  ScalarField u;
  VectorField z;
  double p_final = 0.0;
  int steps_completed = 0;
};

struct ContinuationResult {
  ContinuationTrace trace;
  std::optional<LimitCandidate> candidate;
  bool converged = false;
  std::string message;
};

/// Solves the double-phase problem along the schedule with warm starts and
/// collects the trace. An inner solve that fails to converge aborts the run
/// and returns the partial trace. When snapshot_dir is non-empty, each
/// iterate is written there as step_k.csv in the nodal field format.
ContinuationResult run_continuation(const ProblemSpec& spec, const ScheduleParams& sched,
                                    double tol = 1e-9, int max_iter = 200,
                                    const std::string& snapshot_dir = "");

struct ConvergenceDiagnostics {
  bool distances_eventually_decreasing = false;  // over the last three steps
  double final_sigma_inf = 0.0;
  bool sigma_within_unit_slack = false;  // final |sigma|_inf <= 1 + slack
  double sigma_slack = 0.0;
  double cauchy_rate = 0.0;  // mean ratio of consecutive gradient distances
};

/// Requires at least three completed steps.
ConvergenceDiagnostics convergence_diagnostics(const ContinuationTrace& trace,
                                               const ProblemSpec& spec,
                                               double sigma_slack = 5e-3);

/// Writes trace.csv: k, p_k, energy_Fp, energy_I, lambda_p, sigma_inf, dist_prev_Lqa.
void write_trace_csv(const ContinuationTrace& trace, const std::string& path);

}  // namespace dp1
