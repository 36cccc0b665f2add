#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dp1/energy.hpp"
#include "dp1/newton.hpp"

namespace dp1 {

/// Acceptance thresholds for the weak-solution certificate. The defaults
/// scale with the mesh: 1e-6 / 1e-3 at the 512-cell (1D) or 64x64 (2D)
/// reference resolution, tightened proportionally under refinement.
struct CertificateThresholds {
  double residual = 1e-6;
  double z_excess = 1e-3;        // allowed excess of |z|_inf over 1
  double alignment = 1e-3;       // relative alignment gap on active cells
  double activity_factor = 1e-8; // active cells: |grad u| > factor * max |grad u|

  static CertificateThresholds defaults_for(const Mesh& mesh);
};

/// Verification record for a candidate pair (u, z): the divergence-form
/// residual against interior nodal test functions, the sup norm of z, and
/// the gap in the alignment identity z . grad u = |grad u|.
struct Certificate {
  double residual_div = 0.0;
  double z_inf = 0.0;
  double alignment_gap = 0.0;         // max over all cells of |grad u| - z . grad u
  double alignment_gap_active = 0.0;  // same, active cells only
  double alignment_rel_active = 0.0;  // active-cell gap relative to max(1, |grad u|)
  double energy_limit = 0.0;          // limit energy of u at eps = 0
  bool residual_ok = false;
  bool z_ok = false;
  bool alignment_ok = false;
  bool pass = false;
  CertificateThresholds thresholds;
};

struct LimitReport {
  std::vector<double> eps_schedule;
  std::vector<int> iterations_per_eps;
  double energy_limit_exact = 0.0;  // at eps = 0
  double final_grad_norm = 0.0;
  bool converged = false;
  std::string message;
};

struct LimitSolution {
  ScalarField u;
  VectorField z;
  LimitReport report;
};

/// Geometric schedule 1e-1 ... 1e-6, factor 0.1.
std::vector<double> default_eps_schedule();

/// Minimizes the smoothed limit energy along a decreasing eps schedule with
/// warm starts; the certificate field is z = grad u / sqrt(|grad u|^2 +
/// eps_last^2), which satisfies |z|_inf < 1 by construction.
LimitSolution solve_limit(const ProblemSpec& spec,
                          std::vector<double> eps_schedule = default_eps_schedule(),
                          double tol = 1e-10, int max_iter = 200,
                          std::optional<ScalarField> init = std::nullopt);

/// Checks the weak-solution certificate for a candidate pair. The boundary
/// trace of u must equal the spec's data (hard error otherwise).
Certificate verify_certificate(const ScalarField& u, const VectorField& z,
                               const ProblemSpec& spec, const CertificateThresholds& thresholds);

/// Agreement report between two candidate solutions of the same problem,
/// including the per-cell monotonicity residual of the weighted q-operator
/// (nonnegative up to roundoff for any pair of fields).
struct CrossCheckReport {
  double max_abs_diff = 0.0;
  double energy_limit_a = 0.0;
  double energy_limit_b = 0.0;
  double energy_gap = 0.0;
  double monotonicity_min = 0.0;
};

CrossCheckReport cross_check(const ScalarField& u_a, const ScalarField& u_b,
                             const ProblemSpec& spec);

}  // namespace dp1
