#include "dp1/limit_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dp1/double_phase_solver.hpp"

namespace dp1 {

CertificateThresholds CertificateThresholds::defaults_for(const Mesh& mesh) {
  const double h = mesh.max_cell_diameter();
  double h_ref;
  if (mesh.dim == 1) {
    h_ref = mesh.extent_x / 512.0;
  } else {
    h_ref = std::sqrt((mesh.extent_x / 64.0) * (mesh.extent_x / 64.0) +
                      (mesh.extent_y / 64.0) * (mesh.extent_y / 64.0));
  }
  const double scale = h / h_ref;
  CertificateThresholds t;
  t.residual = 1e-6 * scale;
  t.z_excess = 1e-3 * scale;
  t.alignment = 1e-3 * scale;
  return t;
}

std::vector<double> default_eps_schedule() {
  return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
}

LimitSolution solve_limit(const ProblemSpec& spec, std::vector<double> eps_schedule, double tol,
                          int max_iter, std::optional<ScalarField> init) {
  if (eps_schedule.empty()) throw std::invalid_argument("solve_limit: empty eps schedule");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0)) throw std::invalid_argument("solve_limit: eps must be > 0");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1])) {
      throw std::invalid_argument("solve_limit: eps schedule must be strictly decreasing");
    }
  }

  LimitSolution sol;
  sol.report.eps_schedule = eps_schedule;

  ScalarField u = init ? std::move(*init) : quadratic_extension(spec);
  NewtonOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;

  for (double eps : eps_schedule) {
    const ProblemSpec eps_spec = spec.with_epsilon(eps);
    NewtonOutcome outcome = newton_minimize(eps_spec, EnergyKind::SmoothedLimit, std::move(u), opts);
    u = std::move(outcome.u);
    sol.report.iterations_per_eps.push_back(outcome.iterations);
    sol.report.final_grad_norm = outcome.final_grad_norm;
    if (!outcome.converged) {
      sol.report.converged = false;
      sol.report.message =
          "smoothed solve at eps = " + std::to_string(eps) + " did not converge";
      sol.u = std::move(u);
      sol.z = VectorField(spec.mesh_ptr());
      sol.report.energy_limit_exact = energy_limit(sol.u, spec, 0.0).total;
      return sol;
    }
  }

  const double eps_last = eps_schedule.back();
  const VectorField g = gradient(u);
  VectorField z(spec.mesh_ptr());
  for (int c = 0; c < spec.mesh().n_cells(); ++c) {
    const Vec2& gc = g.values[c];
    z.values[c] = gc * (1.0 / std::sqrt(gc.dot(gc) + eps_last * eps_last));
  }

  sol.u = std::move(u);
  sol.z = std::move(z);
  sol.report.converged = true;
  sol.report.energy_limit_exact = energy_limit(sol.u, spec, 0.0).total;
  return sol;
}

Certificate verify_certificate(const ScalarField& u, const VectorField& z,
                               const ProblemSpec& spec, const CertificateThresholds& thresholds) {
  const Mesh& mesh = spec.mesh();
  if (u.mesh != spec.mesh_ptr() || z.mesh != spec.mesh_ptr()) {
    throw std::invalid_argument("verify_certificate: fields live on a different mesh");
  }
  const auto& bn = mesh.boundary_nodes;
  for (std::size_t i = 0; i < bn.size(); ++i) {
    const double h = spec.boundary_values()[i];
    if (std::abs(u.values[bn[i]] - h) > 1e-12 * std::max(1.0, std::abs(h))) {
      throw std::invalid_argument(
          "verify_certificate: boundary trace of u does not match the boundary data");
    }
  }

  Certificate cert;
  cert.thresholds = thresholds;

  const VectorField g = gradient(u);
  const VectorField tau = weighted_power_flux(u, spec.weight(), spec.q());

  // Divergence-form residual against interior nodal hats.
  std::vector<double> r(mesh.n_nodes(), 0.0);
  const int nv = mesh.verts_per_cell();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Vec2 flux = z.values[c] + tau.values[c];
    for (int k = 0; k < nv; ++k) {
      const int n = mesh.cells[c][k];
      if (mesh.node_on_boundary[n]) continue;
      r[n] += mesh.cell_volumes[c] * flux.dot(mesh.cell_basis_grads[c][k]);
    }
  }
  for (int n = 0; n < mesh.n_nodes(); ++n) cert.residual_div = std::max(cert.residual_div, std::abs(r[n]));

  cert.z_inf = max_magnitude(z);

  double gmax = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) gmax = std::max(gmax, g.values[c].norm());
  const double activity = thresholds.activity_factor * gmax;

  double gap_all = 0.0, gap_active = 0.0, rel_active = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double t = g.values[c].norm();
    const double gap = t - z.values[c].dot(g.values[c]);
    gap_all = std::max(gap_all, gap);
    if (t > activity) {
      gap_active = std::max(gap_active, gap);
      rel_active = std::max(rel_active, gap / std::max(1.0, t));
    }
  }
  cert.alignment_gap = gap_all;
  cert.alignment_gap_active = gap_active;
  cert.alignment_rel_active = rel_active;

  cert.energy_limit = energy_limit(u, spec, 0.0).total;

  cert.residual_ok = cert.residual_div <= thresholds.residual;
  cert.z_ok = cert.z_inf <= 1.0 + thresholds.z_excess;
  cert.alignment_ok = cert.alignment_rel_active <= thresholds.alignment;
  cert.pass = cert.residual_ok && cert.z_ok && cert.alignment_ok;
  return cert;
}

CrossCheckReport cross_check(const ScalarField& u_a, const ScalarField& u_b,
                             const ProblemSpec& spec) {
  if (u_a.mesh != spec.mesh_ptr() || u_b.mesh != spec.mesh_ptr()) {
    throw std::invalid_argument("cross_check: fields live on a different mesh");
  }
  CrossCheckReport rep;
  for (int n = 0; n < spec.mesh().n_nodes(); ++n) {
    rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(u_a.values[n] - u_b.values[n]));
  }
  rep.energy_limit_a = energy_limit(u_a, spec, 0.0).total;
  rep.energy_limit_b = energy_limit(u_b, spec, 0.0).total;
  rep.energy_gap = std::abs(rep.energy_limit_a - rep.energy_limit_b);

  const VectorField qa = weighted_power_flux(u_a, spec.weight(), spec.q());
  const VectorField qb = weighted_power_flux(u_b, spec.weight(), spec.q());
  const VectorField ga = gradient(u_a);
  const VectorField gb = gradient(u_b);
  double mono = std::numeric_limits<double>::infinity();
  for (int c = 0; c < spec.mesh().n_cells(); ++c) {
    const Vec2 dflux = qa.values[c] - qb.values[c];
    const Vec2 dgrad = ga.values[c] - gb.values[c];
    mono = std::min(mono, dflux.dot(dgrad));
  }
  rep.monotonicity_min = spec.mesh().n_cells() > 0 ? mono : 0.0;
  return rep;
}

}  // namespace dp1
