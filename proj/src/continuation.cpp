#include "dp1/continuation.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "dp1/csv_io.hpp"

namespace dp1 {

namespace {

std::vector<double> make_schedule(const ScheduleParams& sched) {
  if (!(sched.p_start > 1.0) || !std::isfinite(sched.p_start)) {
    throw std::invalid_argument("run_continuation: p_start must be > 1");
  }
  if (!(sched.ratio > 0.0) || !(sched.ratio < 1.0)) {
    throw std::invalid_argument("run_continuation: ratio must lie in (0, 1)");
  }
  if (sched.num_steps < 0) throw std::invalid_argument("run_continuation: K must be >= 0");
  std::vector<double> ps(sched.num_steps + 1);
  for (int k = 0; k <= sched.num_steps; ++k) {
    ps[k] = 1.0 + (sched.p_start - 1.0) * std::pow(sched.ratio, k);
  }
  return ps;
}

}  // namespace

ContinuationResult run_continuation(const ProblemSpec& spec, const ScheduleParams& sched,
                                    double tol, int max_iter, const std::string& snapshot_dir) {
  ContinuationResult result;
  result.trace.schedule = make_schedule(sched);

  // The hypothesis must hold at the head of the schedule; this throws with
  // the violated clause in the message.
  Exponents(result.trace.schedule.front(), spec.q(), spec.mesh().dim);

  if (!snapshot_dir.empty()) std::filesystem::create_directories(snapshot_dir);

  std::optional<ScalarField> warm;
  VectorField prev_grad, prev_sigma;
  for (int k = 0; k < static_cast<int>(result.trace.schedule.size()); ++k) {
    const double pk = result.trace.schedule[k];

    // Steps after the first may drift past the exponent-ratio clause when
    // q > 1 + 1/N; abort with the partial trace rather than keep solving
    // problems the hypothesis no longer covers.
    DoublePhaseSolution sol;
    try {
      ProblemSpec step_spec = spec.with_p(pk);
      sol = solve_double_phase(step_spec, warm, tol, max_iter);
    } catch (const std::invalid_argument& e) {
      if (k == 0) throw;
      result.converged = false;
      result.message = std::string("schedule aborted at k = ") + std::to_string(k) + ": " + e.what();
      return result;
    }

    ContinuationStep rec;
    rec.k = k;
    rec.p = pk;
    rec.energy_double_phase = sol.energy.total;
    rec.energy_limit_exact = energy_limit(sol.u, spec, 0.0).total;
    rec.lambda_p = sol.lambda_p;
    rec.sigma_inf = max_magnitude(sol.sigma);
    rec.iterations = sol.iterations;
    rec.final_grad_norm = sol.final_grad_norm;

    const VectorField grad_k = gradient(sol.u);
    if (k > 0) {
      rec.dist_prev_lqa = weighted_lq_norm(subtract(grad_k, prev_grad), spec.weight(), spec.q());
      rec.sigma_drift_inf = max_magnitude(subtract(sol.sigma, prev_sigma));
    }

    if (!snapshot_dir.empty()) {
      rec.snapshot_path = snapshot_dir + "/step_" + std::to_string(k) + ".csv";
      write_field_csv(sol.u, rec.snapshot_path);
    }

    result.trace.steps.push_back(rec);

    if (!sol.converged) {
      result.converged = false;
      result.message = "inner solve at p = " + std::to_string(pk) +
                       " did not converge within the iteration budget";
      return result;
    }

    if (k == static_cast<int>(result.trace.schedule.size()) - 1) {
      LimitCandidate cand;
      cand.u = sol.u;
      cand.z = sol.sigma;
      cand.p_final = pk;
      cand.steps_completed = k + 1;
      result.candidate = std::move(cand);
    }
    warm = std::move(sol.u);
    prev_grad = std::move(grad_k);
    prev_sigma = std::move(sol.sigma);
  }
  result.converged = true;
  return result;
}

ConvergenceDiagnostics convergence_diagnostics(const ContinuationTrace& trace,
                                               const ProblemSpec& spec, double sigma_slack) {
  (void)spec;
  const auto& steps = trace.steps;
  if (steps.size() < 3) {
    throw std::invalid_argument("convergence_diagnostics: need at least three steps");
  }
  ConvergenceDiagnostics d;
  d.sigma_slack = sigma_slack;
  const std::size_t n = steps.size();
  d.distances_eventually_decreasing = steps[n - 1].dist_prev_lqa <= steps[n - 2].dist_prev_lqa &&
                                      steps[n - 2].dist_prev_lqa <= steps[n - 3].dist_prev_lqa;
  d.final_sigma_inf = steps[n - 1].sigma_inf;
  d.sigma_within_unit_slack = d.final_sigma_inf <= 1.0 + sigma_slack;

  double rate_sum = 0.0;
  int rate_count = 0;
  for (std::size_t k = 2; k < n; ++k) {
    if (steps[k - 1].dist_prev_lqa > 0.0) {
      rate_sum += steps[k].dist_prev_lqa / steps[k - 1].dist_prev_lqa;
      ++rate_count;
    }
  }
  d.cauchy_rate = rate_count > 0 ? rate_sum / rate_count : 0.0;
  return d;
}

void write_trace_csv(const ContinuationTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "k,p_k,energy_Fp,energy_I,lambda_p,sigma_inf,dist_prev_Lqa\n";
  for (const ContinuationStep& s : trace.steps) {
    out << s.k << ',' << format_double(s.p) << ',' << format_double(s.energy_double_phase) << ','
        << format_double(s.energy_limit_exact) << ',' << format_double(s.lambda_p) << ','
        << format_double(s.sigma_inf) << ',' << format_double(s.dist_prev_lqa) << '\n';
  }
}

}  // namespace dp1
