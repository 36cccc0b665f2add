#include "dp1/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>

#include "dp1/continuation.hpp"
#include "dp1/csv_io.hpp"
#include "dp1/double_phase_solver.hpp"
#include "dp1/limit_solver.hpp"
#include "dp1/oracle1d.hpp"

namespace dp1 {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw ConfigError(0, "no output directory given (use --out or [output] dir)");
  fs::create_directories(dir);
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

json energy_json(const EnergyReport& r) {
  return json{{"total", r.total}, {"principal", r.principal}, {"weighted", r.weighted}};
}

json certificate_json(const Certificate& c) {
  json j;
  j["residual_div"] = c.residual_div;
  j["z_inf"] = c.z_inf;
  j["alignment_gap"] = c.alignment_gap;
  j["alignment_gap_active"] = c.alignment_gap_active;
  j["alignment_rel_active"] = c.alignment_rel_active;
  j["energy_I"] = c.energy_limit;
  j["pass"] = c.pass;
  j["checks"] = {{"residual_ok", c.residual_ok}, {"z_ok", c.z_ok}, {"alignment_ok", c.alignment_ok}};
  j["thresholds"] = {{"residual", c.thresholds.residual},
                     {"z_excess", c.thresholds.z_excess},
                     {"alignment", c.thresholds.alignment},
                     {"activity_factor", c.thresholds.activity_factor}};
  return j;
}

void write_mesh_files(const Mesh& mesh, const std::string& dir) {
  write_nodes_csv(mesh, dir + "/nodes.csv");
  write_cells_csv(mesh, dir + "/cells.csv");
}

json weight_diagnostics(const ProblemSpec& spec) {
  const double aq = muckenhoupt_aq_estimate(spec.weight(), spec.q(), 4);
  json j;
  j["max"] = spec.weight().max_value();
  j["lipschitz_ratio"] = spec.weight().lipschitz_ratio();
  j["muckenhoupt_aq_lower_bound"] = std::isinf(aq) ? json("inf") : json(aq);
  return j;
}

// Seeded interior perturbation of the quadratic extension; keeps multistart
// checks reproducible for a fixed seed.
ScalarField randomized_start(const ProblemSpec& spec, std::uint64_t seed) {
  ScalarField u = quadratic_extension(spec);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  for (int n : spec.free_nodes()) u.values[n] += dist(rng);
  return u;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int cmd_solve_pq(const RunConfig& cfg, const std::string& out_dir) {
  return run_guarded([&]() {
    ensure_dir(out_dir);
    const ProblemSpec spec = cfg.build_spec(true);
    const DoublePhaseSolution sol = solve_double_phase(spec, std::nullopt, cfg.tol, cfg.max_iter);

    write_mesh_files(spec.mesh(), out_dir);
    write_field_csv(sol.u, out_dir + "/u.csv");
    write_vfield_csv(sol.sigma, out_dir + "/sigma.csv");
    write_vfield_csv(sol.tau, out_dir + "/tau.csv");

    json j;
    j["config"] = cfg.to_json();
    j["command"] = "solve-pq";
    j["converged"] = sol.converged;
    j["iterations"] = sol.iterations;
    j["final_grad_norm"] = sol.final_grad_norm;
    j["energy"] = energy_json(sol.energy);
    j["lambda_p"] = sol.lambda_p;
    j["weight"] = weight_diagnostics(spec);
    j["weak_residual"] = weak_residual(sol, spec);
    write_json(j, out_dir + "/report.json");

    if (!sol.converged) {
      std::cerr << "solve-pq did not converge\n";
      return kExitNoConverge;
    }
    return kExitOk;
  });
}

int cmd_continue(const RunConfig& cfg, const std::string& out_dir) {
  return run_guarded([&]() {
    ensure_dir(out_dir);
    if (!cfg.p_start) throw ConfigError(0, "[exponents] p_start is required for 'continue'");
    const ProblemSpec spec = cfg.build_spec(false);
    ScheduleParams sched{*cfg.p_start, cfg.ratio, cfg.steps};

    ContinuationResult res;
    try {
      res = run_continuation(spec, sched, cfg.tol, cfg.max_iter, out_dir + "/snapshots");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, e.what());
    }
    write_trace_csv(res.trace, out_dir + "/trace.csv");
    write_mesh_files(spec.mesh(), out_dir);

    json j;
    j["config"] = cfg.to_json();
    j["command"] = "continue";
    j["converged"] = res.converged;
    j["message"] = res.message;
    j["schedule"] = res.trace.schedule;
    j["weight"] = weight_diagnostics(spec);
    if (res.trace.steps.size() >= 3) {
      const ConvergenceDiagnostics d = convergence_diagnostics(res.trace, spec);
      j["diagnostics"] = {{"distances_eventually_decreasing", d.distances_eventually_decreasing},
                          {"final_sigma_inf", d.final_sigma_inf},
                          {"sigma_within_unit_slack", d.sigma_within_unit_slack},
                          {"sigma_slack", d.sigma_slack},
                          {"cauchy_rate", d.cauchy_rate}};
    }
    if (res.candidate) {
      write_field_csv(res.candidate->u, out_dir + "/u_star.csv");
      write_vfield_csv(res.candidate->z, out_dir + "/z_star.csv");
      j["p_final"] = res.candidate->p_final;
      const Certificate cert = verify_certificate(res.candidate->u, res.candidate->z, spec,
                                                  cfg.build_thresholds(spec.mesh()));
      write_json(json{{"config", cfg.to_json()}, {"certificate", certificate_json(cert)}},
                 out_dir + "/certificate.json");
    }
    write_json(j, out_dir + "/report.json");

    if (!res.converged) {
      std::cerr << "continuation aborted: " << res.message << '\n';
      return kExitNoConverge;
    }
    return kExitOk;
  });
}

int cmd_solve_limit(const RunConfig& cfg, const std::string& out_dir) {
  return run_guarded([&]() {
    ensure_dir(out_dir);
    const ProblemSpec spec = cfg.build_spec(false);
    const LimitSolution sol =
        solve_limit(spec, cfg.build_eps_schedule(), cfg.limit_tol, cfg.max_iter);

    write_mesh_files(spec.mesh(), out_dir);
    write_field_csv(sol.u, out_dir + "/u_star.csv");
    write_vfield_csv(sol.z, out_dir + "/z_star.csv");

    json j;
    j["config"] = cfg.to_json();
    j["command"] = "solve-limit";
    j["converged"] = sol.report.converged;
    j["message"] = sol.report.message;
    j["eps_schedule"] = sol.report.eps_schedule;
    j["weight"] = weight_diagnostics(spec);
    j["iterations_per_eps"] = sol.report.iterations_per_eps;
    j["energy_I"] = sol.report.energy_limit_exact;
    j["final_grad_norm"] = sol.report.final_grad_norm;
    write_json(j, out_dir + "/report.json");

    if (!sol.report.converged) {
      std::cerr << "solve-limit did not converge: " << sol.report.message << '\n';
      return kExitNoConverge;
    }
    const Certificate cert =
        verify_certificate(sol.u, sol.z, spec, cfg.build_thresholds(spec.mesh()));
    write_json(json{{"config", cfg.to_json()}, {"certificate", certificate_json(cert)}},
               out_dir + "/certificate.json");
    return kExitOk;
  });
}

int cmd_verify(const RunConfig& cfg, const std::string& out_dir, const std::string& u_csv,
               const std::string& z_csv) {
  return run_guarded([&]() {
    ensure_dir(out_dir);
    const ProblemSpec spec = cfg.build_spec(false);
    const ScalarField u = read_field_csv(spec.mesh_ptr(), u_csv);
    const VectorField z = read_vfield_csv(spec.mesh_ptr(), z_csv);
    const Certificate cert = verify_certificate(u, z, spec, cfg.build_thresholds(spec.mesh()));

    json j;
    j["config"] = cfg.to_json();
    j["command"] = "verify";
    j["certificate"] = certificate_json(cert);
    write_json(j, out_dir + "/certificate.json");

    if (!cert.pass) {
      std::cerr << "certificate verification failed\n";
      return kExitVerifyFail;
    }
    return kExitOk;
  });
}

int cmd_oracle(const RunConfig& cfg, const std::string& out_dir) {
  return run_guarded([&]() {
    ensure_dir(out_dir);
    if (cfg.dim != 1) throw ConfigError(0, "the oracle is 1D-only");
    const auto a = cfg.weight_callable_1d();
    const auto [h0, h1] = cfg.boundary_endpoints_1d();

    OracleSolution sol = cfg.p ? oracle_pq_1d(a, *cfg.p, cfg.q, h0, h1, cfg.length)
                               : oracle_limit_1d(a, cfg.q, h0, h1, cfg.length);

    std::vector<double> query(cfg.cells + 1);
    for (int i = 0; i <= cfg.cells; ++i) query[i] = cfg.length * i / cfg.cells;
    write_oracle_csv(sol, query, out_dir + "/oracle.csv");

    json j;
    j["config"] = cfg.to_json();
    j["command"] = "oracle";
    j["problem"] = cfg.p ? "pq" : "limit";
    j["flux_c"] = sol.constant_data() ? json(nullptr) : json(sol.flux());
    j["energy"] = sol.energy();
    write_json(j, out_dir + "/report.json");
    return kExitOk;
  });
}

int cmd_compare(const RunConfig& cfg, const std::string& out_dir) {
  return run_guarded([&]() {
    ensure_dir(out_dir);
    if (!cfg.p_start) throw ConfigError(0, "[exponents] p_start is required for 'compare'");
    const ProblemSpec spec = cfg.build_spec(false);
    ScheduleParams sched{*cfg.p_start, cfg.ratio, cfg.steps};

    ContinuationResult cont;
    try {
      cont = run_continuation(spec, sched, cfg.tol, cfg.max_iter, out_dir + "/snapshots");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, e.what());
    }
    write_trace_csv(cont.trace, out_dir + "/trace.csv");
    if (!cont.converged) {
      std::cerr << "continuation aborted: " << cont.message << '\n';
      return kExitNoConverge;
    }

    const std::vector<double> eps_schedule = cfg.build_eps_schedule();
    const LimitSolution lim = solve_limit(spec, eps_schedule, cfg.limit_tol, cfg.max_iter);
    if (!lim.report.converged) {
      std::cerr << "solve-limit did not converge: " << lim.report.message << '\n';
      return kExitNoConverge;
    }

    // Uniqueness probe: a second limit solve from a seeded random start.
    const LimitSolution lim2 = solve_limit(spec, eps_schedule, cfg.limit_tol, cfg.max_iter,
                                           randomized_start(spec, cfg.seed));
    double multistart_diff = 0.0;
    for (int n = 0; n < spec.mesh().n_nodes(); ++n) {
      multistart_diff = std::max(multistart_diff, std::abs(lim.u.values[n] - lim2.u.values[n]));
    }

    write_mesh_files(spec.mesh(), out_dir);
    write_field_csv(cont.candidate->u, out_dir + "/u_continuation.csv");
    write_vfield_csv(cont.candidate->z, out_dir + "/z_continuation.csv");
    write_field_csv(lim.u, out_dir + "/u_limit.csv");
    write_vfield_csv(lim.z, out_dir + "/z_limit.csv");

    const CrossCheckReport rep = cross_check(cont.candidate->u, lim.u, spec);
    const CertificateThresholds thr = cfg.build_thresholds(spec.mesh());
    const Certificate cert_cont = verify_certificate(cont.candidate->u, cont.candidate->z, spec, thr);
    const Certificate cert_lim = verify_certificate(lim.u, lim.z, spec, thr);

    json j;
    j["config"] = cfg.to_json();
    j["command"] = "compare";
    j["max_abs_diff"] = rep.max_abs_diff;
    j["energy_I_continuation"] = rep.energy_limit_a;
    j["energy_I_limit"] = rep.energy_limit_b;
    j["energy_gap"] = rep.energy_gap;
    j["monotonicity_min"] = rep.monotonicity_min;
    j["multistart_max_diff"] = multistart_diff;
    j["certificate_continuation"] = certificate_json(cert_cont);
    j["certificate_limit"] = certificate_json(cert_lim);
    write_json(j, out_dir + "/report.json");
    return kExitOk;
  });
}

}  // namespace dp1
