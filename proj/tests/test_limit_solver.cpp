#include <cmath>
#include <random>

#include "doctest.h"
#include "dp1/continuation.hpp"
#include "dp1/limit_solver.hpp"
#include "dp1/oracle1d.hpp"

using namespace dp1;

namespace {

Weight constant_weight(std::shared_ptr<const Mesh> mesh, double value) {
  return Weight(mesh, std::vector<double>(mesh->n_nodes(), value));
}

Weight affine_weight_1d(std::shared_ptr<const Mesh> mesh) {
  std::vector<double> a(mesh->n_nodes());
  for (int n = 0; n < mesh->n_nodes(); ++n) a[n] = mesh->nodes[n].x + 0.5;
  return Weight(mesh, a);
}

std::vector<double> linear_boundary(const Mesh& mesh) {
  std::vector<double> h;
  for (int n : mesh.boundary_nodes) h.push_back(mesh.nodes[n].x);
  return h;
}

ProblemSpec constant_spec_1d(int cells) {
  auto mesh = build_interval_mesh(cells, 1.0);
  return ProblemSpec(mesh, constant_weight(mesh, 1.0), 2.0, std::nullopt, linear_boundary(*mesh));
}

ProblemSpec affine_spec_1d(int cells) {
  auto mesh = build_interval_mesh(cells, 1.0);
  return ProblemSpec(mesh, affine_weight_1d(mesh), 2.0, std::nullopt, linear_boundary(*mesh));
}

}  // namespace

TEST_SUITE("limit_solver") {

TEST_CASE("constant-weight limit problem has the linear minimizer") {
  const ProblemSpec spec = constant_spec_1d(64);
  const LimitSolution sol = solve_limit(spec);
  REQUIRE(sol.report.converged);
  for (int n = 0; n < spec.mesh().n_nodes(); ++n) {
    CHECK(std::abs(sol.u.values[n] - spec.mesh().nodes[n].x) < 1e-9);
  }
  CHECK(sol.report.energy_limit_exact == doctest::Approx(1.5).epsilon(1e-9));
  for (const Vec2& z : sol.z.values) {
    CHECK(z.x > 1.0 - 1e-6);  // within eps_last of 1
    CHECK(z.x < 1.0);         // strictly inside the unit ball by construction
  }
}

TEST_CASE("affine-weight limit solve matches the closed-form solution") {
  const ProblemSpec spec = affine_spec_1d(512);
  const LimitSolution sol = solve_limit(spec);
  REQUIRE(sol.report.converged);

  const double log3 = std::log(3.0);
  double err = 0.0;
  for (int n = 0; n < spec.mesh().n_nodes(); ++n) {
    const double x = spec.mesh().nodes[n].x;
    err = std::max(err, std::abs(sol.u.values[n] - std::log(2.0 * x + 1.0) / log3));
  }
  CHECK(err < 2e-3);

  const OracleSolution ref = oracle_limit_1d([](double x) { return x + 0.5; }, 2.0, 0.0, 1.0, 1.0);
  CHECK(std::abs(sol.report.energy_limit_exact - ref.energy()) / ref.energy() < 1e-4);
}

TEST_CASE("constant boundary data gives the constant minimizer with zero energy") {
  auto mesh = build_interval_mesh(32, 1.0);
  const std::vector<double> h(2, 7.0);
  const ProblemSpec spec(mesh, affine_weight_1d(mesh), 2.0, std::nullopt, h);
  const LimitSolution sol = solve_limit(spec);
  REQUIRE(sol.report.converged);
  for (double v : sol.u.values) CHECK(v == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(sol.report.energy_limit_exact == doctest::Approx(0.0));
}

TEST_CASE("eps schedule validation") {
  const ProblemSpec spec = constant_spec_1d(8);
  CHECK_THROWS_AS(solve_limit(spec, {}), std::invalid_argument);
  CHECK_THROWS_AS(solve_limit(spec, {1e-2, 1e-2}), std::invalid_argument);
  CHECK_THROWS_AS(solve_limit(spec, {1e-2, 0.0}), std::invalid_argument);
}

TEST_CASE("certificate passes on the exact constant-weight pair") {
  const ProblemSpec spec = constant_spec_1d(64);
  ScalarField u(spec.mesh_ptr());
  for (int n = 0; n < spec.mesh().n_nodes(); ++n) u.values[n] = spec.mesh().nodes[n].x;
  VectorField z(spec.mesh_ptr());
  for (Vec2& v : z.values) v = {1.0, 0.0};

  const Certificate cert =
      verify_certificate(u, z, spec, CertificateThresholds::defaults_for(spec.mesh()));
  CHECK(cert.residual_div < 1e-12);
  CHECK(cert.z_inf == 1.0);
  CHECK(cert.alignment_gap == 0.0);
  CHECK(cert.pass);
}

TEST_CASE("scaled certificate field fails the sup-norm bound") {
  const ProblemSpec spec = constant_spec_1d(64);
  ScalarField u(spec.mesh_ptr());
  for (int n = 0; n < spec.mesh().n_nodes(); ++n) u.values[n] = spec.mesh().nodes[n].x;
  VectorField z(spec.mesh_ptr());
  for (Vec2& v : z.values) v = {1.5, 0.0};
  const Certificate cert =
      verify_certificate(u, z, spec, CertificateThresholds::defaults_for(spec.mesh()));
  CHECK(cert.z_inf == doctest::Approx(1.5));
  CHECK(!cert.z_ok);
  CHECK(!cert.pass);
}

TEST_CASE("boundary trace mismatch is a hard error") {
  const ProblemSpec spec = constant_spec_1d(16);
  ScalarField u(spec.mesh_ptr(), 0.0);  // u(1) should be 1
  VectorField z(spec.mesh_ptr());
  CHECK_THROWS_AS(
      verify_certificate(u, z, spec, CertificateThresholds::defaults_for(spec.mesh())),
      std::invalid_argument);
}

TEST_CASE("solver output verifies on the affine problem") {
  const ProblemSpec spec = affine_spec_1d(512);
  const LimitSolution sol = solve_limit(spec);
  REQUIRE(sol.report.converged);
  const Certificate cert =
      verify_certificate(sol.u, sol.z, spec, CertificateThresholds::defaults_for(spec.mesh()));
  CHECK(cert.residual_div <= cert.thresholds.residual);
  CHECK(cert.z_inf <= 1.0 + cert.thresholds.z_excess);
  CHECK(cert.alignment_rel_active <= cert.thresholds.alignment);
  CHECK(cert.pass);
}

TEST_CASE("alignment defect is never positive for admissible z") {
  auto mesh = build_rect_mesh(5, 5, 1.0, 1.0);
  const ProblemSpec spec(mesh, constant_weight(mesh, 1.0), 2.0, std::nullopt,
                         linear_boundary(*mesh));
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField u(mesh);
  for (int n = 0; n < mesh->n_nodes(); ++n) u.values[n] = dist(rng);
  const VectorField g = gradient(u);
  for (int trial = 0; trial < 50; ++trial) {
    for (int c = 0; c < mesh->n_cells(); ++c) {
      Vec2 z{dist(rng), dist(rng)};
      const double zn = z.norm();
      if (zn > 1.0) z = z * (1.0 / zn * (1.0 - 1e-12));
      const double defect = z.dot(g.values[c]) - g.values[c].norm();
      CHECK(defect <= 4.0 * 1e-16 * std::max(1.0, g.values[c].norm()));
    }
  }
}

TEST_CASE("minimizer beats random interior perturbations") {
  const ProblemSpec spec = affine_spec_1d(96);
  const LimitSolution sol = solve_limit(spec);
  REQUIRE(sol.report.converged);
  const double e_star = energy_limit(sol.u, spec, 0.0).total;
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> dist(-1e-3, 1e-3);
  for (int trial = 0; trial < 100; ++trial) {
    ScalarField w = sol.u;
    for (int n : spec.free_nodes()) w.values[n] += dist(rng);
    CHECK(energy_limit(w, spec, 0.0).total >= e_star - 1e-10);
  }
}

TEST_CASE("multistart limit solves agree") {
  const ProblemSpec spec = affine_spec_1d(128);
  const double tol = 1e-10;
  const LimitSolution a = solve_limit(spec, default_eps_schedule(), tol);
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  ScalarField init = pinned_field(spec, 0.0);
  for (int n : spec.free_nodes()) init.values[n] = dist(rng);
  const LimitSolution b = solve_limit(spec, default_eps_schedule(), tol, 200, init);
  REQUIRE(a.report.converged);
  REQUIRE(b.report.converged);
  double diff = 0.0;
  for (int n = 0; n < spec.mesh().n_nodes(); ++n) {
    diff = std::max(diff, std::abs(a.u.values[n] - b.u.values[n]));
  }
  CHECK(diff <= 10.0 * tol);
}

TEST_CASE("cross check between the two pipelines") {
  SUBCASE("constant weight") {
    const ProblemSpec spec = constant_spec_1d(64);
    const ContinuationResult cont = run_continuation(spec, {1.3, 0.5, 8});
    const LimitSolution lim = solve_limit(spec);
    REQUIRE(cont.converged);
    REQUIRE(lim.report.converged);
    const CrossCheckReport rep = cross_check(cont.candidate->u, lim.u, spec);
    CHECK(rep.max_abs_diff < 1e-8);
    CHECK(rep.monotonicity_min >= -1e-12);
  }
  SUBCASE("affine weight") {
    const ProblemSpec spec = affine_spec_1d(256);
    const ContinuationResult cont = run_continuation(spec, {1.3, 0.5, 10});
    const LimitSolution lim = solve_limit(spec);
    REQUIRE(cont.converged);
    REQUIRE(lim.report.converged);
    const CrossCheckReport rep = cross_check(cont.candidate->u, lim.u, spec);
    CHECK(rep.max_abs_diff < 5e-3);
    CHECK(rep.monotonicity_min >= -1e-12);
    CHECK(rep.energy_gap < 1e-6);
  }
}

TEST_CASE("degenerate interior weight still produces a certified pair") {
  // the q-phase lives only near the boundary; the jump is carried by the
  // 1-Laplacian phase where the certificate field saturates |z| = 1
  auto mesh = build_interval_mesh(128, 1.0);
  std::vector<double> a(mesh->n_nodes());
  for (int n = 0; n < mesh->n_nodes(); ++n) {
    const double x = mesh->nodes[n].x;
    const double d = std::min(x, 1.0 - x);
    a[n] = std::max(0.0, (0.25 - d) / 0.25);
  }
  const ProblemSpec spec(mesh, Weight(mesh, a), 2.0, std::nullopt, {0.0, 1.0});
  const LimitSolution sol = solve_limit(spec);
  REQUIRE(sol.report.converged);
  const Certificate cert =
      verify_certificate(sol.u, sol.z, spec, CertificateThresholds::defaults_for(*mesh));
  CHECK(cert.pass);
  CHECK(cert.z_inf < 1.0);
  CHECK(cert.z_inf > 1.0 - 1e-6);
}

TEST_CASE("flat regions are handled through the activity threshold") {
  // piecewise data: flat on the left half, ramp on the right
  auto mesh = build_interval_mesh(64, 1.0);
  std::vector<double> a(mesh->n_nodes());
  for (int n = 0; n < mesh->n_nodes(); ++n) a[n] = mesh->nodes[n].x + 0.5;
  ScalarField u(mesh);
  for (int n = 0; n < mesh->n_nodes(); ++n) {
    const double x = mesh->nodes[n].x;
    u.values[n] = x < 0.5 ? 0.0 : 2.0 * (x - 0.5);
  }
  const std::vector<double> h = {0.0, 1.0};
  const ProblemSpec spec(mesh, Weight(mesh, a), 2.0, std::nullopt, h);
  VectorField z(mesh);
  const VectorField g = gradient(u);
  for (int c = 0; c < mesh->n_cells(); ++c) {
    const double t = g.values[c].norm();
    z.values[c] = t > 0.0 ? g.values[c] * (1.0 / t) : Vec2{0.0, 0.0};
  }
  CertificateThresholds thr = CertificateThresholds::defaults_for(*mesh);
  thr.residual = 1e9;  // not under test here
  const Certificate cert = verify_certificate(u, z, spec, thr);
  CHECK(cert.alignment_gap_active == 0.0);
  CHECK(cert.z_inf == 1.0);
}

}  // TEST_SUITE
