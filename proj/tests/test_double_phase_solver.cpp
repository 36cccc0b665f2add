#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "dp1/double_phase_solver.hpp"
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

ProblemSpec affine_spec_1d(int cells, double p) {
  auto mesh = build_interval_mesh(cells, 1.0);
  return ProblemSpec(mesh, affine_weight_1d(mesh), 2.0, p, linear_boundary(*mesh));
}

double max_err_vs(const ScalarField& u, const std::function<double(double)>& ref) {
  double e = 0.0;
  for (int n = 0; n < u.mesh->n_nodes(); ++n) {
    e = std::max(e, std::abs(u.values[n] - ref(u.mesh->nodes[n].x)));
  }
  return e;
}

}  // namespace

TEST_SUITE("double_phase") {

TEST_CASE("constant-coefficient 1D problem has the linear solution") {
  auto mesh = build_interval_mesh(64, 1.0);
  const ProblemSpec spec(mesh, constant_weight(mesh, 1.0), 2.0, 1.5, linear_boundary(*mesh));
  const DoublePhaseSolution sol = solve_double_phase(spec);
  REQUIRE(sol.converged);
  CHECK(max_err_vs(sol.u, [](double x) { return x; }) < 1e-10);
  CHECK(sol.final_grad_norm <= 1e-9);
  CHECK(weak_residual(sol, spec) < 1e-12);
  // constant gradient 1 gives sigma = tau = 1 per cell
  for (int c = 0; c < mesh->n_cells(); ++c) {
    CHECK(sol.sigma.values[c].x == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.tau.values[c].x == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("2D constant-coefficient problems reproduce the plane x") {
  auto mesh = build_rect_mesh(8, 8, 1.0, 1.0);
  const std::pair<double, double> pq[] = {{1.1, 1.4}, {1.5, 2.0}, {2.0, 2.9}};
  for (const auto& [p, q] : pq) {
    const ProblemSpec spec(mesh, constant_weight(mesh, 1.0), q, p, linear_boundary(*mesh));
    const DoublePhaseSolution sol = solve_double_phase(spec);
    REQUIRE(sol.converged);
    double err = 0.0;
    for (int n = 0; n < mesh->n_nodes(); ++n) {
      err = std::max(err, std::abs(sol.u.values[n] - mesh->nodes[n].x));
    }
    CHECK(err < 1e-8);
    CHECK(weak_residual(sol, spec) <= 1e-9);
  }
}

TEST_CASE("affine-weight solve matches the constant-flux oracle") {
  const ProblemSpec spec = affine_spec_1d(512, 1.2);
  const DoublePhaseSolution sol = solve_double_phase(spec);
  REQUIRE(sol.converged);
  const OracleSolution ref =
      oracle_pq_1d([](double x) { return x + 0.5; }, 1.2, 2.0, 0.0, 1.0, 1.0);
  CHECK(max_err_vs(sol.u, [&](double x) { return ref.u(x); }) < 2e-3);
}

TEST_CASE("weak residual reacts to perturbations") {
  const ProblemSpec spec = affine_spec_1d(32, 1.5);
  DoublePhaseSolution sol = solve_double_phase(spec, std::nullopt, 1e-9, 200);
  REQUIRE(sol.converged);
  CHECK(weak_residual(sol, spec) <= 1e-9);

  sol.u.values[10] += 0.1;
  sol.sigma = power_flux(sol.u, 1.5);
  sol.tau = weighted_power_flux(sol.u, spec.weight(), spec.q());
  CHECK(weak_residual(sol, spec) > 1e-9);
}

TEST_CASE("solution minimizes the energy against random perturbations") {
  const ProblemSpec spec = affine_spec_1d(48, 1.3);
  const DoublePhaseSolution sol = solve_double_phase(spec);
  REQUIRE(sol.converged);
  const double e_star = sol.energy.total;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(-1e-3, 1e-3);
  for (int trial = 0; trial < 100; ++trial) {
    ScalarField w = sol.u;
    for (int n : spec.free_nodes()) w.values[n] += dist(rng);
    CHECK(energy_double_phase(w, spec).total >= e_star - 1e-12);
  }
}

TEST_CASE("independent initializations land on the same minimizer") {
  const ProblemSpec spec = affine_spec_1d(128, 1.2);
  const double tol = 1e-9;
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  ScalarField init_a = pinned_field(spec, 0.0);
  ScalarField init_b = pinned_field(spec, 0.0);
  for (int n : spec.free_nodes()) {
    init_a.values[n] = dist(rng);
    init_b.values[n] = dist(rng);
  }
  const DoublePhaseSolution a = solve_double_phase(spec, init_a, tol, 200);
  const DoublePhaseSolution b = solve_double_phase(spec, init_b, tol, 200);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  double diff = 0.0;
  for (int n = 0; n < spec.mesh().n_nodes(); ++n) {
    diff = std::max(diff, std::abs(a.u.values[n] - b.u.values[n]));
  }
  CHECK(diff <= 10.0 * tol);
}

TEST_CASE("stored fluxes reproduce bit-for-bit from the returned field") {
  const ProblemSpec spec = affine_spec_1d(64, 1.4);
  const DoublePhaseSolution sol = solve_double_phase(spec);
  const VectorField sigma = power_flux(sol.u, 1.4);
  const VectorField tau = weighted_power_flux(sol.u, spec.weight(), spec.q());
  for (int c = 0; c < spec.mesh().n_cells(); ++c) {
    CHECK(sigma.values[c].x == sol.sigma.values[c].x);
    CHECK(tau.values[c].x == sol.tau.values[c].x);
  }
}

TEST_CASE("quadratic internal fixture converges in one Newton step") {
  auto mesh = build_interval_mesh(32, 1.0);
  const ProblemSpec spec = ProblemSpec::unchecked(mesh, constant_weight(mesh, 1.0), 2.0, 2.0,
                                                  linear_boundary(*mesh));
  ScalarField init = pinned_field(spec, 0.0);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int n : spec.free_nodes()) init.values[n] = dist(rng);
  const DoublePhaseSolution sol = solve_double_phase(spec, init, 1e-9, 200);
  REQUIRE(sol.converged);
  CHECK(sol.iterations == 1);
  for (int n = 0; n < mesh->n_nodes(); ++n) {
    CHECK(std::abs(sol.u.values[n] - mesh->nodes[n].x) < 1e-10);
  }
}

TEST_CASE("a single-cell mesh has no unknowns and returns the pinned data") {
  auto mesh = build_interval_mesh(1, 2.0);
  const ProblemSpec spec(mesh, constant_weight(mesh, 1.0), 2.0, 1.5, {3.0, 5.0});
  const DoublePhaseSolution sol = solve_double_phase(spec);
  CHECK(sol.converged);
  CHECK(sol.iterations == 0);
  CHECK(sol.u.values == std::vector<double>{3.0, 5.0});
  CHECK(sol.sigma.values[0].x == doctest::Approx(1.0));  // gradient (5-3)/2 = 1
}

TEST_CASE("iteration budget exhaustion is flagged, not thrown") {
  const ProblemSpec spec = affine_spec_1d(64, 1.2);
  ScalarField init = pinned_field(spec, 0.0);  // far from the minimizer
  const DoublePhaseSolution sol = solve_double_phase(spec, init, 1e-12, 1);
  CHECK(!sol.converged);
  CHECK(sol.final_grad_norm > 1e-12);
}

TEST_CASE("sigma obeys its pointwise bound and energy descends") {
  const ProblemSpec spec = affine_spec_1d(64, 1.1);
  const DoublePhaseSolution sol = solve_double_phase(spec);
  REQUIRE(sol.converged);
  const VectorField g = gradient(sol.u);
  const double gmax = max_magnitude(g);
  const double bound = std::max(1.0, std::pow(gmax, *spec.p() - 1.0));
  for (const Vec2& s : sol.sigma.values) CHECK(s.norm() <= bound * (1.0 + 1e-13));

  REQUIRE(sol.energy_history.size() >= 2);
  for (std::size_t i = 1; i < sol.energy_history.size(); ++i) {
    CHECK(sol.energy_history[i] <= sol.energy_history[i - 1]);
  }
}

}  // TEST_SUITE
