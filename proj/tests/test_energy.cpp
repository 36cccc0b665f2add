#include <cmath>
#include <random>

#include "doctest.h"
#include "dp1/energy.hpp"

using namespace dp1;

namespace {

Weight constant_weight(std::shared_ptr<const Mesh> mesh, double value) {
  return Weight(mesh, std::vector<double>(mesh->n_nodes(), value));
}

ScalarField coordinate_field(std::shared_ptr<const Mesh> mesh, double scale = 1.0) {
  ScalarField u(mesh);
  for (int n = 0; n < mesh->n_nodes(); ++n) u.values[n] = scale * mesh->nodes[n].x;
  return u;
}

std::vector<double> linear_boundary(const Mesh& mesh, double scale = 1.0) {
  std::vector<double> h;
  for (int n : mesh.boundary_nodes) h.push_back(scale * mesh.nodes[n].x);
  return h;
}

// Random nodal field on top of a ramp; the ramp keeps most cell gradients
// away from zero so the power-law derivatives stay well conditioned.
ScalarField ramped_random_field(std::shared_ptr<const Mesh> mesh, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField u(mesh);
  for (int n = 0; n < mesh->n_nodes(); ++n) u.values[n] = 2.0 * mesh->nodes[n].x + dist(rng);
  return u;
}

double energy_of(const ScalarField& u, const ProblemSpec& spec, EnergyKind kind) {
  return kind == EnergyKind::DoublePhase ? energy_double_phase(u, spec).total
                                         : energy_limit(u, spec, spec.epsilon()).total;
}

// max_i |g_i - fd_i| / max(1, |fd|_inf) over the free nodes.
double grad_fd_relative_error(const ScalarField& u, const ProblemSpec& spec, EnergyKind kind) {
  const ScalarField g = grad_energy(u, spec, kind);
  double fd_inf = 0.0, err = 0.0;
  for (int n : spec.free_nodes()) {
    const double delta = 1e-6 * std::max(1.0, std::abs(u.values[n]));
    ScalarField up = u, dn = u;
    up.values[n] += delta;
    dn.values[n] -= delta;
    const double fd = (energy_of(up, spec, kind) - energy_of(dn, spec, kind)) / (2.0 * delta);
    fd_inf = std::max(fd_inf, std::abs(fd));
    err = std::max(err, std::abs(g.values[n] - fd));
  }
  return err / std::max(1.0, fd_inf);
}

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("problem spec validates the hypothesis clauses") {
  auto mesh = build_interval_mesh(8, 1.0);
  const Weight w = constant_weight(mesh, 1.0);
  CHECK_NOTHROW(ProblemSpec(mesh, w, 2.0, 1.5, linear_boundary(*mesh)));

  try {
    ProblemSpec(mesh, w, 2.5, 1.2, linear_boundary(*mesh));
    FAIL("expected exponent clause violation");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("q/p < 1 + 1/N") != std::string::npos);
  }

  std::vector<double> a(mesh->n_nodes(), 1.0);
  a[0] = 0.0;
  try {
    ProblemSpec(mesh, Weight(mesh, a), 2.0, 1.5, linear_boundary(*mesh));
    FAIL("expected boundary weight clause violation");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("a(x) ≠ 0 on ∂Ω") != std::string::npos);
  }

  CHECK_THROWS_AS(ProblemSpec(mesh, w, 2.0, 1.5, std::vector<double>{0.0}),
                  std::invalid_argument);
  // the unchecked path exists for internal fixtures such as p = q = 2
  CHECK_NOTHROW(ProblemSpec::unchecked(mesh, w, 2.0, 2.0, linear_boundary(*mesh)));
}

TEST_CASE("double-phase energy on closed-form fields") {
  auto mesh = build_interval_mesh(16, 1.0);
  const ProblemSpec spec(mesh, constant_weight(mesh, 1.0), 3.0, 2.0, linear_boundary(*mesh));
  const EnergyReport r = energy_double_phase(coordinate_field(mesh), spec);
  CHECK(r.principal == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(r.weighted == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(r.total == doctest::Approx(5.0 / 6.0).epsilon(1e-13));
  CHECK(r.total == doctest::Approx(r.principal + r.weighted).epsilon(1e-12));

  CHECK(energy_double_phase(ScalarField(mesh, 2.0), spec).total == 0.0);
}

TEST_CASE("double-phase energy on the unit square") {
  auto mesh = build_rect_mesh(8, 8, 1.0, 1.0);
  const ProblemSpec spec(mesh, constant_weight(mesh, 2.0), 2.0, 1.5, linear_boundary(*mesh));
  const EnergyReport r = energy_double_phase(coordinate_field(mesh), spec);
  CHECK(r.total == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("limit energy and its quadrature identity") {
  auto mesh = build_interval_mesh(16, 1.0);
  const ProblemSpec spec(mesh, constant_weight(mesh, 1.0), 2.0, std::nullopt,
                         linear_boundary(*mesh));
  CHECK(energy_limit(coordinate_field(mesh), spec, 0.0).total ==
        doctest::Approx(1.5).epsilon(1e-13));
  CHECK(energy_limit(ScalarField(mesh, -3.0), spec, 0.0).total == 0.0);

  // at eps = 0 the limit energy decomposes into TV + (1/q) |grad u|_{Lq_a}^q
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const ScalarField u = ramped_random_field(mesh, rng);
    const double tv = total_variation(u);
    const double wq = weighted_lq_norm(gradient(u), spec.weight(), spec.q());
    const double expected = tv + std::pow(wq, spec.q()) / spec.q();
    CHECK(energy_limit(u, spec, 0.0).total ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("limit energy is monotone in eps and eps-close to the exact one") {
  auto mesh = build_rect_mesh(4, 4, 1.0, 1.0);
  const ProblemSpec spec(mesh, constant_weight(mesh, 0.5), 2.0, std::nullopt,
                         linear_boundary(*mesh));
  std::mt19937_64 rng(6);
  const double volume = spec.mesh().domain_volume();
  for (int trial = 0; trial < 10; ++trial) {
    const ScalarField u = ramped_random_field(mesh, rng);
    const double e0 = energy_limit(u, spec, 0.0).total;
    double prev = e0;
    for (double eps : {1e-4, 1e-2, 1e-1, 1.0}) {
      const double e = energy_limit(u, spec, eps).total;
      CHECK(e <= prev + 1e-14);  // non-increasing in eps
      CHECK(std::abs(e - e0) <= eps * volume + 1e-12);
      prev = e;
    }
  }
}

TEST_CASE("both energies are convex along segments with shared boundary data") {
  auto mesh = build_interval_mesh(24, 1.0);
  const ProblemSpec spec(mesh, constant_weight(mesh, 1.0), 2.0, 1.5, linear_boundary(*mesh),
                         1e-2);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    ScalarField u = ramped_random_field(mesh, rng);
    ScalarField v = ramped_random_field(mesh, rng);
    apply_boundary(u, spec);
    apply_boundary(v, spec);
    ScalarField mid(mesh);
    for (int n = 0; n < mesh->n_nodes(); ++n) mid.values[n] = 0.5 * (u.values[n] + v.values[n]);
    for (EnergyKind kind : {EnergyKind::DoublePhase, EnergyKind::SmoothedLimit}) {
      const double em = energy_of(mid, spec, kind);
      const double avg = 0.5 * (energy_of(u, spec, kind) + energy_of(v, spec, kind));
      CHECK(em <= avg + 1e-10);
    }
  }
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(9);

  auto mesh1 = build_interval_mesh(16, 1.0);
  const ProblemSpec spec1(mesh1, constant_weight(mesh1, 1.0), 2.0, 1.5, linear_boundary(*mesh1),
                          5e-2);
  auto mesh2 = build_rect_mesh(5, 5, 1.0, 1.0);
  std::vector<double> a2(mesh2->n_nodes());
  for (int n = 0; n < mesh2->n_nodes(); ++n) a2[n] = 0.5 + mesh2->nodes[n].x;
  const ProblemSpec spec2(mesh2, Weight(mesh2, a2), 1.4, 1.2, linear_boundary(*mesh2), 5e-2);

  for (int trial = 0; trial < 15; ++trial) {
    CHECK(grad_fd_relative_error(ramped_random_field(mesh1, rng), spec1,
                                 EnergyKind::DoublePhase) < 1e-5);
    CHECK(grad_fd_relative_error(ramped_random_field(mesh1, rng), spec1,
                                 EnergyKind::SmoothedLimit) < 1e-5);
    CHECK(grad_fd_relative_error(ramped_random_field(mesh2, rng), spec2,
                                 EnergyKind::DoublePhase) < 1e-5);
    CHECK(grad_fd_relative_error(ramped_random_field(mesh2, rng), spec2,
                                 EnergyKind::SmoothedLimit) < 1e-5);
  }
}

TEST_CASE("gradient of a linear field with constant weight telescopes to zero") {
  auto mesh = build_interval_mesh(32, 1.0);
  const ProblemSpec spec(mesh, constant_weight(mesh, 1.0), 2.0, 1.5, linear_boundary(*mesh));
  const ScalarField g = grad_energy(coordinate_field(mesh), spec, EnergyKind::DoublePhase);
  CHECK(free_max_norm(g, spec) < 1e-12);
}

TEST_CASE("gradient preconditions") {
  auto mesh = build_interval_mesh(8, 1.0);
  const ProblemSpec no_p(mesh, constant_weight(mesh, 1.0), 2.0, std::nullopt,
                         linear_boundary(*mesh), 0.0);
  const ScalarField u = coordinate_field(mesh);
  CHECK_THROWS_AS(grad_energy(u, no_p, EnergyKind::DoublePhase), std::invalid_argument);
  CHECK_THROWS_AS(grad_energy(u, no_p, EnergyKind::SmoothedLimit), std::invalid_argument);
  CHECK_NOTHROW(grad_energy(u, no_p.with_epsilon(1e-3), EnergyKind::SmoothedLimit));
}

TEST_CASE("hessian is symmetric, PSD, and matches differenced gradients") {
  auto mesh = build_rect_mesh(4, 4, 1.0, 1.0);
  std::vector<double> a(mesh->n_nodes());
  for (int n = 0; n < mesh->n_nodes(); ++n) a[n] = 0.3 + mesh->nodes[n].y;
  const ProblemSpec spec(mesh, Weight(mesh, a), 1.4, 1.2, linear_boundary(*mesh), 5e-2);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  for (EnergyKind kind : {EnergyKind::DoublePhase, EnergyKind::SmoothedLimit}) {
    for (int trial = 0; trial < 5; ++trial) {
      const ScalarField u = ramped_random_field(mesh, rng);
      const HessianResult hess = hess_energy(u, spec, kind);
      const Eigen::MatrixXd H = Eigen::MatrixXd(hess.matrix);
      CHECK((H - H.transpose()).cwiseAbs().maxCoeff() < 1e-12);

      Eigen::VectorXd v(spec.n_free());
      for (int i = 0; i < v.size(); ++i) v[i] = dist(rng);
      CHECK(v.dot(H * v) >= -1e-10);

      // directional finite difference of the gradient
      const double t = 1e-6;
      ScalarField up = u, dn = u;
      scatter_add_free(up, spec, v, t);
      scatter_add_free(dn, spec, v, -t);
      const Eigen::VectorXd fd =
          (gather_free(grad_energy(up, spec, kind), spec) -
           gather_free(grad_energy(dn, spec, kind), spec)) /
          (2.0 * t);
      const Eigen::VectorXd hv = H * v;
      const double rel = (hv - fd).cwiseAbs().maxCoeff() / std::max(1.0, fd.cwiseAbs().maxCoeff());
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("hessian floor flags degenerate cells for p < 2") {
  auto mesh = build_interval_mesh(8, 1.0);
  std::vector<double> h(2, 0.0);  // flat boundary data, u = 0 everywhere
  const ProblemSpec spec(mesh, constant_weight(mesh, 1.0), 2.0, 1.5, h);
  const HessianResult hess = hess_energy(ScalarField(mesh, 0.0), spec, EnergyKind::DoublePhase);
  CHECK(hess.floored_cells == mesh->n_cells());
  // still positive definite thanks to the floor
  const Eigen::MatrixXd H = Eigen::MatrixXd(hess.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("pinning boundary data is exact under trace") {
  auto mesh = build_rect_mesh(4, 3, 1.0, 1.0);
  const ProblemSpec spec(mesh, constant_weight(mesh, 1.0), 2.0, 1.5, linear_boundary(*mesh));
  const ScalarField u = pinned_field(spec, 123.0);
  const auto t = trace(u);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t[i].first == mesh->boundary_nodes[i]);
    CHECK(t[i].second == spec.boundary_values()[i]);
  }
  const ScalarField g = grad_energy(u, spec, EnergyKind::DoublePhase);
  for (int n : mesh->boundary_nodes) CHECK(g.values[n] == 0.0);
}

TEST_CASE("quadratic extension matches boundary data and solves p = q = 2") {
  auto mesh = build_rect_mesh(6, 6, 1.0, 1.0);
  const ProblemSpec spec(mesh, constant_weight(mesh, 1.0), 2.0, 1.5, linear_boundary(*mesh));
  const ScalarField u = quadratic_extension(spec);
  for (const auto& [node, value] : trace(u)) CHECK(value == mesh->nodes[node].x);
  // with linear data and constant weight the extension is the plane x
  for (int n = 0; n < mesh->n_nodes(); ++n) {
    CHECK(std::abs(u.values[n] - mesh->nodes[n].x) < 1e-12);
  }
}

}  // TEST_SUITE
