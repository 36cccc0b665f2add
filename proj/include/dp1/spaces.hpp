#pragma once

#include <memory>
#include <vector>

#include "dp1/mesh.hpp"

namespace dp1 {

/// Exponent pair (p, q) of the double-phase integrand t^p + a(x) t^q,
/// together with the space dimension. Construction enforces 1 < p < q and
/// the ratio condition q/p < 1 + 1/N.
class Exponents {
 public:
  Exponents(double p, double q, int dim);

  /// Skips the ordering and ratio checks. Only for internal fixtures such
  /// as the quadratic p = q = 2 problem used to seed solvers and tests.
  static Exponents unchecked(double p, double q, int dim);

  double p() const { return p_; }
  double q() const { return q_; }
  int dim() const { return dim_; }

 private:
  Exponents() = default;
  double p_ = 0.0, q_ = 0.0;
  int dim_ = 0;
};

/// Nonnegative weight a(.) sampled at mesh nodes. Integrands use the value
/// of the linear interpolant at cell midpoints, so every modular and energy
/// below sees the same per-cell weight.
class Weight {
 public:
  Weight() = default;  // empty placeholder; every public entry point rebinds it
  Weight(std::shared_ptr<const Mesh> mesh, std::vector<double> nodal);

  const std::vector<double>& nodal() const { return nodal_; }
  const std::vector<double>& cell() const { return cell_; }
  std::shared_ptr<const Mesh> mesh() const { return mesh_; }

  double max_value() const;
  /// Largest |a(n_i) - a(n_j)| / |n_i - n_j| over mesh edges; discrete
  /// surrogate for the Lipschitz seminorm.
  double lipschitz_ratio() const;
  /// True when a > 0 at every boundary node.
  bool positive_on_boundary() const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<double> nodal_;
  std::vector<double> cell_;
};

/// rho(u) = integral of |u|^p + a(x)|u|^q. Scalar fields are evaluated at
/// cell midpoints; vector fields are cell-wise constant, so the sum is exact.
double modular_theta_p(const ScalarField& u, const Weight& w, const Exponents& e);
double modular_theta_p(const VectorField& g, const Weight& w, const Exponents& e);

/// inf{lambda > 0 : rho(u/lambda) <= 1}, located by bracketing + bisection
/// on the strictly decreasing map lambda -> rho(u/lambda). Zero fields give 0.
double luxemburg_norm(const ScalarField& u, const Weight& w, const Exponents& e);
double luxemburg_norm(const VectorField& g, const Weight& w, const Exponents& e);

/// (integral of a(x)|g|^q)^(1/q); the q-phase may ignore regions where a = 0.
double weighted_lq_norm(const VectorField& g, const Weight& w, double q);
double weighted_lq_norm(const ScalarField& u, const Weight& w, double q);

/// Integral of |grad u|; exact for piecewise-linear fields.
double total_variation(const ScalarField& u);

/// Max over dyadic subcubes of the domain, down to the given depth, of
/// (avg a) * (avg a^(-1/(q-1)))^(q-1) with volume-weighted cell-midpoint
/// averages. Lower bound for the Muckenhoupt A_q constant. Returns +inf
/// when the weight vanishes on some cell.
double muckenhoupt_aq_estimate(const Weight& w, double q, int depth);

}  // namespace dp1
