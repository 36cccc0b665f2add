#pragma once

#include <functional>
#include <vector>

namespace dp1 {

/// Semi-analytic ground truth for the 1D problems on (0, L), built on the
/// constant-flux reduction: the Euler-Lagrange equation forces the total
/// flux to be a spatial constant c, so the whole problem collapses to one
/// scalar root-find plus quadrature. Everything here is independent of the
/// finite element machinery (bisection and composite Simpson only).
class OracleSolution {
 public:
  double flux() const { return flux_c_; }
  double energy() const { return energy_; }
  bool constant_data() const { return constant_data_; }

  /// Value at any x in [0, L], from the tabulated cumulative integral.
  double u(double x) const;
  /// Derivative at any x, from the per-point constant-flux formula.
  double uprime(double x) const;
  /// Certificate field of the limit problem: sign(u') where u' != 0, else 0.
  /// Zero for the p,q oracle, where no such field is defined.
  double z(double x) const;

 private:
  friend OracleSolution oracle_limit_1d(std::function<double(double)> a, double q, double h0,
                                        double h1, double length, int quad_n);
  friend OracleSolution oracle_pq_1d(std::function<double(double)> a, double p, double q,
                                     double h0, double h1, double length, int quad_n);

  double flux_c_ = 0.0;
  double energy_ = 0.0;
  bool constant_data_ = false;
  bool limit_problem_ = false;
  int sign_ = 0;
  double length_ = 0.0;
  double h0_ = 0.0;
  double q_ = 0.0, p_ = 0.0;
  std::function<double(double)> a_;
  std::vector<double> tab_u_;  // cumulative values on a uniform grid
};

/// Limit problem: finds c > 1 with integral of ((c-1)/a)^(1/(q-1)) equal to
/// |h1 - h0| (monotone bisection, composite Simpson with quad_n
/// subintervals). Requires a > 0 along the interval when h1 != h0; reports
/// an infeasible bridging integral as std::domain_error.
OracleSolution oracle_limit_1d(std::function<double(double)> a, double q, double h0, double h1,
                               double length, int quad_n = 4096);

/// p,q problem: outer bisection on the flux c >= 0 with an inner per-point
/// root-find of s^(p-1) + a(x) s^(q-1) = c for s = |u'|.
OracleSolution oracle_pq_1d(std::function<double(double)> a, double p, double q, double h0,
                            double h1, double length, int quad_n = 4096);

}  // namespace dp1
