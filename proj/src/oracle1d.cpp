#include "dp1/oracle1d.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dp1 {

namespace {

struct SimpsonGrid {
  std::vector<double> x;
  std::vector<double> w;
};

SimpsonGrid simpson_grid(double length, int quad_n) {
  if (quad_n < 2 || quad_n % 2 != 0) {
    throw std::invalid_argument("oracle1d: quad_n must be even and >= 2");
  }
  SimpsonGrid g;
  g.x.resize(quad_n + 1);
  g.w.resize(quad_n + 1);
  const double h = length / quad_n;
  for (int j = 0; j <= quad_n; ++j) {
    g.x[j] = (j == quad_n) ? length : j * h;
    double c = (j == 0 || j == quad_n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    g.w[j] = c * h / 3.0;
  }
  return g;
}

// Inner root of s^(p-1) + a s^(q-1) = c on s >= 0 (strictly increasing map).
double pq_pointwise_root(double a, double p, double q, double c) {
  if (c <= 0.0) return 0.0;
  auto f = [&](double s) { return std::pow(s, p - 1.0) + a * std::pow(s, q - 1.0); };
  double hi = 1.0;
  for (int i = 0; i < 200 && f(hi) < c; ++i) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < c) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

// Cumulative per-panel Simpson of s over the grid: values at even nodes.
std::vector<double> cumulative_simpson(const SimpsonGrid& grid, const std::vector<double>& s) {
  const int n = static_cast<int>(grid.x.size()) - 1;
  std::vector<double> cum(n / 2 + 1, 0.0);
  const double h = grid.x[1] - grid.x[0];
  for (int panel = 0; panel < n / 2; ++panel) {
    const int j = 2 * panel;
    cum[panel + 1] = cum[panel] + h / 3.0 * (s[j] + 4.0 * s[j + 1] + s[j + 2]);
  }
  return cum;
}

}  // namespace

double OracleSolution::u(double x) const {
  if (constant_data_) return h0_;
  const int m = static_cast<int>(tab_u_.size()) - 1;
  const double dx = length_ / m;
  double t = x / dx;
  if (t <= 0.0) return h0_ + sign_ * tab_u_.front();
  if (t >= m) return h0_ + sign_ * tab_u_.back();
  const int j = static_cast<int>(t);
  const double frac = t - j;
  return h0_ + sign_ * ((1.0 - frac) * tab_u_[j] + frac * tab_u_[j + 1]);
}

double OracleSolution::uprime(double x) const {
  if (constant_data_) return 0.0;
  const double a = a_(x);
  double s;
  if (limit_problem_) {
    s = std::pow((flux_c_ - 1.0) / a, 1.0 / (q_ - 1.0));
  } else {
    s = pq_pointwise_root(a, p_, q_, flux_c_);
  }
  return sign_ * s;
}

double OracleSolution::z(double x) const {
  if (!limit_problem_ || constant_data_) return 0.0;
  return uprime(x) != 0.0 ? static_cast<double>(sign_) : 0.0;
}

OracleSolution oracle_limit_1d(std::function<double(double)> a, double q, double h0, double h1,
                               double length, int quad_n) {
  if (!(q > 1.0)) throw std::invalid_argument("oracle_limit_1d: q must be > 1");
  if (!(length > 0.0)) throw std::invalid_argument("oracle_limit_1d: length must be positive");
  if (!std::isfinite(h0) || !std::isfinite(h1)) {
    throw std::invalid_argument("oracle_limit_1d: boundary data must be finite");
  }

  OracleSolution sol;
  sol.limit_problem_ = true;
  sol.length_ = length;
  sol.h0_ = h0;
  sol.q_ = q;
  sol.a_ = a;

  const double gap = std::abs(h1 - h0);
  if (gap == 0.0) {
    sol.constant_data_ = true;
    sol.flux_c_ = std::numeric_limits<double>::quiet_NaN();
    return sol;
  }
  sol.sign_ = (h1 > h0) ? 1 : -1;

  const SimpsonGrid grid = simpson_grid(length, quad_n);
  std::vector<double> aval(grid.x.size());
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    aval[j] = a(grid.x[j]);
    if (!(aval[j] > 0.0)) {
      throw std::domain_error(
          "oracle_limit_1d: weight vanishes inside the interval; the bridging integral "
          "diverges and the boundary gap cannot be met (infeasible at tolerance)");
    }
  }

  const double inv_exp = 1.0 / (q - 1.0);
  auto bridge = [&](double c) {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.x.size(); ++j) {
      s += grid.w[j] * std::pow((c - 1.0) / aval[j], inv_exp);
    }
    return s;
  };

  double lo = 1.0 + 1e-14;
  double hi = 2.0;
  int doublings = 0;
  while (bridge(hi) < gap) {
    hi = 1.0 + 2.0 * (hi - 1.0);
    if (++doublings > 200) {
      throw std::domain_error("oracle_limit_1d: could not bracket the flux constant");
    }
  }
  if (bridge(lo) > gap) hi = lo;  // degenerate: gap met arbitrarily close to 1
  double c = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    c = 0.5 * (lo + hi);
    const double b = bridge(c);
    if (std::abs(b - gap) <= 1e-12 * std::max(1.0, gap)) break;
    if (b < gap) {
      lo = c;
    } else {
      hi = c;
    }
    if (hi - lo <= 1e-16 * c) break;
  }
  sol.flux_c_ = c;

  std::vector<double> s(grid.x.size());
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    s[j] = std::pow((c - 1.0) / aval[j], inv_exp);
  }
  sol.tab_u_ = cumulative_simpson(grid, s);

  double energy = 0.0;
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    energy += grid.w[j] * (s[j] + aval[j] * std::pow(s[j], q) / q);
  }
  sol.energy_ = energy;
  return sol;
}

OracleSolution oracle_pq_1d(std::function<double(double)> a, double p, double q, double h0,
                            double h1, double length, int quad_n) {
  if (!(1.0 < p) || !(p < q)) throw std::invalid_argument("oracle_pq_1d: need 1 < p < q");
  if (!(length > 0.0)) throw std::invalid_argument("oracle_pq_1d: length must be positive");
  if (!std::isfinite(h0) || !std::isfinite(h1)) {
    throw std::invalid_argument("oracle_pq_1d: boundary data must be finite");
  }

  OracleSolution sol;
  sol.length_ = length;
  sol.h0_ = h0;
  sol.p_ = p;
  sol.q_ = q;
  sol.a_ = a;

  const double gap = std::abs(h1 - h0);
  if (gap == 0.0) {
    sol.constant_data_ = true;
    sol.flux_c_ = 0.0;
    return sol;
  }
  sol.sign_ = (h1 > h0) ? 1 : -1;

  const SimpsonGrid grid = simpson_grid(length, quad_n);
  std::vector<double> aval(grid.x.size());
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    aval[j] = a(grid.x[j]);
    if (!(aval[j] >= 0.0)) throw std::invalid_argument("oracle_pq_1d: weight must be >= 0");
  }

  std::vector<double> s(grid.x.size());
  auto bridge = [&](double c) {
    double total = 0.0;
    for (std::size_t j = 0; j < grid.x.size(); ++j) {
      s[j] = pq_pointwise_root(aval[j], p, q, c);
      total += grid.w[j] * s[j];
    }
    return total;
  };

  double lo = 0.0, hi = 1.0;
  int doublings = 0;
  while (bridge(hi) < gap) {
    hi *= 2.0;
    if (++doublings > 200) {
      throw std::domain_error("oracle_pq_1d: could not bracket the flux constant");
    }
  }
  double c = hi;
  for (int i = 0; i < 200; ++i) {
    c = 0.5 * (lo + hi);
    const double b = bridge(c);
    if (std::abs(b - gap) <= 1e-12 * std::max(1.0, gap)) break;
    if (b < gap) {
      lo = c;
    } else {
      hi = c;
    }
    if (hi - lo <= 1e-16 * std::max(1.0, c)) break;
  }
  sol.flux_c_ = c;

  bridge(c);  // refresh s at the accepted flux
  sol.tab_u_ = cumulative_simpson(grid, s);

  double energy = 0.0;
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    energy += grid.w[j] * (std::pow(s[j], p) / p + aval[j] * std::pow(s[j], q) / q);
  }
  sol.energy_ = energy;
  return sol;
}

}  // namespace dp1
