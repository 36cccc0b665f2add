#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "dp1/energy.hpp"
#include "dp1/limit_solver.hpp"

#include "json.hpp"

namespace dp1 {

/// Configuration problem with the offending line number; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : "") + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

/// Flat sectioned key-value run description. Weight and boundary data come
/// from named parameterized families so the hypothesis checks stay
/// decidable; unknown sections or keys are hard errors.
struct RunConfig {
  // [domain]
  int dim = 0;
  int cells = 0;          // 1D
  double length = 1.0;    // 1D
  int nx = 0, ny = 0;     // 2D
  double lx = 1.0, ly = 1.0;

  // [weight]  families: constant, affine, radial, degenerate_interior
  std::string weight_family;
  double weight_value = 1.0;                   // constant
  double weight_slope = 1.0;                   // affine 1D
  double weight_slope_x = 1.0, weight_slope_y = 0.0;  // affine 2D
  double weight_offset = 0.0;                  // affine / radial
  double weight_scale = 1.0;                   // radial: offset + scale * r^2
  double weight_amplitude = 1.0;               // degenerate_interior
  double weight_width = 0.25;                  // degenerate_interior margin width

  // [exponents]
  double q = 0.0;
  std::optional<double> p;
  std::optional<double> p_start;  // continuation schedule
  double ratio = 0.5;
  int steps = 12;

  // [boundary]  families: linear, constant, custom (1D endpoints)
  std::string boundary_family;
  double boundary_value = 0.0;          // constant
  double boundary_left = 0.0, boundary_right = 1.0;  // custom
  double boundary_g0 = 0.0, boundary_gx = 1.0, boundary_gy = 0.0;  // linear

  // [solver]
  double tol = 1e-9;
  int max_iter = 200;
  double limit_tol = 1e-10;
  double eps_start = 1e-1;
  double eps_end = 1e-6;
  double eps_factor = 0.1;
  std::optional<double> theta_res;
  std::optional<double> theta_z;
  std::optional<double> theta_align;
  double activity = 1e-8;

  // [output]
  std::string out_dir;
  std::uint64_t seed = 0;

  std::shared_ptr<const Mesh> build_mesh() const;
  Weight build_weight(std::shared_ptr<const Mesh> mesh) const;
  std::vector<double> build_boundary_values(const Mesh& mesh) const;
  /// Weight as a callable on (0, L); 1D only, used by the oracle.
  std::function<double(double)> weight_callable_1d() const;
  /// Boundary endpoint values for the 1D oracle.
  std::pair<double, double> boundary_endpoints_1d() const;

  /// Assembles the problem; pass use_p = false to drop p (limit problem).
  ProblemSpec build_spec(bool use_p) const;
  std::vector<double> build_eps_schedule() const;
  CertificateThresholds build_thresholds(const Mesh& mesh) const;

  /// Full resolved configuration, embedded in every JSON report.
  nlohmann::json to_json() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace dp1
