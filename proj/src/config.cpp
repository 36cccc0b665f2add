#include "dp1/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace dp1 {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(line, "expected a real number, got '" + v + "'");
  }
}

int to_int(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(x);
  } catch (const std::exception&) {
    throw ConfigError(line, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(line, "expected a nonnegative integer, got '" + v + "'");
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  bool seen_dim = false, seen_q = false, seen_weight = false, seen_boundary = false;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "domain" && section != "weight" && section != "exponents" &&
          section != "boundary" && section != "solver" && section != "output") {
        throw ConfigError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(line_no, "expected 'key = value'");
    if (section.empty()) throw ConfigError(line_no, "key '" + key + "' outside any section");

    if (section == "domain") {
      if (key == "dim") {
        cfg.dim = to_int(value, line_no);
        seen_dim = true;
      } else if (key == "cells") {
        cfg.cells = to_int(value, line_no);
      } else if (key == "length") {
        cfg.length = to_double(value, line_no);
      } else if (key == "nx") {
        cfg.nx = to_int(value, line_no);
      } else if (key == "ny") {
        cfg.ny = to_int(value, line_no);
      } else if (key == "lx") {
        cfg.lx = to_double(value, line_no);
      } else if (key == "ly") {
        cfg.ly = to_double(value, line_no);
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [domain]");
      }
    } else if (section == "weight") {
      if (key == "family") {
        cfg.weight_family = value;
        seen_weight = true;
      } else if (key == "value") {
        cfg.weight_value = to_double(value, line_no);
      } else if (key == "slope") {
        cfg.weight_slope = to_double(value, line_no);
      } else if (key == "slope_x") {
        cfg.weight_slope_x = to_double(value, line_no);
      } else if (key == "slope_y") {
        cfg.weight_slope_y = to_double(value, line_no);
      } else if (key == "offset") {
        cfg.weight_offset = to_double(value, line_no);
      } else if (key == "scale") {
        cfg.weight_scale = to_double(value, line_no);
      } else if (key == "amplitude") {
        cfg.weight_amplitude = to_double(value, line_no);
      } else if (key == "width") {
        cfg.weight_width = to_double(value, line_no);
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [weight]");
      }
    } else if (section == "exponents") {
      if (key == "q") {
        cfg.q = to_double(value, line_no);
        seen_q = true;
      } else if (key == "p") {
        cfg.p = to_double(value, line_no);
      } else if (key == "p_start") {
        cfg.p_start = to_double(value, line_no);
      } else if (key == "ratio") {
        cfg.ratio = to_double(value, line_no);
      } else if (key == "steps") {
        cfg.steps = to_int(value, line_no);
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [exponents]");
      }
    } else if (section == "boundary") {
      if (key == "family") {
        cfg.boundary_family = value;
        seen_boundary = true;
      } else if (key == "value") {
        cfg.boundary_value = to_double(value, line_no);
      } else if (key == "left") {
        cfg.boundary_left = to_double(value, line_no);
      } else if (key == "right") {
        cfg.boundary_right = to_double(value, line_no);
      } else if (key == "g0") {
        cfg.boundary_g0 = to_double(value, line_no);
      } else if (key == "gx") {
        cfg.boundary_gx = to_double(value, line_no);
      } else if (key == "gy") {
        cfg.boundary_gy = to_double(value, line_no);
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [boundary]");
      }
    } else if (section == "solver") {
      if (key == "tol") {
        cfg.tol = to_double(value, line_no);
      } else if (key == "max_iter") {
        cfg.max_iter = to_int(value, line_no);
      } else if (key == "limit_tol") {
        cfg.limit_tol = to_double(value, line_no);
      } else if (key == "eps_start") {
        cfg.eps_start = to_double(value, line_no);
      } else if (key == "eps_end") {
        cfg.eps_end = to_double(value, line_no);
      } else if (key == "eps_factor") {
        cfg.eps_factor = to_double(value, line_no);
      } else if (key == "theta_res") {
        cfg.theta_res = to_double(value, line_no);
      } else if (key == "theta_z") {
        cfg.theta_z = to_double(value, line_no);
      } else if (key == "theta_align") {
        cfg.theta_align = to_double(value, line_no);
      } else if (key == "activity") {
        cfg.activity = to_double(value, line_no);
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [solver]");
      }
    } else if (section == "output") {
      if (key == "dir") {
        cfg.out_dir = value;
      } else if (key == "seed") {
        cfg.seed = to_u64(value, line_no);
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [output]");
      }
    }
  }

  if (!seen_dim) throw ConfigError(0, "[domain] dim is required");
  if (cfg.dim != 1 && cfg.dim != 2) throw ConfigError(0, "[domain] dim must be 1 or 2");
  if (cfg.dim == 1 && cfg.cells < 1) throw ConfigError(0, "[domain] cells must be >= 1");
  if (cfg.dim == 2 && (cfg.nx < 1 || cfg.ny < 1)) {
    throw ConfigError(0, "[domain] nx and ny must be >= 1");
  }
  if (!seen_q) throw ConfigError(0, "[exponents] q is required");
  if (!seen_weight) throw ConfigError(0, "[weight] family is required");
  if (!seen_boundary) throw ConfigError(0, "[boundary] family is required");
  if (cfg.weight_family != "constant" && cfg.weight_family != "affine" &&
      cfg.weight_family != "radial" && cfg.weight_family != "degenerate_interior") {
    throw ConfigError(0, "unknown weight family '" + cfg.weight_family + "'");
  }
  if (cfg.boundary_family != "linear" && cfg.boundary_family != "constant" &&
      cfg.boundary_family != "custom") {
    throw ConfigError(0, "unknown boundary family '" + cfg.boundary_family + "'");
  }
  if (cfg.boundary_family == "custom" && cfg.dim != 1) {
    throw ConfigError(0, "boundary family 'custom' is 1D-only");
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::shared_ptr<const Mesh> RunConfig::build_mesh() const {
  if (dim == 1) return build_interval_mesh(cells, length);
  return build_rect_mesh(nx, ny, lx, ly);
}

namespace {

double eval_weight(const RunConfig& cfg, const Vec2& pt) {
  if (cfg.weight_family == "constant") return cfg.weight_value;
  if (cfg.weight_family == "affine") {
    if (cfg.dim == 1) return cfg.weight_slope * pt.x + cfg.weight_offset;
    return cfg.weight_slope_x * pt.x + cfg.weight_slope_y * pt.y + cfg.weight_offset;
  }
  if (cfg.weight_family == "radial") {
    const double cx = (cfg.dim == 1 ? cfg.length : cfg.lx) / 2.0;
    const double cy = cfg.dim == 2 ? cfg.ly / 2.0 : 0.0;
    const double r2 = (pt.x - cx) * (pt.x - cx) + (pt.y - cy) * (pt.y - cy);
    return cfg.weight_offset + cfg.weight_scale * r2;
  }
  // degenerate_interior: amplitude on the boundary, ramping linearly to 0
  // at distance `width` from it, zero further inside.
  double d;
  if (cfg.dim == 1) {
    d = std::min(pt.x, cfg.length - pt.x);
  } else {
    d = std::min(std::min(pt.x, cfg.lx - pt.x), std::min(pt.y, cfg.ly - pt.y));
  }
  return cfg.weight_amplitude * std::max(0.0, (cfg.weight_width - d) / cfg.weight_width);
}

double eval_boundary(const RunConfig& cfg, const Vec2& pt, double domain_length) {
  if (cfg.boundary_family == "constant") return cfg.boundary_value;
  if (cfg.boundary_family == "linear") {
    return cfg.boundary_g0 + cfg.boundary_gx * pt.x + cfg.boundary_gy * pt.y;
  }
  // custom: endpoint values on (0, L)
  return pt.x <= 0.0 ? cfg.boundary_left
                     : (pt.x >= domain_length ? cfg.boundary_right : cfg.boundary_left);
}

}  // namespace

Weight RunConfig::build_weight(std::shared_ptr<const Mesh> mesh) const {
  std::vector<double> nodal(mesh->n_nodes());
  for (int n = 0; n < mesh->n_nodes(); ++n) nodal[n] = eval_weight(*this, mesh->nodes[n]);
  return Weight(std::move(mesh), std::move(nodal));
}

std::vector<double> RunConfig::build_boundary_values(const Mesh& mesh) const {
  std::vector<double> out;
  out.reserve(mesh.boundary_nodes.size());
  const double L = dim == 1 ? length : lx;
  for (int n : mesh.boundary_nodes) out.push_back(eval_boundary(*this, mesh.nodes[n], L));
  return out;
}

std::function<double(double)> RunConfig::weight_callable_1d() const {
  if (dim != 1) throw ConfigError(0, "weight_callable_1d: 1D domains only");
  RunConfig cfg = *this;
  return [cfg](double x) { return eval_weight(cfg, Vec2{x, 0.0}); };
}

std::pair<double, double> RunConfig::boundary_endpoints_1d() const {
  if (dim != 1) throw ConfigError(0, "boundary_endpoints_1d: 1D domains only");
  const double h0 = eval_boundary(*this, Vec2{0.0, 0.0}, length);
  const double h1 = eval_boundary(*this, Vec2{length, 0.0}, length);
  return {h0, h1};
}

ProblemSpec RunConfig::build_spec(bool use_p) const {
  auto mesh = build_mesh();
  Weight w = build_weight(mesh);
  std::vector<double> h = build_boundary_values(*mesh);
  std::optional<double> pp;
  if (use_p) {
    if (!p) throw ConfigError(0, "[exponents] p is required for this command");
    pp = p;
  }
  try {
    return ProblemSpec(std::move(mesh), std::move(w), q, pp, std::move(h), eps_end);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
}

std::vector<double> RunConfig::build_eps_schedule() const {
  if (!(eps_start > 0.0) || !(eps_end > 0.0) || !(eps_end <= eps_start)) {
    throw ConfigError(0, "[solver] need eps_start >= eps_end > 0");
  }
  if (!(eps_factor > 0.0) || !(eps_factor < 1.0)) {
    throw ConfigError(0, "[solver] eps_factor must lie in (0, 1)");
  }
  std::vector<double> sched;
  for (double e = eps_start; e > eps_end * (1.0 + 1e-12); e *= eps_factor) sched.push_back(e);
  sched.push_back(eps_end);
  return sched;
}

CertificateThresholds RunConfig::build_thresholds(const Mesh& mesh) const {
  CertificateThresholds t = CertificateThresholds::defaults_for(mesh);
  if (theta_res) t.residual = *theta_res;
  if (theta_z) t.z_excess = *theta_z;
  if (theta_align) t.alignment = *theta_align;
  t.activity_factor = activity;
  return t;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["domain"]["dim"] = dim;
  if (dim == 1) {
    j["domain"]["cells"] = cells;
    j["domain"]["length"] = length;
  } else {
    j["domain"]["nx"] = nx;
    j["domain"]["ny"] = ny;
    j["domain"]["lx"] = lx;
    j["domain"]["ly"] = ly;
  }
  auto& w = j["weight"];
  w["family"] = weight_family;
  if (weight_family == "constant") {
    w["value"] = weight_value;
  } else if (weight_family == "affine") {
    if (dim == 1) {
      w["slope"] = weight_slope;
    } else {
      w["slope_x"] = weight_slope_x;
      w["slope_y"] = weight_slope_y;
    }
    w["offset"] = weight_offset;
  } else if (weight_family == "radial") {
    w["offset"] = weight_offset;
    w["scale"] = weight_scale;
  } else {
    w["amplitude"] = weight_amplitude;
    w["width"] = weight_width;
  }
  auto& e = j["exponents"];
  e["q"] = q;
  if (p) e["p"] = *p;
  if (p_start) {
    e["p_start"] = *p_start;
    e["ratio"] = ratio;
    e["steps"] = steps;
  }
  auto& b = j["boundary"];
  b["family"] = boundary_family;
  if (boundary_family == "constant") {
    b["value"] = boundary_value;
  } else if (boundary_family == "custom") {
    b["left"] = boundary_left;
    b["right"] = boundary_right;
  } else {
    b["g0"] = boundary_g0;
    b["gx"] = boundary_gx;
    b["gy"] = boundary_gy;
  }
  auto& s = j["solver"];
  s["tol"] = tol;
  s["max_iter"] = max_iter;
  s["limit_tol"] = limit_tol;
  s["eps_start"] = eps_start;
  s["eps_end"] = eps_end;
  s["eps_factor"] = eps_factor;
  if (theta_res) s["theta_res"] = *theta_res;
  if (theta_z) s["theta_z"] = *theta_z;
  if (theta_align) s["theta_align"] = *theta_align;
  s["activity"] = activity;
  j["output"]["seed"] = seed;
  return j;
}

}  // namespace dp1
