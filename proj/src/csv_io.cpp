#include "dp1/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dp1 {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> parts;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& s, const std::string& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ": malformed number '" + s + "'");
  }
}

}  // namespace

void write_nodes_csv(const Mesh& mesh, const std::string& path) {
  auto out = open_out(path);
  out << (mesh.dim == 1 ? "id,x\n" : "id,x,y\n");
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    out << n << ',' << format_double(mesh.nodes[n].x);
    if (mesh.dim == 2) out << ',' << format_double(mesh.nodes[n].y);
    out << '\n';
  }
}

void write_cells_csv(const Mesh& mesh, const std::string& path) {
  auto out = open_out(path);
  out << (mesh.dim == 1 ? "cell,n0,n1\n" : "cell,n0,n1,n2\n");
  for (int c = 0; c < mesh.n_cells(); ++c) {
    out << c << ',' << mesh.cells[c][0] << ',' << mesh.cells[c][1];
    if (mesh.dim == 2) out << ',' << mesh.cells[c][2];
    out << '\n';
  }
}

void write_field_csv(const ScalarField& u, const std::string& path) {
  auto out = open_out(path);
  out << "node,value\n";
  for (int n = 0; n < u.mesh->n_nodes(); ++n) {
    out << n << ',' << format_double(u.values[n]) << '\n';
  }
}

void write_vfield_csv(const VectorField& v, const std::string& path) {
  auto out = open_out(path);
  out << (v.mesh->dim == 1 ? "cell,c0\n" : "cell,c0,c1\n");
  for (int c = 0; c < v.mesh->n_cells(); ++c) {
    out << c << ',' << format_double(v.values[c].x);
    if (v.mesh->dim == 2) out << ',' << format_double(v.values[c].y);
    out << '\n';
  }
}

ScalarField read_field_csv(std::shared_ptr<const Mesh> mesh, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  std::vector<double> values(mesh->n_nodes());
  std::vector<char> seen(mesh->n_nodes(), 0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split_line(line);
    if (parts.size() != 2) throw std::runtime_error(path + ": expected 'node,value' rows");
    const int n = static_cast<int>(parse_double(parts[0], path));
    if (n < 0 || n >= mesh->n_nodes()) throw std::runtime_error(path + ": node id out of range");
    values[n] = parse_double(parts[1], path);
    seen[n] = 1;
  }
  for (int n = 0; n < mesh->n_nodes(); ++n) {
    if (!seen[n]) throw std::runtime_error(path + ": missing value for node " + std::to_string(n));
  }
  return ScalarField(std::move(mesh), std::move(values));
}

VectorField read_vfield_csv(std::shared_ptr<const Mesh> mesh, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const int dim = mesh->dim;
  std::vector<Vec2> values(mesh->n_cells());
  std::vector<char> seen(mesh->n_cells(), 0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split_line(line);
    if (static_cast<int>(parts.size()) != 1 + dim) {
      throw std::runtime_error(path + ": wrong component count for a " + std::to_string(dim) +
                               "D field");
    }
    const int c = static_cast<int>(parse_double(parts[0], path));
    if (c < 0 || c >= mesh->n_cells()) throw std::runtime_error(path + ": cell id out of range");
    values[c].x = parse_double(parts[1], path);
    if (dim == 2) values[c].y = parse_double(parts[2], path);
    seen[c] = 1;
  }
  for (int c = 0; c < mesh->n_cells(); ++c) {
    if (!seen[c]) throw std::runtime_error(path + ": missing value for cell " + std::to_string(c));
  }
  return VectorField(std::move(mesh), std::move(values));
}

void write_oracle_csv(const OracleSolution& sol, const std::vector<double>& query_points,
                      const std::string& path) {
  auto out = open_out(path);
  out << "x,u,uprime,z\n";
  for (double x : query_points) {
    out << format_double(x) << ',' << format_double(sol.u(x)) << ','
        << format_double(sol.uprime(x)) << ',' << format_double(sol.z(x)) << '\n';
  }
}

}  // namespace dp1
