#pragma once

#include <memory>
#include <string>

#include "dp1/mesh.hpp"
#include "dp1/oracle1d.hpp"

namespace dp1 {

/// Shortest exact decimal form of a double ("%.17g"); every writer below
/// uses it so repeated runs produce byte-identical artifacts.
std::string format_double(double v);

void write_nodes_csv(const Mesh& mesh, const std::string& path);
void write_cells_csv(const Mesh& mesh, const std::string& path);
void write_field_csv(const ScalarField& u, const std::string& path);
void write_vfield_csv(const VectorField& v, const std::string& path);

ScalarField read_field_csv(std::shared_ptr<const Mesh> mesh, const std::string& path);
VectorField read_vfield_csv(std::shared_ptr<const Mesh> mesh, const std::string& path);

/// x, u(x), u'(x), z(x) at the given query points.
void write_oracle_csv(const OracleSolution& sol, const std::vector<double>& query_points,
                      const std::string& path);

}  // namespace dp1
