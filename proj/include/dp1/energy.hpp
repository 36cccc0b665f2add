#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <optional>
#include <vector>

#include "dp1/mesh.hpp"
#include "dp1/spaces.hpp"

namespace dp1 {

/// Full description of one Dirichlet problem: mesh, weight a, exponent q,
/// optionally the lower exponent p (absent for the limit problem), nodal
/// boundary data aligned with mesh.boundary_nodes, and the smoothing
/// parameter used by the limit energy. Construction enforces admissibility:
/// a > 0 on the boundary always, and q/p < 1 + 1/N whenever p is set.
class ProblemSpec {
 public:
  ProblemSpec(std::shared_ptr<const Mesh> mesh, Weight weight, double q, std::optional<double> p,
              std::vector<double> boundary_values, double epsilon = 0.0);

  /// Skips the admissibility clauses; internal fixtures only (e.g. p = q = 2).
  static ProblemSpec unchecked(std::shared_ptr<const Mesh> mesh, Weight weight, double q,
                               std::optional<double> p, std::vector<double> boundary_values,
                               double epsilon = 0.0);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const Weight& weight() const { return weight_; }
  double q() const { return q_; }
  const std::optional<double>& p() const { return p_; }
  double epsilon() const { return epsilon_; }
  const std::vector<double>& boundary_values() const { return boundary_values_; }

  ProblemSpec with_p(double p) const;
  ProblemSpec with_epsilon(double eps) const;

  const std::vector<int>& free_nodes() const { return free_nodes_; }
  int free_index(int node) const { return free_index_[node]; }
  int n_free() const { return static_cast<int>(free_nodes_.size()); }

 private:
  ProblemSpec() = default;
  void finish(bool checked);

  std::shared_ptr<const Mesh> mesh_;
  Weight weight_;
  double q_ = 0.0;
  std::optional<double> p_;
  std::vector<double> boundary_values_;
  double epsilon_ = 0.0;
  std::vector<int> free_nodes_;
  std::vector<int> free_index_;
};

/// Which convex energy an operation refers to: the double-phase integrand
/// |g|^p/p + a|g|^q/q, or the smoothed limit integrand phi_eps(|g|) + a|g|^q/q
/// with phi_eps(t) = sqrt(t^2 + eps^2) - eps.
enum class EnergyKind { DoublePhase, SmoothedLimit };

struct EnergyReport {
  double total = 0.0;
  double principal = 0.0;  // p-power term, or the (smoothed) total-variation term
  double weighted = 0.0;   // a(x) |g|^q / q term
};

EnergyReport energy_double_phase(const ScalarField& u, const ProblemSpec& spec);
EnergyReport energy_limit(const ScalarField& u, const ProblemSpec& spec, double eps);
inline EnergyReport energy_limit(const ScalarField& u, const ProblemSpec& spec) {
  return energy_limit(u, spec, spec.epsilon());
}

/// Derivative of the discrete energy with respect to nodal values. Boundary
/// nodes are pinned, so their entries are reported as zero. SmoothedLimit
/// requires epsilon > 0.
ScalarField grad_energy(const ScalarField& u, const ProblemSpec& spec, EnergyKind kind);

struct HessianResult {
  Eigen::SparseMatrix<double> matrix;  // free-node ordering (ascending node id)
  int floored_cells = 0;               // cells where the |g| floor kicked in
};

/// Second derivative on the free nodes, symmetric positive semidefinite.
/// Cells with |g| below the floor use a floored |g| inside the power-law
/// second-derivative formulas only, never in energies or gradients.
HessianResult hess_energy(const ScalarField& u, const ProblemSpec& spec, EnergyKind kind);

/// Floor applied to |g| inside second-derivative formulas.
inline constexpr double kHessianFloor = 1e-10;

/// Field equal to the boundary data on boundary nodes and `interior` elsewhere.
ScalarField pinned_field(const ProblemSpec& spec, double interior = 0.0);
/// Overwrites boundary entries with the spec's boundary data.
void apply_boundary(ScalarField& u, const ProblemSpec& spec);
/// Solution of the quadratic p = q = 2 problem with the spec's boundary data:
/// the default starting point for all nonlinear solves.
ScalarField quadratic_extension(const ProblemSpec& spec);

double free_max_norm(const ScalarField& g, const ProblemSpec& spec);
Eigen::VectorXd gather_free(const ScalarField& g, const ProblemSpec& spec);
void scatter_add_free(ScalarField& u, const ProblemSpec& spec, const Eigen::VectorXd& delta,
                      double step = 1.0);

}  // namespace dp1
