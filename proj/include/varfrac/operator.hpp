#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "varfrac/geometry.hpp"

namespace varfrac {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct FracParams {
  double s = 0.5;
  int dim = 1;

  FracParams() = default;
  FracParams(double s_, int dim_);
  double exponent() const { return dim + 2.0 * s; }
};

/// Nodal samples over every grid node; non-interior entries are Dirichlet data (0).
struct GridFunction {
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(std::vector<double> v) : values(std::move(v)) {}
  static GridFunction zeros(const Grid& grid) { return GridFunction(std::vector<double>(grid.size(), 0.0)); }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(values.size()); }
};

struct CoefficientProfile {
  enum class Kind { killing, kinetic, synthetic, custom };

  Kind kind = Kind::killing;
  /// Synthetic profile h = c d^{-2s}.
  double c = 1.0;
  /// Custom per-grid-node table.
  std::vector<double> table;
  /// Declared bounds on h d^{2s}; checked at assembly when present.
  std::optional<double> alpha;
  std::optional<double> beta;
  int angular_count = 2048;

  static CoefficientProfile killing() { return {}; }
  static CoefficientProfile kinetic() {
    CoefficientProfile p;
    p.kind = Kind::kinetic;
    return p;
  }
  static CoefficientProfile synthetic(double c) {
    CoefficientProfile p;
    p.kind = Kind::synthetic;
    p.c = c;
    return p;
  }
  static CoefficientProfile custom(std::vector<double> table) {
    CoefficientProfile p;
    p.kind = Kind::custom;
    p.table = std::move(table);
    return p;
  }
  std::string name() const;
};

/// Singular-shell quadrature: nodes with |z| <= r_sing are paired z/-z and their
/// plain weights rescaled so the second moment equals the exact shell mass.
struct ShellRule {
  double r_sing = 0.0;
  /// Radius of the ball with the same volume as the shell cells plus the centre cell.
  double r_eff = 0.0;
  double density = 1.0;
  /// density * omega_N * r_eff^{2-2s} / (2-2s).
  double mass = 0.0;
  double scale = 1.0;
};

ShellRule shell_rule(const Grid& grid, const DomainFamily& family, const FracParams& params);

struct WeightEntry {
  int node = -1;  // grid node
  double weight = 0.0;
  bool shell = false;
};

/// Off-diagonal weights of row `node`: the discrete kernel restricted to Omega(x).
std::vector<WeightEntry> kernel_weights(const Grid& grid, const DomainFamily& family,
                                        const FracParams& params, int node, double t = 0.0);

/// A = diag(h) + L over a set of unknowns (grid nodes), L_ii = sum_j w_ij, L_ij = -w_ij.
class DiscreteOperator {
 public:
  enum class Storage { dense, sparse };

  DiscreteOperator(std::shared_ptr<const Grid> grid, std::vector<int> nodes, Eigen::VectorXd dist,
                   Eigen::VectorXd h, SparseRowMatrix weights, DomainFamily family,
                   FracParams params, double time = 0.0);

  int size() const { return static_cast<int>(nodes_.size()); }
  const Grid& grid() const { return *grid_; }
  std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
  const std::vector<int>& nodes() const { return nodes_; }
  const Eigen::VectorXd& h() const { return h_; }
  /// Distance to the boundary of the set the unknowns live in.
  const Eigen::VectorXd& dist() const { return dist_; }
  const Eigen::VectorXd& l_diagonal() const { return l_diag_; }
  const SparseRowMatrix& weights() const { return weights_; }
  const DomainFamily& family() const { return family_; }
  const FracParams& params() const { return params_; }
  double time() const { return time_; }

  Storage storage() const { return storage_; }
  double fill() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  Eigen::VectorXd apply_l(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd dense() const;
  SparseRowMatrix sparse() const;

  /// min_i (A_ii - sum_{j!=i} |A_ij|) = min_i h_i.
  double dominance_margin() const { return h_.minCoeff(); }
  bool m_matrix_pattern() const;
  /// min / max of h d^{2s}.
  double alpha_measured() const;
  double beta_measured() const;

  DiscreteOperator diagonal_only() const;
  DiscreteOperator scaled(double factor) const;
  DiscreteOperator with_h(Eigen::VectorXd h) const;

  Eigen::VectorXd restrict(const GridFunction& u) const;
  GridFunction extend(const Eigen::VectorXd& u) const;

  /// Coordinate triplets of A with a commented header.
  void write_triplets(std::ostream& out) const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<int> nodes_;
  Eigen::VectorXd dist_;
  Eigen::VectorXd h_;
  SparseRowMatrix weights_;
  Eigen::VectorXd l_diag_;
  DomainFamily family_;
  FracParams params_;
  double time_ = 0.0;
  Storage storage_ = Storage::sparse;
};

/// (L u)(x) = sum_j w_xj (u(x) - u(x_j)).
double apply_pv(const DiscreteOperator& op, const GridFunction& u, int node);

DiscreteOperator assemble(std::shared_ptr<const Grid> grid, const DomainFamily& family,
                          const FracParams& params, const CoefficientProfile& profile,
                          double t = 0.0);

/// Naive double loop over all node pairs, for cross-checking assemble().
DiscreteOperator assemble_reference(std::shared_ptr<const Grid> grid, const DomainFamily& family,
                                    const FracParams& params, const GridFunction& h);

/// k(x) = integral over the complement of |x-y|^{-N-2s}.
GridFunction killing_term(const Grid& grid, const DomainSpec& domain, const FracParams& params,
                          int angular_count = 2048);

/// a(x) = Gamma(2s) * integral over directions of d(x,sigma)^{-2s}, exact ray casting.
GridFunction kinetic_coefficient(const Grid& grid, const DomainSpec& domain,
                                 const FracParams& params, int angular_count = 2048);

/// a(x) = Gamma(2s+1) * integral over the complement of the largest star-shaped subset,
/// with the first exit found by marching the ray (dx/4) and bisection.
GridFunction kinetic_coefficient_by_complement(const Grid& grid, const DomainSpec& domain,
                                               const FracParams& params,
                                               int angular_count = 2048);

/// Coefficient h at interior nodes for a profile (0 elsewhere).
GridFunction coefficient_field(const Grid& grid, const FracParams& params,
                               const CoefficientProfile& profile);

/// Restrict the operator to the unknowns inside `subset`: Xi(x) = Omega(x) cap O and
/// j(x) = h(x) + integral over Omega(x) \ O of |x-y|^{-N-2s}. The result's dist() is the
/// distance to the boundary of O.
DiscreteOperator localize(const DiscreteOperator& op, const DomainSpec& subset,
                          int angular_count = 2048);

void write_field_csv(std::ostream& out, const Grid& grid, const GridFunction& f,
                     const std::string& name);

}  // namespace varfrac
