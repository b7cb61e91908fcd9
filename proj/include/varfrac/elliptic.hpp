#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "varfrac/operator.hpp"

namespace varfrac {

/// |f(x)| d(x)^{2s - eta_f} <= C at every unknown.
struct ForcingCertificate {
  double eta_f = 0.0;
  double C = 0.0;
};

/// Smallest C with |f| d^{2s-eta_f} <= C; throws ConfigError unless 0 < eta_f < 2s.
ForcingCertificate certify_forcing(const DiscreteOperator& op, const Eigen::VectorXd& f,
                                   double eta_f);

struct EllipticProblem {
  const DiscreteOperator* op = nullptr;
  Eigen::VectorXd f;
  /// Spectral shift: solves (A - lambda I) u = f.
  double lambda = 0.0;
  std::optional<ForcingCertificate> certificate;
};

/// Solves (A - lambda I) u = f. Requires min_i(h_i) > lambda, or lambda below a supplied
/// principal-eigenvalue estimate; otherwise throws SpectralShiftError.
Eigen::VectorXd solve(const EllipticProblem& problem,
                      std::optional<double> lambda_bar = std::nullopt);

struct Barrier {
  double eta = 0.0;
  double Q = 1.0;
  double alpha = 0.0;
  /// Q d^eta at every unknown.
  Eigen::VectorXd values;
  /// alpha d^{eta-2s} + L(d^eta) - (alpha/2) d^{eta-2s}, for the unit amplitude.
  Eigen::VectorXd margin;
  int worst_node = -1;
};

/// Barrier residual margin of d^eta at every unknown.
Eigen::VectorXd barrier_margin(const DiscreteOperator& op, double alpha, double eta);

/// Scans eta in {2s/2, 2s/4, ...} (down to 2s/2^depth) for the largest one whose margin is
/// nonnegative everywhere, then returns the next smaller exponent when that one passes too:
/// the grid only resolves the threshold down to its spacing (near reentrant corners the
/// largest passing eta can fail on a finer grid), while any smaller eta remains a barrier.
/// With a forcing, Q is the smallest amplitude with Q (alpha/2) d^{eta-2s} >= |f|.
Barrier find_barrier(const DiscreteOperator& op, double alpha,
                     const Eigen::VectorXd* forcing = nullptr, int depth = 20);

struct ComparisonReport {
  bool accepted = false;
  /// Worst violation of A u_sub <= f <= A v_super (positive means violated).
  double precondition_slack = 0.0;
  /// max (u_sub - v_super)^+.
  double max_violation = 0.0;
  int worst_node = -1;
  bool holds() const { return accepted && max_violation <= 0.0; }
};

ComparisonReport check_comparison(const DiscreteOperator& op, const Eigen::VectorXd& u_sub,
                                  const Eigen::VectorXd& v_super, const Eigen::VectorXd& f,
                                  double tol = 1e-9);

enum class SmpOutcome { identically_zero, strictly_positive, zero_off_support, violation, rejected };

struct SmpVerdict {
  SmpOutcome outcome = SmpOutcome::rejected;
  int node = -1;
  std::string detail;
};

/// Discrete strong maximum principle for A u >= 0, u >= 0. A zero value with a positive
/// value reachable along Omega(x)-adjacency is a violation; zeros on a component that
/// reaches no positive value are reported as zero_off_support.
SmpVerdict strong_max_principle_check(const DiscreteOperator& op, const Eigen::VectorXd& u,
                                      double tol = 1e-12);

/// Connected components of the directed-weight graph treated as undirected.
int adjacency_components(const DiscreteOperator& op);

/// Smallest entry of the dense inverse of (A - shift I).
double min_inverse_entry(const DiscreteOperator& op, double shift = 0.0);

}  // namespace varfrac
