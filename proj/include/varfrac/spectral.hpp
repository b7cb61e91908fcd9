#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "varfrac/operator.hpp"

namespace varfrac {

/// Above this size the dense oracle is skipped (O(n^3)).
constexpr int kDenseOracleLimit = 4000;

struct SpectralResult {
  double lambda = 0.0;
  /// Positive eigenfunction, max-norm 1.
  Eigen::VectorXd phi;
  /// Per-iteration principal-eigenvalue estimates.
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
  double min_phi = 0.0;
  /// Dense oracle: eigenvalue of smallest real part and the gap to the next real part.
  std::optional<double> oracle_lambda;
  std::optional<double> gap;
  std::string warning;
};

struct EigenOptions {
  double tol = 1e-13;
  int max_iterations = 20000;
  bool run_oracle = true;
};

/// Positive-forced, renormalised inverse iteration
///   v_n = (A - sigma I)^{-1} ((lambda_n - sigma) u_{n-1} + theta_n f),  u_n = v_n / |v_n|_inf,
/// with theta_n -> 0, sigma a Collatz-Wielandt lower bound refreshed a few times, and
/// lambda_n = (A u_n)(x*) at the argmax x* (lowest index on ties). Converged when successive
/// estimates agree to tol (relative). Throws NumericalError with the trace otherwise.
SpectralResult principal_eigen(const DiscreteOperator& op, const EigenOptions& options = {},
                               const Eigen::VectorXd* forcing = nullptr);

struct DenseSpectrum {
  double lambda = 0.0;
  double gap = 0.0;
  bool lambda_is_real = true;
};

/// Eigenvalue of smallest real part of the dense matrix, via a nonsymmetric eigensolver.
DenseSpectrum dense_principal_eigenvalue(const DiscreteOperator& op);

struct SimplicityVerdict {
  bool pass = false;
  int multiplicity = 0;
  double fit_residual = 0.0;
  std::vector<double> smallest_singular_values;
  std::string detail;
};

/// Rank of A - lambda I via SVD (multiplicity = number of singular values below
/// rank_tol * sigma_max) and best-fit residual of the oracle null vector against phi.
SimplicityVerdict check_simplicity(const SpectralResult& result, const DiscreteOperator& op,
                                   double rank_tol = 1e-9, double fit_tol = 1e-8);

enum class ProbeOutcome { solvable_positive, blown_up, failed };

struct ESetProbe {
  std::vector<double> lambdas;
  std::vector<ProbeOutcome> outcomes;
  std::vector<double> norms;
  Eigen::VectorXd forcing;
  double cap = 0.0;
  /// Last solvable and first non-solvable lambda; nullopt when the sweep never crosses.
  std::optional<std::pair<double, double>> bracket;
  bool monotone = true;
};

/// Classifies (A - lambda I) v = f for each lambda: solvable_positive when v > 0 and
/// |v|_inf <= cap, blown_up when |v|_inf > cap, failed otherwise. cap <= 0 selects
/// 1e6 |f|_inf.
ESetProbe probe_E(const DiscreteOperator& op, const Eigen::VectorXd& f,
                  const std::vector<double>& lambda_grid, double cap = 0.0);

std::string to_string(ProbeOutcome outcome);

/// Unique solution of (A - lambda I) u = f for lambda < lambda_bar. The direct solve is
/// cross-checked against the fixed-point iteration v_n = A^{-1}(lambda v_{n-1} + f) started
/// from two different iterates when |lambda| < lambda_bar.
Eigen::VectorXd solve_below_lambda(const DiscreteOperator& op, double lambda,
                                   const Eigen::VectorXd& f, double lambda_bar);

}  // namespace varfrac
