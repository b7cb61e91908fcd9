#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>

#include "varfrac/operator.hpp"

namespace varfrac {

constexpr double kSolveTolerance = 1e-10;

/// Solves (A - shift I) x = b for a fixed operator and shift. Dense storage uses a
/// partial-pivot LU factorisation; sparse storage uses BiCGSTAB with a diagonal
/// preconditioner at relative residual kSolveTolerance.
class ShiftedSolver {
 public:
  /// relative_residual: |r| <= tol |b|. backward_error: |r| <= tol (|M|_inf |x| + |b|), the
  /// normwise backward error, which is the attainable target for nearly singular shifts.
  enum class Acceptance { relative_residual, backward_error };

  ShiftedSolver(const DiscreteOperator& op, double shift,
                Acceptance acceptance = Acceptance::relative_residual);
  ~ShiftedSolver();
  ShiftedSolver(ShiftedSolver&&) noexcept;
  ShiftedSolver& operator=(ShiftedSolver&&) noexcept;

  /// Throws NumericalError when the acceptance measure exceeds kSolveTolerance.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs,
                        const Eigen::VectorXd* guess = nullptr) const;
  double shift() const { return shift_; }
  /// Relative residual of the last solve.
  double last_residual() const { return last_residual_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double shift_;
  Acceptance acceptance_;
  double matrix_norm_ = 0.0;
  mutable double last_residual_ = 0.0;
};

/// Dense (A - shift I) for oracle checks.
Eigen::MatrixXd shifted_dense(const DiscreteOperator& op, double shift);

/// Relative residual ||M x - b|| / ||b|| (absolute when b = 0).
double relative_residual(const DiscreteOperator& op, double shift, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b);

}  // namespace varfrac
