#include "varfrac/linalg.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/LU>
#include <optional>
#include <sstream>

#include "varfrac/errors.hpp"

namespace varfrac {

struct ShiftedSolver::Impl {
  const DiscreteOperator* op = nullptr;
  std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> lu;
  SparseRowMatrix matrix;
  std::optional<Eigen::BiCGSTAB<SparseRowMatrix, Eigen::DiagonalPreconditioner<double>>> iterative;
};

ShiftedSolver::ShiftedSolver(const DiscreteOperator& op, double shift, Acceptance acceptance)
    : impl_(std::make_unique<Impl>()), shift_(shift), acceptance_(acceptance) {
  impl_->op = &op;
  // |A - shift I|_inf: row i holds h_i + l_i - shift on the diagonal and l_i off it
  matrix_norm_ = (((op.h() + op.l_diagonal()).array() - shift).abs() + op.l_diagonal().array()).maxCoeff();
  if (op.storage() == DiscreteOperator::Storage::dense) {
    impl_->lu.emplace(shifted_dense(op, shift));
  } else {
    impl_->matrix = op.sparse();
    for (int i = 0; i < op.size(); ++i) impl_->matrix.coeffRef(i, i) -= shift;
    impl_->iterative.emplace();
    impl_->iterative->setTolerance(0.1 * kSolveTolerance);
    impl_->iterative->setMaxIterations(std::max(200, 4 * op.size()));
    impl_->iterative->compute(impl_->matrix);
  }
}

ShiftedSolver::~ShiftedSolver() = default;
ShiftedSolver::ShiftedSolver(ShiftedSolver&&) noexcept = default;
ShiftedSolver& ShiftedSolver::operator=(ShiftedSolver&&) noexcept = default;

Eigen::VectorXd ShiftedSolver::solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd* guess) const {
  Eigen::VectorXd x;
  if (impl_->lu) {
    x = impl_->lu->solve(rhs);
  } else if (guess != nullptr) {
    x = impl_->iterative->solveWithGuess(rhs, *guess);
  } else {
    x = impl_->iterative->solve(rhs);
  }
  if (acceptance_ == Acceptance::relative_residual) {
    last_residual_ = relative_residual(*impl_->op, shift_, x, rhs);
  } else {
    const Eigen::VectorXd r = impl_->op->apply(x) - shift_ * x - rhs;
    const double scale = matrix_norm_ * x.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff();
    last_residual_ = scale > 0.0 ? r.cwiseAbs().maxCoeff() / scale : 0.0;
  }
  if (!x.allFinite() || !(last_residual_ <= kSolveTolerance)) {
    std::ostringstream os;
    os << "linear solve did not reach "
       << (acceptance_ == Acceptance::relative_residual ? "relative residual " : "backward error ")
       << kSolveTolerance << " (got " << last_residual_ << ")";
    throw NumericalError(os.str(), last_residual_);
  }
  return x;
}

Eigen::MatrixXd shifted_dense(const DiscreteOperator& op, double shift) {
  Eigen::MatrixXd a = op.dense();
  a.diagonal().array() -= shift;
  return a;
}

double relative_residual(const DiscreteOperator& op, double shift, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b) {
  const Eigen::VectorXd r = op.apply(x) - shift * x - b;
  const double nb = b.norm();
  return nb > 0.0 ? r.norm() / nb : r.norm();
}

}  // namespace varfrac
