#include "varfrac/elliptic.hpp"

#include <cmath>
#include <deque>
#include <sstream>

#include "varfrac/errors.hpp"
#include "varfrac/linalg.hpp"

namespace varfrac {

ForcingCertificate certify_forcing(const DiscreteOperator& op, const Eigen::VectorXd& f,
                                   double eta_f) {
  const double s = op.params().s;
  if (!(eta_f > 0.0 && eta_f < 2.0 * s))
    throw ConfigError("forcing exponent eta_f must lie in (0, 2s)");
  if (f.size() != op.size()) throw ConfigError("forcing length does not match the operator");
  const Eigen::ArrayXd w = op.dist().array().pow(2.0 * s - eta_f);
  return {eta_f, (f.array().abs() * w).maxCoeff()};
}

Eigen::VectorXd solve(const EllipticProblem& problem, std::optional<double> lambda_bar) {
  if (problem.op == nullptr) throw ConfigError("elliptic problem has no operator");
  const DiscreteOperator& op = *problem.op;
  if (problem.f.size() != op.size()) throw ConfigError("forcing length does not match the operator");
  const double margin = op.dominance_margin() - problem.lambda;
  if (!(margin > 0.0) && !(lambda_bar && problem.lambda < *lambda_bar)) {
    std::ostringstream os;
    os << "shift lambda=" << problem.lambda << " leaves no dominance margin (" << margin
       << ") and is not certified below the principal eigenvalue";
    throw SpectralShiftError(os.str());
  }
  if (problem.certificate) {
    const auto fresh = certify_forcing(op, problem.f, problem.certificate->eta_f);
    if (fresh.C > problem.certificate->C * (1.0 + 1e-12))
      throw ConfigError("forcing violates its growth certificate");
  }
  ShiftedSolver solver(op, problem.lambda);
  return solver.solve(problem.f);
}

Eigen::VectorXd barrier_margin(const DiscreteOperator& op, double alpha, double eta) {
  const double s = op.params().s;
  const Eigen::VectorXd u = op.dist().array().pow(eta).matrix();
  const Eigen::ArrayXd weight = op.dist().array().pow(eta - 2.0 * s);
  return (0.5 * alpha * weight + op.apply_l(u).array()).matrix();
}

Barrier find_barrier(const DiscreteOperator& op, double alpha, const Eigen::VectorXd* forcing,
                     int depth) {
  if (!(alpha > 0.0)) throw ConfigError("barrier needs a positive coefficient bound alpha");
  const double s = op.params().s;
  int worst = -1;
  double worst_value = 0.0;
  for (int k = 1; k <= depth; ++k) {
    double eta = 2.0 * s / std::ldexp(1.0, k);
    Eigen::VectorXd margin = barrier_margin(op, alpha, eta);
    Eigen::Index arg = 0;
    const double low = margin.minCoeff(&arg);
    worst = static_cast<int>(arg);
    worst_value = low;
    if (low < 0.0) continue;
    if (k < depth) {
      Eigen::VectorXd safer = barrier_margin(op, alpha, 0.5 * eta);
      if (safer.minCoeff(&arg) >= 0.0) {
        eta *= 0.5;
        margin = std::move(safer);
      } else {
        margin.minCoeff(&arg);
      }
    }

    Barrier b;
    b.eta = eta;
    b.alpha = alpha;
    b.margin = std::move(margin);
    b.worst_node = op.nodes()[arg];
    if (forcing != nullptr) {
      const Eigen::ArrayXd floor = 0.5 * alpha * op.dist().array().pow(eta - 2.0 * s);
      b.Q = (forcing->array().abs() / floor).maxCoeff();
    }
    b.values = b.Q * op.dist().array().pow(eta).matrix();
    return b;
  }
  std::ostringstream os;
  os << "no barrier exponent down to 2s/2^" << depth << " has a nonnegative margin (worst "
     << worst_value << " at node " << op.nodes()[worst] << ")";
  throw BarrierError(os.str(), op.nodes()[worst]);
}

ComparisonReport check_comparison(const DiscreteOperator& op, const Eigen::VectorXd& u_sub,
                                  const Eigen::VectorXd& v_super, const Eigen::VectorXd& f,
                                  double tol) {
  ComparisonReport rep;
  const Eigen::VectorXd au = op.apply(u_sub);
  const Eigen::VectorXd av = op.apply(v_super);
  const double scale = std::max({1.0, f.cwiseAbs().maxCoeff(), au.cwiseAbs().maxCoeff(),
                                 av.cwiseAbs().maxCoeff()});
  rep.precondition_slack = std::max((au - f).maxCoeff(), (f - av).maxCoeff());
  rep.accepted = rep.precondition_slack <= tol * scale;
  if (!rep.accepted) return rep;
  Eigen::Index arg = 0;
  rep.max_violation = std::max(0.0, (u_sub - v_super).maxCoeff(&arg));
  rep.worst_node = rep.max_violation > 0.0 ? op.nodes()[arg] : -1;
  return rep;
}

SmpVerdict strong_max_principle_check(const DiscreteOperator& op, const Eigen::VectorXd& u,
                                      double tol) {
  SmpVerdict v;
  const int n = op.size();
  const double scale = std::max(1e-300, u.cwiseAbs().maxCoeff());
  const Eigen::VectorXd au = op.apply(u);
  const double ascale = std::max(1.0, (op.h().array() * u.array().abs()).maxCoeff());
  if (u.minCoeff() < -tol * scale || au.minCoeff() < -1e-9 * ascale) {
    v.outcome = SmpOutcome::rejected;
    v.detail = "precondition A u >= 0, u >= 0 fails";
    return v;
  }
  if (u.cwiseAbs().maxCoeff() <= tol) {
    v.outcome = SmpOutcome::identically_zero;
    return v;
  }
  std::vector<char> positive(n);
  for (int i = 0; i < n; ++i) positive[i] = u[i] > tol * scale;
  if (std::all_of(positive.begin(), positive.end(), [](char p) { return p != 0; })) {
    v.outcome = SmpOutcome::strictly_positive;
    return v;
  }
  // reverse BFS from positive nodes: which zero nodes reach a positive value through
  // chains x0 -> x1 -> ... with x_{k+1} in Omega(x_k)
  std::vector<std::vector<int>> incoming(n);
  const auto& w = op.weights();
  for (int i = 0; i < n; ++i)
    for (SparseRowMatrix::InnerIterator it(w, i); it; ++it)
      if (it.value() > 0.0) incoming[it.col()].push_back(i);
  std::vector<char> reaches(positive);
  std::deque<int> queue;
  for (int i = 0; i < n; ++i)
    if (positive[i]) queue.push_back(i);
  while (!queue.empty()) {
    const int j = queue.front();
    queue.pop_front();
    for (int i : incoming[j]) {
      if (reaches[i]) continue;
      reaches[i] = 1;
      queue.push_back(i);
      v.outcome = SmpOutcome::violation;
      v.node = op.nodes()[i];
      v.detail = "zero value with a positive value reachable through Omega(x)";
      return v;
    }
  }
  v.outcome = SmpOutcome::zero_off_support;
  return v;
}

int adjacency_components(const DiscreteOperator& op) {
  const int n = op.size();
  std::vector<std::vector<int>> adj(n);
  const auto& w = op.weights();
  for (int i = 0; i < n; ++i)
    for (SparseRowMatrix::InnerIterator it(w, i); it; ++it) {
      adj[i].push_back(static_cast<int>(it.col()));
      adj[it.col()].push_back(i);
    }
  std::vector<char> seen(n, 0);
  int components = 0;
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    ++components;
    std::deque<int> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const int i = queue.front();
      queue.pop_front();
      for (int j : adj[i])
        if (!seen[j]) {
          seen[j] = 1;
          queue.push_back(j);
        }
    }
  }
  return components;
}

double min_inverse_entry(const DiscreteOperator& op, double shift) {
  const Eigen::MatrixXd inv = shifted_dense(op, shift).partialPivLu().inverse();
  return inv.minCoeff();
}

}  // namespace varfrac
