#include "varfrac/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "varfrac/errors.hpp"
#include "varfrac/linalg.hpp"

namespace varfrac {

namespace {

// argmax with the lowest index on ties
int argmax_first(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

SpectralResult principal_eigen(const DiscreteOperator& op, const EigenOptions& options,
                               const Eigen::VectorXd* forcing) {
  const int n = op.size();
  Eigen::VectorXd f = forcing != nullptr ? *forcing : Eigen::VectorXd::Ones(n);
  if (f.size() != n) throw ConfigError("forcing length does not match the operator");
  if (f.minCoeff() < 0.0 || f.maxCoeff() <= 0.0)
    throw ConfigError("eigen iteration needs a nonnegative nontrivial forcing");
  f /= f.maxCoeff();

  SpectralResult res;
  double sigma = 0.0;
  auto solver = std::make_unique<ShiftedSolver>(op, sigma, ShiftedSolver::Acceptance::backward_error);
  Eigen::VectorXd u = f;
  double lambda = op.apply(u)[argmax_first(u)] / u[argmax_first(u)];
  int next_refresh = 8;

  for (int it = 1; it <= options.max_iterations; ++it) {
    const double theta = std::ldexp(1.0, -std::min(it, 1000));
    const double gain = lambda - sigma > 0.0 ? lambda - sigma : 1.0;
    const Eigen::VectorXd rhs = gain * u + theta * f;
    Eigen::VectorXd v = solver->solve(rhs, &u);
    const int star = argmax_first(v);
    if (!(v[star] > 0.0)) throw NumericalError("eigen iteration lost positivity");
    u = v / v[star];
    const Eigen::VectorXd au = op.apply(u);
    const double next = au[star] / u[star];
    res.trace.push_back(next);
    const bool done = it >= 3 && std::abs(next - lambda) <= options.tol * std::abs(next);
    lambda = next;
    res.iterations = it;
    if (done) {
      res.converged = true;
      break;
    }
    if (it == next_refresh) {
      next_refresh *= 2;
      if (u.minCoeff() > 0.0) {
        // Collatz-Wielandt: min_i (A u)_i / u_i <= lambda_bar for positive u
        const double lower = (au.array() / u.array()).minCoeff();
        const double candidate = std::min(lower, lambda * (1.0 - 1e-4));
        if (candidate > sigma + 1e-3 * std::abs(lambda)) {
          sigma = candidate;
          solver = std::make_unique<ShiftedSolver>(op, sigma, ShiftedSolver::Acceptance::backward_error);
        }
      }
    }
  }
  res.lambda = lambda;
  res.phi = u;
  res.min_phi = u.minCoeff();
  if (!res.converged) {
    std::ostringstream os;
    os << "principal eigen iteration did not converge in " << options.max_iterations
       << " iterations (last estimates";
    for (std::size_t k = res.trace.size() >= 3 ? res.trace.size() - 3 : 0; k < res.trace.size(); ++k)
      os << ' ' << res.trace[k];
    os << ")";
    throw NumericalError(os.str());
  }
  if (options.run_oracle) {
    if (n <= kDenseOracleLimit) {
      const DenseSpectrum spec = dense_principal_eigenvalue(op);
      res.oracle_lambda = spec.lambda;
      res.gap = spec.gap;
    } else {
      res.warning = "dense oracle skipped: " + std::to_string(n) + " unknowns";
    }
  }
  return res;
}

DenseSpectrum dense_principal_eigenvalue(const DiscreteOperator& op) {
  const Eigen::MatrixXd a = op.dense();
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  const auto& ev = es.eigenvalues();
  int best = 0;
  for (int i = 1; i < ev.size(); ++i)
    if (ev[i].real() < ev[best].real()) best = i;
  double second = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ev.size(); ++i)
    if (i != best) second = std::min(second, ev[i].real());
  DenseSpectrum out;
  out.lambda = ev[best].real();
  out.gap = ev.size() > 1 ? second - out.lambda : 0.0;
  out.lambda_is_real = std::abs(ev[best].imag()) <= 1e-10 * std::abs(out.lambda);
  return out;
}

SimplicityVerdict check_simplicity(const SpectralResult& result, const DiscreteOperator& op,
                                   double rank_tol, double fit_tol) {
  SimplicityVerdict v;
  const Eigen::MatrixXd m = shifted_dense(op, result.lambda);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int n = static_cast<int>(sv.size());
  const double cutoff = rank_tol * sv[0];
  for (int k = 0; k < n; ++k)
    if (sv[k] <= cutoff) ++v.multiplicity;
  for (int k = std::max(0, n - 3); k < n; ++k) v.smallest_singular_values.push_back(sv[k]);

  const Eigen::VectorXd null = svd.matrixV().col(n - 1);
  const double t = result.phi.dot(null) / null.dot(null);
  v.fit_residual = (result.phi - t * null).cwiseAbs().maxCoeff();
  v.pass = v.multiplicity == 1 && v.fit_residual <= fit_tol;
  std::ostringstream os;
  os << "multiplicity=" << v.multiplicity << " fit_residual=" << v.fit_residual;
  v.detail = os.str();
  return v;
}

std::string to_string(ProbeOutcome outcome) {
  switch (outcome) {
    case ProbeOutcome::solvable_positive:
      return "solvable_positive";
    case ProbeOutcome::blown_up:
      return "blown_up";
    case ProbeOutcome::failed:
      return "failed";
  }
  return "unknown";
}

ESetProbe probe_E(const DiscreteOperator& op, const Eigen::VectorXd& f,
                  const std::vector<double>& lambda_grid, double cap) {
  if (f.size() != op.size()) throw ConfigError("forcing length does not match the operator");
  ESetProbe probe;
  probe.forcing = f;
  probe.cap = cap > 0.0 ? cap : 1e6 * f.cwiseAbs().maxCoeff();
  probe.lambdas = lambda_grid;
  for (double lam : lambda_grid) {
    const Eigen::VectorXd v = shifted_dense(op, lam).partialPivLu().solve(f);
    const double norm = v.allFinite() ? v.cwiseAbs().maxCoeff() : std::numeric_limits<double>::infinity();
    ProbeOutcome out = ProbeOutcome::failed;
    if (!v.allFinite()) {
      out = ProbeOutcome::failed;
    } else if (norm > probe.cap) {
      out = ProbeOutcome::blown_up;
    } else if (v.minCoeff() > 0.0) {
      out = ProbeOutcome::solvable_positive;
    }
    probe.outcomes.push_back(out);
    probe.norms.push_back(norm);
  }
  bool crossed = false;
  for (std::size_t k = 0; k < probe.outcomes.size(); ++k) {
    const bool ok = probe.outcomes[k] == ProbeOutcome::solvable_positive;
    if (!ok && !crossed) {
      crossed = true;
      if (k > 0) probe.bracket = std::make_pair(probe.lambdas[k - 1], probe.lambdas[k]);
    } else if (ok && crossed) {
      probe.monotone = false;
    }
  }
  return probe;
}

Eigen::VectorXd solve_below_lambda(const DiscreteOperator& op, double lambda,
                                   const Eigen::VectorXd& f, double lambda_bar) {
  if (!(lambda < lambda_bar)) {
    std::ostringstream os;
    os << "shift " << lambda << " is not below the principal eigenvalue " << lambda_bar;
    throw SpectralShiftError(os.str());
  }
  ShiftedSolver direct(op, lambda);
  const Eigen::VectorXd u = direct.solve(f);
  if (lambda == 0.0 || std::abs(lambda) >= lambda_bar) return u;

  // v_n = A^{-1}(lambda v_{n-1} + f) contracts at rate |lambda| / lambda_bar
  ShiftedSolver plain(op, 0.0);
  const double rate = std::abs(lambda) / lambda_bar;
  const int max_it = std::min(50000, static_cast<int>(std::ceil(std::log(1e-15) / std::log(rate))) + 100);
  const double scale = std::max(1e-300, u.cwiseAbs().maxCoeff());
  for (const Eigen::VectorXd& start :
       {Eigen::VectorXd(Eigen::VectorXd::Zero(op.size())),
        Eigen::VectorXd(2.0 * u + Eigen::VectorXd::Constant(op.size(), scale))}) {
    Eigen::VectorXd v = start;
    for (int it = 0; it < max_it; ++it) {
      Eigen::VectorXd next = plain.solve(lambda * v + f, &v);
      const double step = (next - v).cwiseAbs().maxCoeff();
      v = std::move(next);
      if (step <= 1e-14 * scale) break;
    }
    const double diff = (v - u).cwiseAbs().maxCoeff() / scale;
    if (diff > 1e-8) {
      std::ostringstream os;
      os << "uniqueness cross-check failed: fixed-point iterate differs by " << diff;
      throw NumericalError(os.str(), diff);
    }
  }
  return u;
}

}  // namespace varfrac
