#include "varfrac/parabolic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "varfrac/errors.hpp"

namespace varfrac {

namespace {
constexpr double kForever = std::numeric_limits<double>::infinity();
}

ParabolicSolver::ParabolicSolver(ParabolicProblem problem) : problem_(std::move(problem)) {
  const auto& p = problem_;
  if (!(p.dt > 0.0)) throw ConfigError("time step must be positive");
  if (!p.run_to_steady && !(p.horizon > 0.0)) throw ConfigError("horizon must be positive");
  stationary_ = std::make_unique<DiscreteOperator>(
      assemble(p.grid, p.family, p.params, p.profile, kForever));
  if (p.forcing.size() != stationary_->size() || p.u0.size() != stationary_->size())
    throw ConfigError("forcing or initial datum length does not match the grid");
  steady_ = ShiftedSolver(*stationary_, 0.0).solve(p.forcing);
  if (time_invariant()) cached_ = std::make_unique<ShiftedSolver>(*stationary_, -1.0 / p.dt);
}

bool ParabolicSolver::time_invariant() const {
  return problem_.family.stationary() && !problem_.h_decay.active();
}

DiscreteOperator ParabolicSolver::operator_at(double t) const {
  const auto& p = problem_;
  if (p.family.stationary()) {
    if (!p.h_decay.active()) return *stationary_;
    return stationary_->with_h(stationary_->h() * p.h_decay.factor(t));
  }
  DiscreteOperator op = assemble(p.grid, p.family, p.params, p.profile, t);
  if (!p.h_decay.active()) return op;
  return op.with_h(op.h() * p.h_decay.factor(t));
}

Eigen::VectorXd ParabolicSolver::forcing_at(double t) const {
  return problem_.forcing * problem_.f_decay.factor(t);
}

Eigen::VectorXd ParabolicSolver::step(const Eigen::VectorXd& u, double t) const {
  const double dt = problem_.dt;
  const double next = t + dt;
  // (A + I/dt) u_new = u/dt + f(t+dt)
  const Eigen::VectorXd rhs = u / dt + forcing_at(next);
  if (cached_) return cached_->solve(rhs, &u);
  const DiscreteOperator op = operator_at(next);
  ShiftedSolver solver(op, -1.0 / dt);
  return solver.solve(rhs, &u);
}

Trajectory evolve(const ParabolicSolver& solver) {
  const auto& p = solver.problem();
  const Eigen::VectorXd& steady = solver.stationary_solution();
  const double vnorm = steady.cwiseAbs().maxCoeff();
  const double end = p.run_to_steady ? p.t_max : p.horizon;
  const int total = static_cast<int>(std::ceil(end / p.dt - 1e-9));
  const int stride = std::max(1, (total + p.max_stamps - 2) / std::max(1, p.max_stamps - 1));

  Trajectory traj;
  Eigen::VectorXd u = p.u0;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.snapshots.push_back(u);
    traj.distances.push_back((u - steady).cwiseAbs().maxCoeff());
  };
  record(0.0);
  for (int k = 1; k <= total; ++k) {
    const double t = (k - 1) * p.dt;
    u = solver.step(u, t);
    traj.steps = k;
    const double dist = (u - steady).cwiseAbs().maxCoeff();
    const bool settled = p.run_to_steady && dist <= 1e-12 * vnorm;
    if (k % stride == 0 || k == total || settled) record(k * p.dt);
    if (settled) break;
  }
  return traj;
}

Eigen::MatrixXd step_matrix(const DiscreteOperator& op, double dt) {
  Eigen::MatrixXd m = dt * op.dense();
  m.diagonal().array() += 1.0;
  return m;
}

DecayFit decay_rate(const Trajectory& traj, const Eigen::VectorXd& stationary, double t0,
                    double t1) {
  const double floor = 1e-11 * std::max(stationary.cwiseAbs().maxCoeff(), 1e-3);
  std::vector<double> ts, ys;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    if (t < t0 || t > t1) continue;
    if (!(traj.distances[k] > floor)) {
      std::ostringstream os;
      os << "decay window rejected: distance " << traj.distances[k] << " at t=" << t
         << " is at the round-off floor";
      throw NumericalError(os.str());
    }
    ts.push_back(t);
    ys.push_back(std::log(traj.distances[k]));
  }
  if (ts.size() < 3) throw NumericalError("decay window holds fewer than 3 stamps");
  const double n = static_cast<double>(ts.size());
  double mt = 0, my = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    mt += ts[k];
    my += ys[k];
  }
  mt /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    sxy += (ts[k] - mt) * (ys[k] - my);
    sxx += (ts[k] - mt) * (ts[k] - mt);
  }
  DecayFit fit;
  const double slope = sxy / sxx;
  fit.rate = -slope;
  fit.intercept = my - slope * mt;
  fit.points = static_cast<int>(ts.size());
  return fit;
}

WeightedDecay weighted_decay_check(const Trajectory& traj, const Eigen::VectorXd& stationary,
                                   const Eigen::VectorXd& dist, double eta, double lambda) {
  WeightedDecay out;
  const Eigen::ArrayXd weight = dist.array().pow(eta);
  const double half = 0.5 * traj.times.back();
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    const Eigen::ArrayXd ratio = (traj.snapshots[k] - stationary).array().abs() / weight *
                                 std::exp(lambda * t);
    Eigen::Index arg = 0;
    const double c = ratio.maxCoeff(&arg);
    if (c > out.C) {
      out.C = c;
      out.worst_unknown = static_cast<int>(arg);
      out.worst_time = t;
    }
    if (t <= half) out.C_half = std::max(out.C_half, c);
  }
  out.pass = std::isfinite(out.C) && out.C <= 1.05 * out.C_half;
  return out;
}

}  // namespace varfrac
