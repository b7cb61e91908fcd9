#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "varfrac/linalg.hpp"
#include "varfrac/operator.hpp"

namespace varfrac {

/// Multiplicative data perturbation 1 + amplitude e^{-rate t}.
struct DataDecay {
  double amplitude = 0.0;
  double rate = 0.0;
  double factor(double t) const { return 1.0 + amplitude * (rate == 0.0 ? 1.0 : std::exp(-rate * t)); }
  bool active() const { return amplitude != 0.0; }
};

/// du/dt + h(t,x) u + L(Omega(t,x)) u = f(t,x), u = 0 outside, u(0) = u0.
/// h(t,x) = h(x) (1 + a_h e^{-r_h t}), f(t,x) = f(x) (1 + a_f e^{-r_f t}); the family's own
/// TimeDecay perturbs rho(t,x).
struct ParabolicProblem {
  std::shared_ptr<const Grid> grid;
  DomainFamily family;
  FracParams params;
  CoefficientProfile profile;
  /// Stationary forcing f(x) at the unknowns.
  Eigen::VectorXd forcing;
  Eigen::VectorXd u0;
  DataDecay h_decay;
  DataDecay f_decay;
  double dt = 1e-2;
  /// Horizon; when run_to_steady is set, the run stops once |u - v|_inf <= 1e-12 |v|_inf
  /// or at t_max.
  double horizon = 1.0;
  bool run_to_steady = false;
  double t_max = 100.0;
  /// Snapshot budget.
  int max_stamps = 200;
};

/// Holds the stationary operator and caches the step factorisation when the step matrix
/// does not change in time.
class ParabolicSolver {
 public:
  explicit ParabolicSolver(ParabolicProblem problem);

  const ParabolicProblem& problem() const { return problem_; }
  /// Limit operator as t -> infinity.
  const DiscreteOperator& stationary_operator() const { return *stationary_; }
  DiscreteOperator operator_at(double t) const;
  Eigen::VectorXd forcing_at(double t) const;
  /// Solution of the limiting elliptic problem.
  const Eigen::VectorXd& stationary_solution() const { return steady_; }
  bool time_invariant() const;

  /// Implicit Euler: (I + dt A(t+dt)) u_new = u + dt f(t+dt).
  Eigen::VectorXd step(const Eigen::VectorXd& u, double t) const;

 private:
  ParabolicProblem problem_;
  std::unique_ptr<DiscreteOperator> stationary_;
  Eigen::VectorXd steady_;
  std::unique_ptr<ShiftedSolver> cached_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> snapshots;
  /// sup-norm distance of each snapshot to the stationary solution.
  std::vector<double> distances;
  int steps = 0;
};

Trajectory evolve(const ParabolicSolver& solver);

/// Step matrix I + dt A as a dense matrix, for oracle checks.
Eigen::MatrixXd step_matrix(const DiscreteOperator& op, double dt);

struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;
  int points = 0;
};

/// Least-squares slope of log |u(t) - v|_inf over stamps in [t0, t1], reported as a rate.
/// Throws NumericalError when the window has fewer than 3 stamps or touches round-off.
DecayFit decay_rate(const Trajectory& traj, const Eigen::VectorXd& stationary, double t0,
                    double t1);

struct WeightedDecay {
  double C = 0.0;
  double C_half = 0.0;
  int worst_unknown = -1;
  double worst_time = 0.0;
  bool pass = false;
};

/// Smallest C with |u(t,x) - v(x)| <= C d(x)^eta e^{-lambda t} over all stamps; pass iff C is
/// finite and does not grow by more than 5% from the first half of the run to the full run.
WeightedDecay weighted_decay_check(const Trajectory& traj, const Eigen::VectorXd& stationary,
                                   const Eigen::VectorXd& dist, double eta, double lambda);

}  // namespace varfrac
