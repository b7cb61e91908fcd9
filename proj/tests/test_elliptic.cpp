#include <doctest.h>

#include <cmath>
#include <random>

#include "varfrac/elliptic.hpp"
#include "varfrac/errors.hpp"
#include "varfrac/linalg.hpp"

using namespace varfrac;

namespace {

DiscreteOperator reference_operator(double s, double dx = 0.01) {
  auto g = std::make_shared<const Grid>(build_grid(DomainSpec::interval(0, 1), dx));
  return assemble(g, DomainFamily{}, FracParams(s, 1), CoefficientProfile::killing());
}

DiscreteOperator lshape_operator() {
  DomainFamily star;
  star.rule = DomainFamily::Rule::star_shaped;
  auto g = std::make_shared<const Grid>(
      build_grid(DomainSpec::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}), 0.1));
  return assemble(g, star, FracParams(0.5, 2), CoefficientProfile::kinetic());
}

}  // namespace

TEST_CASE("trivial elliptic problems") {
  const auto op = reference_operator(0.5);
  EllipticProblem zero{&op, Eigen::VectorXd::Zero(op.size())};
  CHECK(solve(zero).cwiseAbs().maxCoeff() == 0.0);

  const auto diag = op.diagonal_only();
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(diag.size());
  const Eigen::VectorXd u = solve({&diag, f});
  CHECK((u - f.cwiseQuotient(diag.h())).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("solution agrees with dense LU and stays under the barrier") {
  const auto op = reference_operator(0.75);
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(op.size());
  const auto cert = certify_forcing(op, f, 0.75);
  const Eigen::VectorXd u = solve({&op, f, 0.0, cert});
  const Eigen::VectorXd oracle = op.dense().partialPivLu().solve(f);
  CHECK((u - oracle).cwiseAbs().maxCoeff() <= 1e-10 * oracle.cwiseAbs().maxCoeff());
  CHECK(u.minCoeff() > 0.0);
  const Barrier b = find_barrier(op, op.alpha_measured(), &f);
  CHECK((u.array() <= b.values.array() * (1 + 1e-12)).all());
}

TEST_CASE("forcing certificate") {
  const auto op = reference_operator(0.5);
  const Eigen::VectorXd f = op.dist().array().pow(-0.5).matrix();
  // |f| d^{2s - eta_f} = d^{0.5 - 0.5}: C = 1 for eta_f = 0.5
  CHECK(certify_forcing(op, f, 0.5).C == doctest::Approx(1.0));
  CHECK_THROWS_AS(certify_forcing(op, f, 1.0), ConfigError);
  CHECK_THROWS_AS(certify_forcing(op, f, 0.0), ConfigError);
}

TEST_CASE("shift above the dominance margin without a certificate is refused") {
  const auto op = reference_operator(0.5);
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(op.size());
  CHECK_THROWS_AS(solve({&op, f, op.h().minCoeff() + 1.0}), SpectralShiftError);
}

TEST_CASE("barriers") {
  SUBCASE("without L any exponent works with margin alpha d^{eta-2s} / 2") {
    const auto op = reference_operator(0.5).diagonal_only();
    const double alpha = op.alpha_measured();
    const Eigen::VectorXd m = barrier_margin(op, alpha, 0.3);
    const Eigen::VectorXd expect = 0.5 * alpha * op.dist().array().pow(0.3 - 1.0);
    CHECK((m - expect).cwiseAbs().maxCoeff() <= 1e-12 * expect.maxCoeff());
  }
  SUBCASE("1D s = 1/4 has a barrier exponent") {
    const auto op = reference_operator(0.25);
    const Barrier b = find_barrier(op, op.alpha_measured());
    CHECK(b.eta > 0.0);
    CHECK(b.eta < 0.5);
    CHECK(b.margin.minCoeff() >= 0.0);
  }
  SUBCASE("margin at the worst node decreases with eta") {
    const auto op = lshape_operator();
    const double alpha = op.alpha_measured();
    Eigen::Index worst = 0;
    barrier_margin(op, alpha, 0.25).minCoeff(&worst);
    double prev = 1e300;
    for (double eta = 0.0625; eta <= 0.5; eta += 0.0625) {
      const double m = barrier_margin(op, alpha, eta)[worst] * std::pow(op.dist()[worst], 1.0 - eta);
      CHECK(m < prev);
      prev = m;
    }
  }
  SUBCASE("alpha must be positive") {
    const auto op = reference_operator(0.5);
    CHECK_THROWS_AS(find_barrier(op, 0.0), ConfigError);
  }
}

TEST_CASE("comparison") {
  const auto op = reference_operator(0.5, 0.02);
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(op.size());
  const Eigen::VectorXd u = solve({&op, f});
  const Eigen::VectorXd v = solve({&op, f + 0.1 * Eigen::VectorXd::Ones(op.size())});
  CHECK(check_comparison(op, u, v, f).holds());
  CHECK((v - u).minCoeff() >= 0.0);

  // inverse positivity from an independent dense inverse
  const Eigen::MatrixXd inv = op.dense().inverse();
  CHECK(inv.minCoeff() >= -1e-12 * inv.maxCoeff());
  CHECK(min_inverse_entry(op) == doctest::Approx(inv.minCoeff()).epsilon(1e-6));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd g(op.size()), delta(op.size());
    for (int i = 0; i < op.size(); ++i) {
      g[i] = uni(rng);
      delta[i] = 0.5 * (1.0 + uni(rng));
    }
    const Eigen::VectorXd a = solve({&op, g});
    const Eigen::VectorXd b = solve({&op, g + delta});
    const auto rep = check_comparison(op, a, b, g);
    if (!rep.holds()) ++violations;
  }
  CHECK(violations == 0);

  // barrier sandwich for a certified forcing
  const Barrier bar = find_barrier(op, op.alpha_measured(), &f);
  CHECK(check_comparison(op, -bar.values, bar.values, f).holds());
  CHECK((u.cwiseAbs().array() <= bar.values.array()).all());
}

TEST_CASE("strong maximum principle") {
  const auto op = lshape_operator();
  CHECK(strong_max_principle_check(op, Eigen::VectorXd::Zero(op.size())).outcome == SmpOutcome::identically_zero);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(op.size());
  f[op.size() / 3] = 1.0;
  const Eigen::VectorXd u = solve({&op, f});
  CHECK(strong_max_principle_check(op, u).outcome == SmpOutcome::strictly_positive);
  CHECK(adjacency_components(op) == 1);
  Eigen::VectorXd bad = u;
  bad[0] = -1.0;
  CHECK(strong_max_principle_check(op, bad).outcome == SmpOutcome::rejected);
}

TEST_CASE("backward-error acceptance tolerates nearly singular shifts") {
  const auto op = reference_operator(0.5, 0.02);
  const double lambda = Eigen::EigenSolver<Eigen::MatrixXd>(op.dense()).eigenvalues().real().minCoeff();
  const double shift = lambda * (1.0 - 1e-9);
  const ShiftedSolver solver(op, shift, ShiftedSolver::Acceptance::backward_error);
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(op.size());
  const Eigen::VectorXd x = solver.solve(f);
  const Eigen::VectorXd r = shifted_dense(op, shift) * x - f;
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-10 * (op.dense().cwiseAbs().rowwise().sum().maxCoeff() * x.cwiseAbs().maxCoeff()));
  CHECK(x.minCoeff() > 0.0);
}
