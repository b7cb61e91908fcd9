#include <doctest.h>

#include <cmath>
#include <random>

#include "varfrac/elliptic.hpp"
#include "varfrac/errors.hpp"
#include "varfrac/spectral.hpp"

using namespace varfrac;

namespace {

DiscreteOperator reference_operator(double s, double dx = 0.02) {
  auto g = std::make_shared<const Grid>(build_grid(DomainSpec::interval(0, 1), dx));
  return assemble(g, DomainFamily{}, FracParams(s, 1), CoefficientProfile::killing());
}

DiscreteOperator ball_radius_operator() {
  DomainFamily f;
  f.rule = DomainFamily::Rule::ball_radius;
  f.rho = {0.6, 0.5};
  auto g = std::make_shared<const Grid>(build_grid(DomainSpec::ball({0, 0}, 1.0), 0.15));
  return assemble(g, f, FracParams(0.5, 2), CoefficientProfile::killing());
}

// eigenvalue of smallest real part from an independent dense solve
double oracle_lambda(const DiscreteOperator& op) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(op.dense(), false).eigenvalues().real().minCoeff();
}

}  // namespace

TEST_CASE("diagonal operator: lambda is the smallest h") {
  const auto op = reference_operator(0.5).diagonal_only();
  EigenOptions o;
  o.run_oracle = false;
  const auto r = principal_eigen(op, o);
  Eigen::Index arg = 0;
  CHECK(r.lambda == doctest::Approx(op.h().minCoeff(&arg)).epsilon(1e-12));
  Eigen::Index peak = 0;
  r.phi.maxCoeff(&peak);
  CHECK(peak == arg);
}

TEST_CASE("principal eigenvalue matches the dense oracle") {
  for (const auto& op : {reference_operator(0.75), reference_operator(0.25), ball_radius_operator()}) {
    const auto r = principal_eigen(op);
    REQUIRE(r.converged);
    CHECK(std::abs(r.lambda / oracle_lambda(op) - 1.0) <= 1e-8);
    REQUIRE(r.oracle_lambda);
    CHECK(std::abs(*r.oracle_lambda / oracle_lambda(op) - 1.0) <= 1e-12);
    CHECK(r.min_phi > 0.0);
    CHECK(r.phi.maxCoeff() == doctest::Approx(1.0));
    const Eigen::VectorXd res = op.apply(r.phi) - r.lambda * r.phi;
    CHECK(res.cwiseAbs().maxCoeff() <= 1e-6 * r.lambda);
    const auto simple = check_simplicity(r, op);
    CHECK(simple.pass);
    CHECK(simple.multiplicity == 1);
    CHECK(simple.fit_residual <= 1e-8);
  }
}

TEST_CASE("scaling the operator scales lambda and keeps phi") {
  const auto op = reference_operator(0.5);
  const auto a = principal_eigen(op);
  const auto b = principal_eigen(op.scaled(2.0));
  CHECK(b.lambda == doctest::Approx(2.0 * a.lambda).epsilon(1e-10));
  CHECK((a.phi - b.phi).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("iteration is deterministic") {
  const auto op = ball_radius_operator();
  const auto a = principal_eigen(op);
  const auto b = principal_eigen(op);
  CHECK(a.lambda == b.lambda);
  CHECK(a.trace == b.trace);
  CHECK(a.phi == b.phi);
}

TEST_CASE("degenerate diagonal spectrum is flagged") {
  const auto base = reference_operator(0.5, 0.1);
  Eigen::VectorXd h = Eigen::VectorXd::LinSpaced(base.size(), 3.0, 10.0);
  h[base.size() - 1] = 3.0;
  const auto op = base.diagonal_only().with_h(h);
  SpectralResult r;
  r.lambda = 3.0;
  r.phi = Eigen::VectorXd::Zero(op.size());
  r.phi[0] = 1.0;
  const auto v = check_simplicity(r, op);
  CHECK_FALSE(v.pass);
  CHECK(v.multiplicity == 2);
}

TEST_CASE("probing the set of solvable shifts") {
  const auto op = reference_operator(0.75);
  const double lb = oracle_lambda(op);
  std::vector<double> grid;
  for (int k = 0; k <= 60; ++k) grid.push_back(1.5 * lb * k / 60.0);
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(op.size());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  Eigen::VectorXd g(op.size());
  for (auto& v : g) v = uni(rng);
  const auto pf = probe_E(op, f, grid);
  const auto pg = probe_E(op, g, grid);
  CHECK(pf.outcomes.front() == ProbeOutcome::solvable_positive);
  REQUIRE(pf.bracket);
  REQUIRE(pg.bracket);
  CHECK(pf.bracket->first < lb);
  CHECK(pf.bracket->second >= lb);
  CHECK(pf.bracket->first == pg.bracket->first);
  CHECK(pf.bracket->second == pg.bracket->second);
  CHECK(pf.monotone);
  // norms grow towards lambda
  for (std::size_t k = 1; k < grid.size() && grid[k] < lb; ++k) CHECK(pf.norms[k] >= pf.norms[k - 1]);
}

TEST_CASE("solves below the principal eigenvalue") {
  const auto op = reference_operator(0.5);
  const double lb = principal_eigen(op).lambda;
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(op.size());
  const Eigen::VectorXd plain = solve({&op, f});
  CHECK((solve_below_lambda(op, 0.0, f, lb) - plain).cwiseAbs().maxCoeff() <= 1e-12 * plain.maxCoeff());
  const Eigen::VectorXd u = solve_below_lambda(op, 0.5 * lb, f, lb);
  CHECK(u.minCoeff() > 0.0);
  const Eigen::MatrixXd m = op.dense() - 0.5 * lb * Eigen::MatrixXd::Identity(op.size(), op.size());
  const Eigen::VectorXd oracle = m.partialPivLu().solve(f);
  CHECK((u - oracle).cwiseAbs().maxCoeff() <= 1e-10 * oracle.cwiseAbs().maxCoeff());
  CHECK((m * u - f).cwiseAbs().maxCoeff() <= 1e-10 * f.maxCoeff() * m.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(solve_below_lambda(op, 1.1 * lb, f, lb), SpectralShiftError);
}
