#include <doctest.h>

#include <cmath>
#include <random>

#include "varfrac/vistools.hpp"

using namespace varfrac;

namespace {

SampleLattice line(int n = 201) { return {{n}, {-1.0}, {2.0 / (n - 1)}}; }

Eigen::VectorXd sample(const SampleLattice& l, double (*f)(double)) {
  Eigen::VectorXd u(l.size());
  for (int i = 0; i < l.size(); ++i) u[i] = f(l.point(i)[0]);
  return u;
}

}  // namespace

TEST_CASE("lattice indexing") {
  const SampleLattice l{{4, 3}, {0.0, 1.0}, {0.5, 0.25}};
  CHECK(l.size() == 12);
  CHECK(l.point(5)[0] == doctest::Approx(0.5));
  CHECK(l.point(5)[1] == doctest::Approx(1.25));
  CHECK(l.neighbour(5, 0, 1) == 6);
  CHECK(l.neighbour(5, 1, 1) == 9);
  CHECK(l.neighbour(3, 0, 1) == -1);
  CHECK(l.distance2(0, 5) == doctest::Approx(0.25 + 0.0625));
}

TEST_CASE("constants are preserved") {
  const auto l = line(51);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(l.size(), 2.5);
  const auto sup = sup_convolve(l, u, 0.1);
  const auto inf = inf_convolve(l, u, 0.1);
  for (int i = 0; i < l.size(); ++i) {
    CHECK(sup.values[i] == 2.5);
    CHECK(inf.values[i] == 2.5);
    CHECK(sup.arg[i] == i);
  }
}

TEST_CASE("quadratic envelope") {
  const auto l = line();
  const Eigen::VectorXd u = sample(l, [](double x) { return -x * x; });
  const double eps = 0.1;
  const auto r = sup_convolve(l, u, eps);
  int i = 0;
  for (; i < l.size(); ++i)
    if (std::abs(l.point(i)[0] - 0.5) < 1e-12) break;
  REQUIRE(i < l.size());
  // continuum maximiser y = x / (1 + eps), value -x^2 / (1 + eps); the lattice misses y by at
  // most half a cell, costing at most (1 + 1/eps) (h/2)^2
  const double h = l.spacing[0];
  CHECK(r.values[i] <= -0.25 / 1.1 + 1e-15);
  CHECK(r.values[i] >= -0.25 / 1.1 - (1 + 1 / eps) * h * h / 4);
  const auto [worst, bound] = control_estimate(l, r, u);
  CHECK(worst <= bound);
  CHECK(semiconvexity_check(l, r).pass);
}

TEST_CASE("inf-convolution equals direct minimisation and lies below u") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const SampleLattice l{{21, 17}, {0.0, 0.0}, {0.05, 0.0625}};
  Eigen::VectorXd u(l.size());
  for (auto& v : u) v = uni(rng);
  for (double eps : {0.1, 0.01}) {
    const auto a = inf_convolve(l, u, eps);
    const auto b = inf_convolve_direct(l, u, eps);
    CHECK(a.values == b.values);
    CHECK((a.values.array() <= u.array()).all());
  }
}

TEST_CASE("kink") {
  const auto l = line();
  const Eigen::VectorXd u = sample(l, [](double x) { return -std::abs(x); });
  for (double eps : {0.1, 0.01}) {
    const auto r = sup_convolve(l, u, eps);
    const auto v = semiconvexity_check(l, r);
    CHECK(v.pass);
    // near 0 the envelope is -x^2/eps: second differences equal -2/eps
    CHECK(v.min_second_difference == doctest::Approx(-2.0 / eps).epsilon(1e-9));
  }
}

TEST_CASE("noise") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const auto l = line();
  Eigen::VectorXd u(l.size());
  for (auto& v : u) v = uni(rng);
  for (double eps : {0.1, 0.01, 0.001}) {
    const auto r = sup_convolve(l, u, eps);
    CHECK(semiconvexity_check(l, r).pass);
    const auto [worst, bound] = control_estimate(l, r, u);
    CHECK(worst <= bound);
    CHECK((r.values.array() >= u.array()).all());
  }
}
