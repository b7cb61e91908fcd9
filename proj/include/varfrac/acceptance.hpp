#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace varfrac {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  /// Configs whose operators must admit a barrier (criterion 4).
  std::vector<std::filesystem::path> configs;
};

constexpr int kCriterionCount = 10;

/// Runs one criterion; exceptions are caught and reported as failures.
CriterionResult run_criterion(int id, const AcceptanceOptions& options);

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

/// All `*.ini` files in a directory, sorted.
std::vector<std::filesystem::path> list_configs(const std::filesystem::path& dir);

/// Pure-space full fractional Laplacian (no normalising constant) of a polynomial supported
/// on [a, b] and extended by zero, evaluated by a closed form near the diagonal plus adaptive
/// Gauss-Kronrod quadrature. Exposed for tests.
struct PiecewisePolynomial {
  double a = -1.0;
  double b = 1.0;
  /// Zero orders at the two ends: phi(y) = (y - a)^m (b - y)^m q(y) on (a, b). Evaluating in
  /// this factored form keeps values near the ends free of cancellation noise, which the
  /// singular kernel would otherwise amplify.
  int edge_order = 0;
  /// Monomial coefficients of q in y.
  std::vector<double> cofactor;

  double operator()(double y) const;
  double derivative(double y, int order) const;
};

double full_fractional_laplacian_1d(const PiecewisePolynomial& phi, double x, double s);

/// Polynomial (1 - ((y-c)/r)^2)^k times (1 + slope (y - c)) supported on [c-r, c+r].
PiecewisePolynomial bump_polynomial(double c, double r, int k, double slope = 0.0);

}  // namespace varfrac
