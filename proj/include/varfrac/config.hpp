#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "varfrac/geometry.hpp"
#include "varfrac/operator.hpp"
#include "varfrac/parabolic.hpp"

namespace varfrac {

/// Sectioned `key = value` text. `#` and `;` start comments. Every key that is read is
/// marked; reject_unknown() fails on whatever was never consumed.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueFile load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double number(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  long long integer(const std::string& section, const std::string& key, long long fallback) const;
  bool boolean(const std::string& section, const std::string& key, bool fallback) const;
  void reject_unknown() const;

  const std::string& origin() const { return origin_; }
  const std::string& text() const { return text_; }

 private:
  std::string origin_;
  std::string text_;
  std::map<std::string, std::map<std::string, std::string>> values_;
  mutable std::map<std::string, std::map<std::string, bool>> used_;
};

/// Nodal law for forcing and initial data: value * d^exponent (exponent 0 gives a constant).
struct NodalLaw {
  enum class Kind { zero, constant, power, stationary };
  Kind kind = Kind::constant;
  double value = 1.0;
  double exponent = 0.0;

  Eigen::VectorXd sample(const Eigen::VectorXd& dist) const;
};

struct ExperimentConfig {
  std::string source;
  std::string text;

  DomainSpec domain;
  DomainFamily family;
  FracParams params;
  CoefficientProfile profile;

  NodalLaw forcing;
  double eta_f = 0.0;
  NodalLaw initial;
  double eta_1 = 0.0;
  double lambda = 0.0;
  DataDecay h_decay;
  DataDecay f_decay;
  double horizon = 1.0;
  bool run_to_steady = false;

  double dx = 0.0;
  double dt = 1e-2;
  double eig_tol = 1e-13;
  double t_max = 100.0;
  int max_stamps = 200;
  std::uint64_t seed = 1;
  double density_rho0 = 0.0;

  std::filesystem::path output_dir = ".";
  std::string manifest_name = "manifest.json";

  /// FNV-1a of the config text, hex.
  std::string hash() const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Grid, operator and data built from a config, with the load-time certificates.
struct Experiment {
  ExperimentConfig config;
  std::shared_ptr<const Grid> grid;
  std::unique_ptr<DiscreteOperator> op;
  Eigen::VectorXd forcing;

  const DiscreteOperator& A() const { return *op; }
  /// Problem for the parabolic module with the configured data.
  ParabolicProblem parabolic(const Eigen::VectorXd& stationary) const;
};

/// Builds the grid and operator and re-verifies the declared certificates (Sigma density,
/// forcing growth exponent, coefficient bounds). Throws ConfigError on a failed certificate.
Experiment build_experiment(const ExperimentConfig& config);

}  // namespace varfrac
