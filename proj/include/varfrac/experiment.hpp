#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace varfrac {

/// Process exit codes of the experiment runner.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2, kExitAcceptance = 3 };

struct CommandOptions {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out;
  std::filesystem::path in;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  int steps = 100;
  /// "t0:t1" for decay-rate.
  std::string window;
  double eps = 0.0;
};

/// Runs one subcommand. Library errors are mapped to exit codes and reported on `err` as a
/// single machine-readable line: `error code=<n> kind=<kind> message="<text>"`.
int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace varfrac
