// Runs every acceptance criterion and prints one PASS/FAIL line each.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "varfrac/acceptance.hpp"

int main(int argc, char** argv) {
  varfrac::AcceptanceOptions options;
  options.configs = varfrac::list_configs(VARFRAC_CONFIG_DIR);
  int failures = 0;
  auto print = [&](const varfrac::CriterionResult& r) {
    if (!r.pass) ++failures;
    std::printf("[%s] criterion %2d  %-44s %7.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
  };
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) print(varfrac::run_criterion(std::atoi(argv[i]), options));
  } else {
    varfrac::run_acceptance(options, print);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
