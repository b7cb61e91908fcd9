// Experiment runner: one subcommand per check, CSV out, manifest first.
#include <CLI11.hpp>
#include <iostream>

#include "varfrac/experiment.hpp"
#include "varfrac/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"varfrac - variable-domain nonlocal operators: assembly, solvers and checks"};
  app.set_version_flag("--version", varfrac::version_string());
  app.require_subcommand(1);

  varfrac::CommandOptions o;
  auto with_config = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "experiment config (sectioned key = value)")->required();
    sub->add_option("--out", o.out, "output CSV (default: <outputs.dir>/<command>.csv)");
    return sub;
  };
  with_config(app.add_subcommand("validate-geometry", "check the domain-family assumptions"));
  with_config(app.add_subcommand("assemble", "assemble A and export coordinate triplets"));
  with_config(app.add_subcommand("solve-elliptic", "solve (A - lambda) u = f and build a barrier"));
  with_config(app.add_subcommand("eig", "principal eigenvalue with dense-oracle cross-check"));
  auto* probe = with_config(app.add_subcommand("probe-e", "solvability sweep over lambda"));
  probe->add_option("--lambda-min", o.lambda_min, "first lambda (default 0)");
  probe->add_option("--lambda-max", o.lambda_max, "last lambda (default 1.5 lambda_bar)");
  probe->add_option("--steps", o.steps, "number of lambda intervals")->check(CLI::PositiveNumber);
  with_config(app.add_subcommand("solve-parabolic", "implicit-Euler evolution toward the steady state"));
  auto* decay = with_config(app.add_subcommand("decay-rate", "fit the long-time decay rate"));
  decay->add_option("--window", o.window, "fit window t0:t1")->required();
  auto* sc = app.add_subcommand("supconv", "sup/inf-convolution of sampled data");
  sc->add_option("--eps", o.eps, "penalty parameter")->required();
  sc->add_option("--in", o.in, "CSV: coordinate columns then a value column")->required();
  sc->add_option("--out", o.out, "output CSV");
  with_config(app.add_subcommand("verify-all", "run the full acceptance suite"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : varfrac::kExitConfig;
  }
  o.command = app.get_subcommands().front()->get_name();
  return varfrac::run_command(o, std::cout, std::cerr);
}
