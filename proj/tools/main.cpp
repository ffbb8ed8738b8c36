#include <CLI11.hpp>
#include <cstdio>

#include "alprox/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"alprox benchmark runner: constrained trajectory optimization "
               "with a primal-dual augmented Lagrangian solver"};
  app.require_subcommand(1);

  auto* list_cmd =
      app.add_subcommand("list", "list the runnable benchmark problems");

  alprox::runner::RunSpec spec;
  auto* run_cmd = app.add_subcommand(
      "run", "solve a named problem and write traces/results");
  run_cmd->add_option("problem", spec.problem_name, "registered problem name")
      ->required();
  run_cmd->add_option("--tol", spec.tolerance, "absolute KKT tolerance");
  run_cmd->add_option("--max-outer", spec.max_outer, "outer iteration cap");
  run_cmd->add_option("--max-inner", spec.max_inner,
                      "inner iterations per subproblem");
  run_cmd->add_option("--mu0", spec.mu0,
                      "initial penalty (internal step-size is 1/mu0)");
  run_cmd->add_option("--mui0", spec.mui0,
                      "initial inequality penalty (default: mu0)");
  run_cmd->add_option("--rho0", spec.rho0, "initial proximal weight");
  run_cmd->add_option("--solver", spec.solver, "ddp | stacked-nlp");
  run_cmd->add_option("--seed", spec.seed, "seed for randomized instances");
  run_cmd->add_option("--out", spec.out_path, "result document path (JSON)");
  run_cmd->add_option("--trace", spec.trace_path, "trace table path (CSV)");
  run_cmd->add_option("--plot-data", spec.plot_data_path,
                      "prefix for plot-data files");
  run_cmd->add_option("--config", spec.config_path,
                      "problem configuration file");

  CLI11_PARSE(app, argc, argv);

  if (list_cmd->parsed()) {
    for (const auto& info : alprox::runner::list_problems()) {
      std::printf("%-16s %s\n", info.name.c_str(), info.description.c_str());
    }
    return 0;
  }
  return alprox::runner::run(spec);
}
