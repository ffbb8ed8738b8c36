/// @file runner.hpp
/// @brief Benchmark runner behind the command-line tool: problem registry,
///        solver dispatch, and result/trace/plot-data emission.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alprox/trajopt/solver.hpp"

namespace alprox::runner {

struct RunSpec {
  std::string problem_name;
  std::string solver = "ddp";  // "ddp" or "stacked-nlp"
  double tolerance = 1e-8;
  int max_outer = 100;
  /// Per-subproblem step cap. Small caps interleave BCL multiplier
  /// updates with the semi-smooth iterations, which speeds up active-set
  /// discovery on long horizons.
  int max_inner = 20;
  /// Initial penalty in the experiment convention; the internal step-size
  /// is its reciprocal (mu_e = 1/mu0).
  double mu0 = 100.0;
  /// Separate inequality penalty; 0 means "same as mu0".
  double mui0 = 0.0;
  double rho0 = 1e-6;
  std::uint64_t seed = 0;
  std::string out_path;        // structured result document (JSON)
  std::string trace_path;      // delimited trace table
  std::string plot_data_path;  // prefix for per-figure plot files
  std::string config_path;     // optional problem config overrides
};

struct ProblemInfo {
  std::string name;
  std::string description;
};

/// Stable, deterministic listing of the runnable problems.
const std::vector<ProblemInfo>& list_problems();

struct BuiltProblem {
  trajopt::TrajOptProblem problem;
  VectorXd u_bar;    // control bounds for the plot files (may be empty)
  double dt = 1.0;   // time step for the plot files
};

/// Constructs a registered problem; throws std::out_of_range for unknown
/// names and ConfigError for bad config files.
BuiltProblem build_problem(const RunSpec& spec);

/// BCL parameters as the runner derives them from a run specification
/// (tolerance, penalty conversion, iteration caps).
nlp::BclParams bcl_from_spec(const RunSpec& spec);

/// Exit codes: 0 success, 1 solver failure (partial outputs written),
/// 2 unknown problem or invalid spec.
int run(const RunSpec& spec);

}  // namespace alprox::runner
