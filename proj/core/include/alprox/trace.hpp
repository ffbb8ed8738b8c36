/// @file trace.hpp
/// @brief Per-iteration convergence records shared by both solvers.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace alprox {

enum class SolveStatus : std::uint8_t {
  Converged,
  MaxIters,
  LineSearchFailure,
};

const char* to_string(SolveStatus status);

/// One accepted inner step. Field order matches the trace-table columns.
struct TraceRecord {
  int outer_iter = 0;
  int inner_iter = 0;
  double merit = 0.0;
  double primal_inf = 0.0;
  double dual_inf = 0.0;
  double mu_e = 0.0;
  double mu_i = 0.0;
  double rho = 0.0;
  double alpha = 0.0;
  int active_set_size = 0;
  double reg_delta = 0.0;
};

/// Column names, in declared order, for the delimited trace table.
const std::vector<std::string>& trace_columns();

/// Writes the comma-delimited trace table. Extra header_comment lines (if
/// any) are emitted first, prefixed with '#'.
void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace,
                     const std::vector<std::string>& header_comments = {});

}  // namespace alprox
