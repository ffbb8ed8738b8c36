#include "alprox/trace.hpp"

#include <fmt/format.h>

#include <ostream>

namespace alprox {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::MaxIters:
      return "max_iters";
    case SolveStatus::LineSearchFailure:
      return "line_search_failure";
  }
  return "unknown";
}

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = {
      "outer_iter", "inner_iter", "merit", "primal_inf",
      "dual_inf",   "mu_e",       "mu_i",  "rho",
      "alpha",      "active_set_size",     "reg_delta"};
  return cols;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace,
                     const std::vector<std::string>& header_comments) {
  for (const auto& line : header_comments) {
    os << "# " << line << '\n';
  }
  const auto& cols = trace_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    os << cols[i] << (i + 1 < cols.size() ? "," : "\n");
  }
  for (const auto& r : trace) {
    os << fmt::format("{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},"
                      "{:.16e},{},{:.16e}\n",
                      r.outer_iter, r.inner_iter, r.merit, r.primal_inf,
                      r.dual_inf, r.mu_e, r.mu_i, r.rho, r.alpha,
                      r.active_set_size, r.reg_delta);
  }
}

}  // namespace alprox
