/// @file problem.hpp
/// @brief Generic NLP problem data and solver parameter types.
#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "alprox/math.hpp"
#include "alprox/trace.hpp"

namespace alprox::nlp {

/// How the primal Hessian block of the Newton systems is formed.
///   Exact       : eval_lag_hess with the shifted multiplier estimates
///   GaussNewton : eval_lag_hess with zero multipliers (constraint
///                 curvature dropped)
///   Identity    : identity matrix, no callback needed
enum class HessianMode { Exact, GaussNewton, Identity };

/// min f(x)  s.t.  c(x) = 0,  h(x) <= 0.
///
/// Evaluators must be pure and return outputs matching (n, ne, ni).
/// eval_c / eval_Jc may be empty when ne == 0, likewise for inequalities.
struct NlpProblem {
  int n = 0;
  int ne = 0;
  int ni = 0;

  std::function<double(const VectorXd&)> eval_f;
  std::function<VectorXd(const VectorXd&)> eval_c;
  std::function<VectorXd(const VectorXd&)> eval_h;
  std::function<VectorXd(const VectorXd&)> eval_grad_f;
  std::function<MatrixXd(const VectorXd&)> eval_Jc;
  std::function<MatrixXd(const VectorXd&)> eval_Jh;
  /// Hessian of f + lam^T c + nu^T h at x.
  std::function<MatrixXd(const VectorXd&, const VectorXd&, const VectorXd&)>
      eval_lag_hess;

  VectorXd c(const VectorXd& x) const;
  VectorXd h(const VectorXd& x) const;
  MatrixXd Jc(const VectorXd& x) const;
  MatrixXd Jh(const VectorXd& x) const;
  MatrixXd lag_hess(const VectorXd& x, const VectorXd& lam,
                    const VectorXd& nu, HessianMode mode) const;

  void validate_point(const VectorXd& x, const VectorXd& lam,
                      const VectorXd& nu) const;
};

/// Primal-dual point plus the proximal center of the current subproblem.
struct NlpIterate {
  VectorXd x;
  VectorXd lam;
  VectorXd nu;
  VectorXd x_prev;

  static NlpIterate zero(const NlpProblem& prob);
};

/// Penalty step-sizes and the running BCL tolerances.
struct PenaltyState {
  double mu_e = 1e-2;
  double mu_i = 1e-2;
  double rho = 1e-6;
  double omega_l = 1.0;  // inner (dual) tolerance
  double eps_l = 1.0;    // primal feasibility tolerance
  double eta_l = 0.0;    // last measured primal infeasibility
};

/// BCL globalization hyper-parameters (Algorithm inputs).
struct BclParams {
  double mu_f = 0.1;        // penalty decrease factor, < 1
  double alpha_bcl = 0.1;   // in (0, 1)
  double beta_bcl = 0.9;    // in (0, 1)
  double mu_e_floor = 1e-9;
  double mu_i_floor = 1e-9;
  double eps_abs = 1e-8;
  double omega0 = 1.0;
  double eps0 = 1.0;
  double mu_e_init = 1e-2;
  double mu_i_init = 1e-2;
  double rho_init = 1e-6;
  int max_outer_iters = 100;
  int max_inner_iters = 200;

  void validate() const;
};

struct LineSearchParams {
  double c1 = 1e-4;
  double backtrack_factor = 0.5;
  double alpha_min = 1e-7;
};

/// Shifted active set of the current subproblem: rows j with
/// nu_l[j] + h_j(x)/mu_i >= 0 (boundary included). Indices are sorted,
/// 0-based, duplicate-free.
struct ActiveSet {
  std::vector<int> indices;

  bool contains(int j) const;
  int size() const { return static_cast<int>(indices.size()); }
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIters;
  int outer_iters = 0;
  int total_inner_iters = 0;
  double dual_residual = 0.0;
  double primal_infeasibility = 0.0;
  std::vector<TraceRecord> trace;
};

}  // namespace alprox::nlp
