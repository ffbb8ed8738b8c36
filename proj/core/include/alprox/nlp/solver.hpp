/// @file solver.hpp
/// @brief Inner semi-smooth Newton loop and BCL outer loop of the
///        primal-dual augmented Lagrangian method.
#pragma once

#include "alprox/kkt/saddle.hpp"
#include "alprox/nlp/merit.hpp"
#include "alprox/nlp/problem.hpp"

namespace alprox::nlp {

struct NewtonStep {
  VectorXd dx;
  VectorXd dlam;
  VectorXd dnu;  // full size; inactive rows carry -nu_j
  kkt::InertiaRecord inertia;
  int active_size = 0;
  bool ok = false;
};

/// One primal-dual Newton step on the current subproblem, solving the
/// saddle system with the shifted active set at x. delta_hint carries the
/// regularization warm start between calls.
NewtonStep pd_newton_step(const NlpProblem& prob, const VectorXd& x,
                          const VectorXd& lam, const VectorXd& nu,
                          const NlpIterate& iterate_center,
                          const PenaltyState& pen, HessianMode hess_mode,
                          const kkt::RegParams& reg, double& delta_hint);

struct InnerResult {
  VectorXd x;
  VectorXd lam;
  VectorXd nu;
  int iters = 0;
  double rl_norm = 0.0;
  bool reached_tol = false;
  bool line_search_failure = false;
};

/// Minimizes the proximal primal-dual merit from the center point until
/// ||r_l||_inf <= pen.omega_l or an iteration/step-size limit.
/// Accepted steps are appended to trace when it is non-null.
InnerResult inner_solve(const NlpProblem& prob,
                        const NlpIterate& iterate_center,
                        const PenaltyState& pen, const LineSearchParams& ls,
                        HessianMode hess_mode, int max_inner_iters,
                        double& delta_hint,
                        std::vector<TraceRecord>* trace = nullptr,
                        int outer_iter = 0, int inner_iter_base = 0);

struct MultiplierUpdate {
  VectorXd lam_next;  // 2 lam_hat(x_new, lam_l) - lam_tilde
  VectorXd nu_next;   // [2 nu_hat(x_new, nu_l) - nu_tilde]_+
};

MultiplierUpdate multiplier_update(const NlpProblem& prob,
                                   const VectorXd& x_new,
                                   const VectorXd& lam_tilde,
                                   const VectorXd& nu_tilde,
                                   const VectorXd& lam_l,
                                   const VectorXd& nu_l, double mu_e,
                                   double mu_i);

/// BCL tolerance/penalty schedule. `accepted_multipliers` is the
/// eta_{l+1} < eps_l branch.
PenaltyState bcl_update(const PenaltyState& pen, const BclParams& bcl,
                        double eta_next, bool accepted_multipliers);

SolveReport solve(const NlpProblem& prob, const VectorXd& x0,
                  const VectorXd& lam0, const VectorXd& nu0,
                  const BclParams& bcl, const LineSearchParams& ls,
                  HessianMode hess_mode, NlpIterate* solution = nullptr);

}  // namespace alprox::nlp
