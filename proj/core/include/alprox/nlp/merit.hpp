/// @file merit.hpp
/// @brief Lagrangian, KKT residuals and the proximal primal-dual augmented
///        Lagrangian merit function with its gradient.
#pragma once

#include "alprox/nlp/problem.hpp"

namespace alprox::nlp {

/// f(x) + lam^T c(x) + nu^T h(x).
double lagrangian(const NlpProblem& prob, const VectorXd& x,
                  const VectorXd& lam, const VectorXd& nu);

struct KktResiduals {
  double dual_inf = 0.0;    // || grad_x L ||_inf
  double primal_inf = 0.0;  // || (c, [h]_+) ||_inf
};

KktResiduals kkt_residuals(const NlpProblem& prob, const VectorXd& x,
                           const VectorXd& lam, const VectorXd& nu);

/// || (c(x), [h(x)]_+) ||_inf.
double primal_infeasibility(const NlpProblem& prob, const VectorXd& x);

struct ShiftedMultipliers {
  VectorXd lam_hat;  // lam_l + c(x)/mu_e
  VectorXd nu_hat;   // [nu_l + h(x)/mu_i]_+
};

ShiftedMultipliers shifted_multipliers(const NlpProblem& prob,
                                       const VectorXd& x,
                                       const VectorXd& lam_l,
                                       const VectorXd& nu_l, double mu_e,
                                       double mu_i);

/// First-order optimal slack [h(x) + mu_i nu_l]_-; nonpositive by
/// construction.
VectorXd shifted_slack(const NlpProblem& prob, const VectorXd& x,
                       const VectorXd& nu_l, double mu_i);

/// Rows with nu_l[j] + h_j(x)/mu_i >= 0, boundary included.
ActiveSet active_set(const NlpProblem& prob, const VectorXd& x,
                     const VectorXd& nu_l, double mu_i);

/// Proximal primal-dual merit
///   M(x, lam, nu) = f(x)
///     + 1/(2 mu_e) ( ||c + mu_e lam_l||^2 + ||c + mu_e (lam_l - lam)||^2 )
///     + 1/(2 mu_i) ( ||[h + mu_i nu_l]_+||^2
///                  + ||[h + mu_i nu_l]_+ - mu_i nu||^2 )
///     + rho/2 ||x - x_l||^2,
/// with estimates (lam_l, nu_l) and center x_l taken from iterate_center.
double merit_value(const NlpProblem& prob, const VectorXd& x,
                   const VectorXd& lam, const VectorXd& nu,
                   const NlpIterate& iterate_center, const PenaltyState& pen);

/// Gradient of merit_value in (x, lam, nu), stacked as one vector of size
/// n + ne + ni. The dual blocks are mu_e (lam - lam_hat) and
/// mu_i (nu - nu_hat).
VectorXd merit_gradient(const NlpProblem& prob, const VectorXd& x,
                        const VectorXd& lam, const VectorXd& nu,
                        const NlpIterate& iterate_center,
                        const PenaltyState& pen);

struct RlResidual {
  VectorXd r;  // stacked (grad_x L + rho (x - x_l); mu_e (lam_hat - lam);
               //          mu_i (nu_hat - nu))
  double norm = 0.0;
};

/// Subproblem optimality measure; the inner loop exits once
/// norm <= omega_l.
RlResidual rl_residual(const NlpProblem& prob, const VectorXd& x,
                       const VectorXd& lam, const VectorXd& nu,
                       const NlpIterate& iterate_center,
                       const PenaltyState& pen);

}  // namespace alprox::nlp
