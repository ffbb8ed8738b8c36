#include "alprox/nlp/solver.hpp"

#include <cmath>

namespace alprox::nlp {

NewtonStep pd_newton_step(const NlpProblem& prob, const VectorXd& x,
                          const VectorXd& lam, const VectorXd& nu,
                          const NlpIterate& iterate_center,
                          const PenaltyState& pen, HessianMode hess_mode,
                          const kkt::RegParams& reg, double& delta_hint) {
  prob.validate_point(x, lam, nu);
  const int n = prob.n;
  const int ne = prob.ne;
  const ActiveSet act = active_set(prob, x, iterate_center.nu, pen.mu_i);
  const int na = act.size();

  const ShiftedMultipliers sm = shifted_multipliers(
      prob, x, iterate_center.lam, iterate_center.nu, pen.mu_e, pen.mu_i);

  // Hessian of the Lagrangian at the shifted multipliers; inactive rows
  // carry no curvature weight.
  VectorXd nu_weight = VectorXd::Zero(prob.ni);
  for (int j : act.indices) nu_weight(j) = 2.0 * sm.nu_hat(j) - nu(j);
  const VectorXd lam_weight =
      ne > 0 ? VectorXd(2.0 * sm.lam_hat - lam) : VectorXd(0);

  kkt::SaddleSystem sys;
  sys.H = prob.lag_hess(x, lam_weight, nu_weight, hess_mode);
  check_dim(sys.H.rows(), n, "lag_hess rows");
  check_dim(sys.H.cols(), n, "lag_hess cols");
  if (pen.rho > 0.0) sys.H.diagonal().array() += pen.rho;
  sys.mu_e = pen.mu_e;
  sys.mu_i = pen.mu_i;

  const MatrixXd jh = prob.Jh(x);
  const VectorXd h = prob.h(x);
  sys.Jeq = prob.Jc(x);
  sys.Jineq_active.resize(na, n);
  for (int i = 0; i < na; ++i) sys.Jineq_active.row(i) = jh.row(act.indices[i]);

  VectorXd grad_x = prob.eval_grad_f(x);
  if (pen.rho > 0.0) grad_x += pen.rho * (x - iterate_center.x_prev);
  if (ne > 0) grad_x.noalias() += sys.Jeq.transpose() * lam;
  for (int i = 0; i < na; ++i) {
    grad_x.noalias() += sys.Jineq_active.row(i).transpose() * nu(act.indices[i]);
  }

  sys.rhs.resize(n + ne + na, 1);
  sys.rhs.col(0).head(n) = -grad_x;
  if (ne > 0) {
    sys.rhs.col(0).segment(n, ne) =
        -(prob.c(x) + pen.mu_e * (iterate_center.lam - lam));
  }
  for (int i = 0; i < na; ++i) {
    const int j = act.indices[i];
    sys.rhs(n + ne + i, 0) =
        -(h(j) + pen.mu_i * (iterate_center.nu(j) - nu(j)));
  }

  const kkt::SaddleSolution sol = kkt::regularize_and_solve(sys, reg, delta_hint);

  NewtonStep step;
  step.inertia = sol.inertia;
  step.active_size = na;
  step.ok = sol.factor_ok;
  if (!sol.factor_ok) return step;

  step.dx = sol.x.col(0).head(n);
  step.dlam = sol.x.col(0).segment(n, ne);
  step.dnu = -nu;  // inactive multipliers are driven to zero
  for (int i = 0; i < na; ++i) {
    step.dnu(act.indices[i]) = sol.x(n + ne + i, 0);
  }
  return step;
}

InnerResult inner_solve(const NlpProblem& prob,
                        const NlpIterate& iterate_center,
                        const PenaltyState& pen, const LineSearchParams& ls,
                        HessianMode hess_mode, int max_inner_iters,
                        double& delta_hint, std::vector<TraceRecord>* trace,
                        int outer_iter, int inner_iter_base) {
  InnerResult res;
  res.x = iterate_center.x;
  res.lam = iterate_center.lam;
  res.nu = iterate_center.nu;

  RlResidual rl =
      rl_residual(prob, res.x, res.lam, res.nu, iterate_center, pen);
  res.rl_norm = rl.norm;
  if (rl.norm <= pen.omega_l) {
    res.reached_tol = true;
    return res;
  }

  double merit =
      merit_value(prob, res.x, res.lam, res.nu, iterate_center, pen);
  const kkt::RegParams reg;

  for (int it = 0; it < max_inner_iters; ++it) {
    NewtonStep step = pd_newton_step(prob, res.x, res.lam, res.nu,
                                     iterate_center, pen, hess_mode, reg,
                                     delta_hint);
    if (!step.ok) {
      res.line_search_failure = true;
      return res;
    }

    const VectorXd grad = merit_gradient(prob, res.x, res.lam, res.nu,
                                         iterate_center, pen);
    double slope = grad.head(prob.n).dot(step.dx);
    if (prob.ne > 0) slope += grad.segment(prob.n, prob.ne).dot(step.dlam);
    if (prob.ni > 0) slope += grad.tail(prob.ni).dot(step.dnu);

    // nonnegative slopes beyond round-off mean wrong curvature; force more
    // regularization and retry once before giving up
    const double slope_noise = 1e-13 * (1.0 + std::abs(merit));
    if (slope >= slope_noise) {
      delta_hint = std::max(delta_hint * 100.0, 1e-4);
      step = pd_newton_step(prob, res.x, res.lam, res.nu, iterate_center,
                            pen, hess_mode, reg, delta_hint);
      if (!step.ok) {
        res.line_search_failure = true;
        return res;
      }
      const VectorXd grad2 = merit_gradient(prob, res.x, res.lam, res.nu,
                                            iterate_center, pen);
      slope = grad2.head(prob.n).dot(step.dx) +
              (prob.ne > 0 ? grad2.segment(prob.n, prob.ne).dot(step.dlam)
                           : 0.0) +
              (prob.ni > 0 ? grad2.tail(prob.ni).dot(step.dnu) : 0.0);
      if (slope >= slope_noise) {
        res.line_search_failure = true;
        return res;
      }
    }
    slope = std::min(slope, 0.0);

    // Armijo backtracking on the merit; the noise term keeps the test
    // meaningful once decreases reach round-off scale
    const double noise = 10.0 * 2.2e-16 * (1.0 + std::abs(merit));
    double alpha = 1.0;
    double trial_merit = 0.0;
    VectorXd x_trial, lam_trial, nu_trial;
    while (true) {
      x_trial = res.x + alpha * step.dx;
      lam_trial = res.lam + alpha * step.dlam;
      nu_trial = res.nu + alpha * step.dnu;
      trial_merit =
          merit_value(prob, x_trial, lam_trial, nu_trial, iterate_center, pen);
      if (trial_merit <= merit + ls.c1 * alpha * slope + noise) break;
      alpha *= ls.backtrack_factor;
      if (alpha < ls.alpha_min) {
        res.line_search_failure = true;
        return res;
      }
    }

    res.x = x_trial;
    res.lam = lam_trial;
    res.nu = nu_trial;
    merit = trial_merit;
    res.iters = it + 1;

    rl = rl_residual(prob, res.x, res.lam, res.nu, iterate_center, pen);
    res.rl_norm = rl.norm;

    if (trace != nullptr) {
      const KktResiduals kr = kkt_residuals(prob, res.x, res.lam, res.nu);
      TraceRecord rec;
      rec.outer_iter = outer_iter;
      rec.inner_iter = inner_iter_base + res.iters;
      rec.merit = merit;
      rec.primal_inf = kr.primal_inf;
      rec.dual_inf = kr.dual_inf;
      rec.mu_e = pen.mu_e;
      rec.mu_i = pen.mu_i;
      rec.rho = pen.rho;
      rec.alpha = alpha;
      rec.active_set_size = step.active_size;
      rec.reg_delta = step.inertia.delta;
      trace->push_back(rec);
    }

    if (rl.norm <= pen.omega_l) {
      res.reached_tol = true;
      return res;
    }
  }
  return res;
}

MultiplierUpdate multiplier_update(const NlpProblem& prob,
                                   const VectorXd& x_new,
                                   const VectorXd& lam_tilde,
                                   const VectorXd& nu_tilde,
                                   const VectorXd& lam_l,
                                   const VectorXd& nu_l, double mu_e,
                                   double mu_i) {
  const ShiftedMultipliers sm =
      shifted_multipliers(prob, x_new, lam_l, nu_l, mu_e, mu_i);
  MultiplierUpdate out;
  out.lam_next =
      prob.ne > 0 ? VectorXd(2.0 * sm.lam_hat - lam_tilde) : VectorXd(0);
  out.nu_next = prob.ni > 0 ? positive_part(2.0 * sm.nu_hat - nu_tilde)
                            : VectorXd(0);
  return out;
}

PenaltyState bcl_update(const PenaltyState& pen, const BclParams& bcl,
                        double eta_next, bool accepted_multipliers) {
  PenaltyState next = pen;
  next.eta_l = eta_next;
  if (accepted_multipliers) {
    next.eps_l = pen.eps_l * std::pow(pen.mu_i, bcl.beta_bcl);
    next.omega_l = pen.omega_l * pen.mu_i;
  } else {
    next.mu_i = std::max(bcl.mu_i_floor, bcl.mu_f * pen.mu_i);
    next.mu_e = std::max(bcl.mu_e_floor, bcl.mu_f * pen.mu_e);
    next.eps_l = bcl.eps0 * std::pow(next.mu_i, bcl.alpha_bcl);
    next.omega_l = bcl.omega0 * next.mu_i;
  }
  return next;
}

SolveReport solve(const NlpProblem& prob, const VectorXd& x0,
                  const VectorXd& lam0, const VectorXd& nu0,
                  const BclParams& bcl, const LineSearchParams& ls,
                  HessianMode hess_mode, NlpIterate* solution) {
  bcl.validate();
  prob.validate_point(x0, lam0, nu0);

  SolveReport report;
  NlpIterate center{x0, lam0, nu0, x0};
  PenaltyState pen;
  pen.mu_e = bcl.mu_e_init;
  pen.mu_i = bcl.mu_i_init;
  pen.rho = bcl.rho_init;
  pen.omega_l = bcl.omega0;
  pen.eps_l = bcl.eps0;
  pen.eta_l = primal_infeasibility(prob, x0);

  double delta_hint = 0.0;

  KktResiduals kr = kkt_residuals(prob, center.x, center.lam, center.nu);
  if (kr.dual_inf <= bcl.eps_abs && kr.primal_inf <= bcl.eps_abs) {
    report.status = SolveStatus::Converged;
  } else {
    for (int l = 0; l < bcl.max_outer_iters; ++l) {
      const InnerResult inner = inner_solve(
          prob, center, pen, ls, hess_mode, bcl.max_inner_iters, delta_hint,
          &report.trace, l, report.total_inner_iters);
      report.total_inner_iters += inner.iters;
      report.outer_iters = l + 1;

      if (inner.line_search_failure) {
        center.x = inner.x;
        report.status = SolveStatus::LineSearchFailure;
        break;
      }

      const double eta_next = primal_infeasibility(prob, inner.x);
      const bool accepted = eta_next < pen.eps_l;
      if (accepted) {
        const MultiplierUpdate mu =
            multiplier_update(prob, inner.x, inner.lam, inner.nu, center.lam,
                              center.nu, pen.mu_e, pen.mu_i);
        center.lam = mu.lam_next;
        center.nu = mu.nu_next;
      }
      center.x = inner.x;
      center.x_prev = inner.x;
      pen = bcl_update(pen, bcl, eta_next, accepted);
      // clamp the subproblem tolerances at the target accuracy
      pen.omega_l = std::max(pen.omega_l, bcl.eps_abs);
      pen.eps_l = std::max(pen.eps_l, bcl.eps_abs);

      kr = kkt_residuals(prob, center.x, center.lam, center.nu);
      if (kr.dual_inf <= bcl.eps_abs && kr.primal_inf <= bcl.eps_abs) {
        report.status = SolveStatus::Converged;
        break;
      }
    }
    kr = kkt_residuals(prob, center.x, center.lam, center.nu);
  }

  report.dual_residual = kr.dual_inf;
  report.primal_infeasibility = kr.primal_inf;
  if (solution != nullptr) *solution = center;
  return report;
}

}  // namespace alprox::nlp
