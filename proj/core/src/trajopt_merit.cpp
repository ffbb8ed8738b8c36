#include "alprox/trajopt/solver.hpp"

namespace alprox::trajopt {

namespace {

double pen_eq(const VectorXd& c, const VectorXd& lam, const VectorXd& lam_l,
              double mu_e) {
  return ((c + mu_e * lam_l).squaredNorm() +
          (c + mu_e * (lam_l - lam)).squaredNorm()) /
         (2.0 * mu_e);
}

double pen_ineq(const VectorXd& h, const VectorXd& nu, const VectorXd& nu_l,
                double mu_i) {
  if (h.size() == 0) return 0.0;
  const VectorXd shifted = positive_part(h + mu_i * nu_l);
  return (shifted.squaredNorm() + (shifted - mu_i * nu).squaredNorm()) /
         (2.0 * mu_i);
}

}  // namespace

TrajValues evaluate_values(const TrajOptProblem& prob, const Trajectory& traj) {
  const int n = prob.horizon();
  TrajValues vals;
  vals.costs.resize(n);
  vals.defects.resize(n);
  vals.ineqs.resize(n);
  for (int k = 0; k < n; ++k) {
    const auto& stage = prob.stages[k];
    vals.costs[k] = stage.eval_cost(traj.xs[k], traj.us[k]);
    vals.defects[k] = stage.eval_dyn(traj.xs[k], traj.us[k], traj.xs[k + 1]);
    check_dim(vals.defects[k].size(), stage.nx_next, "dynamics residual");
    if (stage.nh > 0) {
      vals.ineqs[k] = stage.eval_ineq(traj.xs[k], traj.us[k]);
      check_dim(vals.ineqs[k].size(), stage.nh, "path constraint value");
    } else {
      vals.ineqs[k] = VectorXd(0);
    }
  }
  vals.terminal_cost = prob.terminal.eval_cost(traj.xs[n]);
  vals.terminal_ineq = prob.terminal.nh > 0
                           ? prob.terminal.eval_ineq(traj.xs[n])
                           : VectorXd(0);
  vals.init_residual = traj.xs[0] - prob.x0_bar;
  return vals;
}

TrajExpansions evaluate_expansions(const TrajOptProblem& prob,
                                   const Trajectory& traj) {
  const int n = prob.horizon();
  TrajExpansions ev;
  ev.costs.resize(n);
  ev.dyns.resize(n);
  ev.ineqs.resize(n);
  for (int k = 0; k < n; ++k) {
    const auto& stage = prob.stages[k];
    ev.costs[k] = stage.eval_cost_expansion(traj.xs[k], traj.us[k]);
    ev.dyns[k] =
        stage.eval_dyn_expansion(traj.xs[k], traj.us[k], traj.xs[k + 1]);
    if (stage.nh > 0) {
      ev.ineqs[k] = stage.eval_ineq_expansion(traj.xs[k], traj.us[k]);
    } else {
      ev.ineqs[k].value = VectorXd(0);
      ev.ineqs[k].hx = MatrixXd(0, stage.nx);
      ev.ineqs[k].hu = MatrixXd(0, stage.nu);
    }
  }
  ev.terminal_cost = prob.terminal.eval_cost_expansion(traj.xs[n]);
  if (prob.terminal.nh > 0) {
    ev.terminal_ineq = prob.terminal.eval_ineq_expansion(traj.xs[n]);
  } else {
    ev.terminal_ineq.value = VectorXd(0);
    ev.terminal_ineq.hx = MatrixXd(0, prob.terminal.nx);
  }
  ev.init_residual = traj.xs[0] - prob.x0_bar;
  return ev;
}

double traj_merit(const TrajOptProblem& prob, const TrajValues& vals,
                  const Trajectory& traj, const Trajectory& anchor,
                  const PenaltyState& pen) {
  const int n = prob.horizon();
  double value = vals.terminal_cost;
  value += pen_eq(vals.init_residual, traj.lams[0], anchor.lams[0], pen.mu_e);
  for (int k = 0; k < n; ++k) {
    value += vals.costs[k];
    value += pen_eq(vals.defects[k], traj.lams[k + 1], anchor.lams[k + 1],
                    pen.mu_e);
    value += pen_ineq(vals.ineqs[k], traj.nus[k], anchor.nus[k], pen.mu_i);
  }
  value += pen_ineq(vals.terminal_ineq, traj.nus[n], anchor.nus[n], pen.mu_i);
  if (pen.rho > 0.0) {
    double prox = 0.0;
    for (int k = 0; k <= n; ++k) {
      prox += (traj.xs[k] - anchor.xs[k]).squaredNorm();
    }
    for (int k = 0; k < n; ++k) {
      prox += (traj.us[k] - anchor.us[k]).squaredNorm();
    }
    value += 0.5 * pen.rho * prox;
  }
  return value;
}

double traj_merit(const TrajOptProblem& prob, const Trajectory& traj,
                  const Trajectory& anchor, const PenaltyState& pen) {
  return traj_merit(prob, evaluate_values(prob, traj), traj, anchor, pen);
}

double traj_merit_slope(const TrajOptProblem& prob, const Trajectory& traj,
                        const Trajectory& anchor, const PenaltyState& pen,
                        const TrajExpansions& evals, const TrajDirection& dir) {
  const int n = prob.horizon();
  double slope = 0.0;

  // initial-condition block
  {
    const VectorXd pi0 = anchor.lams[0] + evals.init_residual / pen.mu_e;
    slope += (2.0 * pi0 - traj.lams[0]).dot(dir.dxs[0]);
    slope += (pen.mu_e * (traj.lams[0] - pi0)).dot(dir.dlams[0]);
  }

  for (int k = 0; k < n; ++k) {
    const auto& cost = evals.costs[k];
    const auto& dyn = evals.dyns[k];
    const auto& ineq = evals.ineqs[k];
    const VectorXd pi =
        anchor.lams[k + 1] + dyn.defect / pen.mu_e;  // shifted dyn multiplier
    const VectorXd w = 2.0 * pi - traj.lams[k + 1];

    VectorXd gx = cost.lx + dyn.fx.transpose() * w;
    VectorXd gu = cost.lu + dyn.fu.transpose() * w;
    if (pen.rho > 0.0) {
      gx += pen.rho * (traj.xs[k] - anchor.xs[k]);
      gu += pen.rho * (traj.us[k] - anchor.us[k]);
    }

    if (ineq.value.size() > 0) {
      const VectorXd shifted = anchor.nus[k] + ineq.value / pen.mu_i;
      for (int j = 0; j < ineq.value.size(); ++j) {
        if (shifted(j) >= 0.0) {
          // nu_hat(j) = shifted(j) on the active branch
          const double wj = 2.0 * shifted(j) - traj.nus[k](j);
          gx.noalias() += ineq.hx.row(j).transpose() * wj;
          gu.noalias() += ineq.hu.row(j).transpose() * wj;
          slope += pen.mu_i * (traj.nus[k](j) - shifted(j)) * dir.dnus[k](j);
        } else {
          slope += pen.mu_i * traj.nus[k](j) * dir.dnus[k](j);
        }
      }
    }

    slope += gx.dot(dir.dxs[k]) + gu.dot(dir.dus[k]);
    slope += (dyn.fxn.transpose() * w).dot(dir.dxs[k + 1]);
    slope += (pen.mu_e * (traj.lams[k + 1] - pi)).dot(dir.dlams[k + 1]);
  }

  // terminal node
  {
    VectorXd gx = evals.terminal_cost.lx;
    if (pen.rho > 0.0) gx += pen.rho * (traj.xs[n] - anchor.xs[n]);
    const auto& tineq = evals.terminal_ineq;
    if (tineq.value.size() > 0) {
      const VectorXd shifted = anchor.nus[n] + tineq.value / pen.mu_i;
      for (int j = 0; j < tineq.value.size(); ++j) {
        if (shifted(j) >= 0.0) {
          const double wj = 2.0 * shifted(j) - traj.nus[n](j);
          gx.noalias() += tineq.hx.row(j).transpose() * wj;
          slope += pen.mu_i * (traj.nus[n](j) - shifted(j)) * dir.dnus[n](j);
        } else {
          slope += pen.mu_i * traj.nus[n](j) * dir.dnus[n](j);
        }
      }
    }
    slope += gx.dot(dir.dxs[n]);
  }
  return slope;
}

TrajResiduals traj_residuals(const TrajOptProblem& prob,
                             const Trajectory& traj, const Trajectory& anchor,
                             const PenaltyState& pen,
                             const TrajExpansions& evals) {
  const int n = prob.horizon();
  TrajResiduals res;

  // stationarity blocks, accumulated per node
  std::vector<VectorXd> grad_x(n + 1);
  for (int k = 0; k <= n; ++k) {
    grad_x[k] = VectorXd::Zero(traj.xs[k].size());
  }
  grad_x[0] = traj.lams[0];  // initial constraint has Jacobian I
  grad_x[n] += evals.terminal_cost.lx;
  if (evals.terminal_ineq.value.size() > 0) {
    grad_x[n].noalias() += evals.terminal_ineq.hx.transpose() * traj.nus[n];
  }

  double rl = 0.0;
  double dual = 0.0;
  double primal = infty_norm(evals.init_residual);

  // initial multiplier block
  {
    const VectorXd lam_hat = anchor.lams[0] + evals.init_residual / pen.mu_e;
    rl = std::max(rl, infty_norm(VectorXd(pen.mu_e * (lam_hat - traj.lams[0]))));
  }

  for (int k = 0; k < n; ++k) {
    const auto& cost = evals.costs[k];
    const auto& dyn = evals.dyns[k];
    const auto& ineq = evals.ineqs[k];

    grad_x[k].noalias() += cost.lx;
    grad_x[k].noalias() += dyn.fx.transpose() * traj.lams[k + 1];
    grad_x[k + 1].noalias() += dyn.fxn.transpose() * traj.lams[k + 1];

    VectorXd grad_u = cost.lu + dyn.fu.transpose() * traj.lams[k + 1];
    if (ineq.value.size() > 0) {
      grad_x[k].noalias() += ineq.hx.transpose() * traj.nus[k];
      grad_u.noalias() += ineq.hu.transpose() * traj.nus[k];
      primal = std::max(primal, infty_norm(positive_part(ineq.value)));
      const VectorXd nu_hat =
          positive_part(anchor.nus[k] + ineq.value / pen.mu_i);
      rl = std::max(rl,
                    infty_norm(VectorXd(pen.mu_i * (nu_hat - traj.nus[k]))));
    }
    primal = std::max(primal, infty_norm(dyn.defect));
    const VectorXd pi = anchor.lams[k + 1] + dyn.defect / pen.mu_e;
    rl = std::max(rl,
                  infty_norm(VectorXd(pen.mu_e * (pi - traj.lams[k + 1]))));

    dual = std::max(dual, infty_norm(grad_u));
    VectorXd rl_u = grad_u;
    if (pen.rho > 0.0) rl_u += pen.rho * (traj.us[k] - anchor.us[k]);
    rl = std::max(rl, infty_norm(rl_u));
  }

  if (evals.terminal_ineq.value.size() > 0) {
    primal =
        std::max(primal, infty_norm(positive_part(evals.terminal_ineq.value)));
    const VectorXd nu_hat =
        positive_part(anchor.nus[n] + evals.terminal_ineq.value / pen.mu_i);
    rl = std::max(rl, infty_norm(VectorXd(pen.mu_i * (nu_hat - traj.nus[n]))));
  }

  for (int k = 0; k <= n; ++k) {
    dual = std::max(dual, infty_norm(grad_x[k]));
    VectorXd rl_x = grad_x[k];
    if (pen.rho > 0.0) rl_x += pen.rho * (traj.xs[k] - anchor.xs[k]);
    rl = std::max(rl, infty_norm(rl_x));
  }

  res.rl_norm = rl;
  res.dual_inf = dual;
  res.primal_inf = primal;
  return res;
}

}  // namespace alprox::trajopt
