#include <cmath>

#include "alprox/nlp/solver.hpp"
#include "alprox/trajopt/solver.hpp"

namespace alprox::trajopt {

namespace {

std::vector<int> shifted_active_set(const VectorXd& h, const VectorXd& nu_l,
                                    double mu_i) {
  std::vector<int> act;
  for (int j = 0; j < h.size(); ++j) {
    if (nu_l(j) + h(j) / mu_i >= 0.0) act.push_back(j);
  }
  return act;
}

std::vector<int> merge_sorted(std::vector<int> base,
                              const std::vector<int>& extra) {
  base.insert(base.end(), extra.begin(), extra.end());
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  return base;
}

MatrixXd select_rows(const MatrixXd& m, const std::vector<int>& rows) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

}  // namespace

StageQParams stage_q_params(const StageModel& stage,
                            const ValueModel& next_value,
                            const CostExpansion& cost, const DynExpansion& dyn,
                            const IneqExpansion& ineq, const VectorXd& lam,
                            const VectorXd& nu, const VectorXd& lam_l,
                            const VectorXd& nu_l, const PenaltyState& pen) {
  StageQParams q;
  const VectorXd pi = lam_l + dyn.defect / pen.mu_e;
  const VectorXd w = 2.0 * pi - lam;

  q.Qx = cost.lx + dyn.fx.transpose() * w;
  q.Qu = cost.lu + dyn.fu.transpose() * w;
  q.Qxn = next_value.Vx + dyn.fxn.transpose() * w;

  const double se = 2.0 / pen.mu_e;
  q.Qxx = cost.lxx + se * dyn.fx.transpose() * dyn.fx;
  q.Quu = cost.luu + se * dyn.fu.transpose() * dyn.fu;
  q.Qux = cost.lxu.transpose() + se * dyn.fu.transpose() * dyn.fx;
  q.Quxn = se * dyn.fu.transpose() * dyn.fxn;
  q.Qxnxn = next_value.Vxx + se * dyn.fxn.transpose() * dyn.fxn;
  q.Qxnx = se * dyn.fxn.transpose() * dyn.fx;

  if (stage.nh > 0) {
    q.active = shifted_active_set(ineq.value, nu_l, pen.mu_i);
    const double si = 2.0 / pen.mu_i;
    for (int j : q.active) {
      const double nu_hat = nu_l(j) + ineq.value(j) / pen.mu_i;
      const double wj = 2.0 * nu_hat - nu(j);
      q.Qx.noalias() += ineq.hx.row(j).transpose() * wj;
      q.Qu.noalias() += ineq.hu.row(j).transpose() * wj;
      q.Qxx.noalias() += si * ineq.hx.row(j).transpose() * ineq.hx.row(j);
      q.Quu.noalias() += si * ineq.hu.row(j).transpose() * ineq.hu.row(j);
      q.Qux.noalias() += si * ineq.hu.row(j).transpose() * ineq.hx.row(j);
    }
  }
  return q;
}

BackwardPassResult backward_pass(const TrajOptProblem& prob,
                                 const Trajectory& traj,
                                 const Trajectory& anchor,
                                 const PenaltyState& pen,
                                 const TrajExpansions& evals,
                                 double& delta_hint,
                                 const std::vector<std::vector<int>>*
                                     extra_active) {
  const int n = prob.horizon();
  BackwardPassResult bp;
  bp.gains.resize(n);
  bp.values.resize(n + 1);

  const kkt::RegParams reg;

  // terminal node: relaxed multiplier block for h_N, then the value model
  {
    const auto& tc = evals.terminal_cost;
    const auto& th = evals.terminal_ineq;
    ValueModel& vn = bp.values[n];
    vn.Vx = tc.lx;
    vn.Vxx = tc.lxx;
    if (th.value.size() > 0) {
      bp.terminal.active =
          shifted_active_set(th.value, anchor.nus[n], pen.mu_i);
      if (extra_active != nullptr) {
        bp.terminal.active =
            merge_sorted(bp.terminal.active,
                         (*extra_active)[static_cast<std::size_t>(n)]);
      }
      const auto& act = bp.terminal.active;
      bp.terminal.zeta_ff.resize(static_cast<Eigen::Index>(act.size()));
      bp.terminal.Z_fb = select_rows(th.hx, act) / pen.mu_i;
      for (std::size_t i = 0; i < act.size(); ++i) {
        const int j = act[i];
        bp.terminal.zeta_ff(static_cast<Eigen::Index>(i)) =
            (th.value(j) + pen.mu_i * (anchor.nus[n](j) - traj.nus[n](j))) /
            pen.mu_i;
        const double nu_next = traj.nus[n](j) +
                               bp.terminal.zeta_ff(static_cast<Eigen::Index>(i));
        vn.Vx.noalias() += th.hx.row(j).transpose() * nu_next;
      }
      vn.Vxx.noalias() +=
          select_rows(th.hx, act).transpose() * bp.terminal.Z_fb;
    } else {
      bp.terminal.zeta_ff = VectorXd(0);
      bp.terminal.Z_fb = MatrixXd(0, prob.terminal.nx);
    }
    if (pen.rho > 0.0) {
      vn.Vx += pen.rho * (traj.xs[n] - anchor.xs[n]);
      vn.Vxx.diagonal().array() += pen.rho;
    }
    symmetrize(vn.Vxx);
  }

  for (int k = n - 1; k >= 0; --k) {
    const auto& stage = prob.stages[k];
    const auto& cost = evals.costs[k];
    const auto& dyn = evals.dyns[k];
    const auto& ineq = evals.ineqs[k];
    const ValueModel& vnext = bp.values[k + 1];

    StageGains& g = bp.gains[k];
    g.active = stage.nh > 0
                   ? shifted_active_set(ineq.value, anchor.nus[k], pen.mu_i)
                   : std::vector<int>{};
    if (extra_active != nullptr && stage.nh > 0) {
      g.active = merge_sorted(g.active,
                              (*extra_active)[static_cast<std::size_t>(k)]);
    }
    const int na = static_cast<int>(g.active.size());
    const int nu_dim = stage.nu;
    const int nxn = stage.nx_next;
    const int nf = nxn;

    kkt::SaddleSystem sys;
    sys.mu_e = pen.mu_e;
    sys.mu_i = pen.mu_i;
    sys.H = MatrixXd::Zero(nu_dim + nxn, nu_dim + nxn);
    sys.H.topLeftCorner(nu_dim, nu_dim) = cost.luu;
    if (pen.rho > 0.0) {
      sys.H.topLeftCorner(nu_dim, nu_dim).diagonal().array() += pen.rho;
    }
    sys.H.bottomRightCorner(nxn, nxn) = vnext.Vxx;

    sys.Jeq.resize(nf, nu_dim + nxn);
    sys.Jeq.leftCols(nu_dim) = dyn.fu;
    sys.Jeq.rightCols(nxn) = dyn.fxn;

    sys.Jineq_active.resize(na, nu_dim + nxn);
    if (na > 0) {
      sys.Jineq_active.leftCols(nu_dim) = select_rows(ineq.hu, g.active);
      sys.Jineq_active.rightCols(nxn).setZero();
    }

    // feedforward column and feedback block share one factorization
    sys.rhs.resize(nu_dim + nxn + nf + na, 1 + stage.nx);

    VectorXd r_u = cost.lu + dyn.fu.transpose() * traj.lams[k + 1];
    if (pen.rho > 0.0) r_u += pen.rho * (traj.us[k] - anchor.us[k]);
    for (int i = 0; i < na; ++i) {
      r_u.noalias() +=
          ineq.hu.row(g.active[i]).transpose() * traj.nus[k](g.active[i]);
    }
    const VectorXd r_xn = vnext.Vx + dyn.fxn.transpose() * traj.lams[k + 1];
    const VectorXd r_lam =
        dyn.defect + pen.mu_e * (anchor.lams[k + 1] - traj.lams[k + 1]);

    sys.rhs.col(0).head(nu_dim) = -r_u;
    sys.rhs.col(0).segment(nu_dim, nxn) = -r_xn;
    sys.rhs.col(0).segment(nu_dim + nxn, nf) = -r_lam;
    for (int i = 0; i < na; ++i) {
      const int j = g.active[i];
      sys.rhs(nu_dim + nxn + nf + i, 0) =
          -(ineq.value(j) + pen.mu_i * (anchor.nus[k](j) - traj.nus[k](j)));
    }

    sys.rhs.rightCols(stage.nx).setZero();
    sys.rhs.block(0, 1, nu_dim, stage.nx) = -cost.lxu.transpose();
    sys.rhs.block(nu_dim + nxn, 1, nf, stage.nx) = -dyn.fx;
    if (na > 0) {
      sys.rhs.block(nu_dim + nxn + nf, 1, na, stage.nx) =
          -select_rows(ineq.hx, g.active);
    }

    const kkt::SaddleSolution sol =
        kkt::regularize_and_solve(sys, reg, delta_hint);
    if (!sol.factor_ok) {
      bp.ok = false;
      return bp;
    }
    if (sol.inertia.delta > 0.0) {
      bp.regularizations++;
      bp.max_delta = std::max(bp.max_delta, sol.inertia.delta);
    }

    g.k_ff = sol.x.col(0).head(nu_dim);
    g.a_ff = sol.x.col(0).segment(nu_dim, nxn);
    g.xi_ff = sol.x.col(0).segment(nu_dim + nxn, nf);
    g.zeta_ff = sol.x.col(0).tail(na);
    g.K_fb = sol.x.block(0, 1, nu_dim, stage.nx);
    g.A_fb = sol.x.block(nu_dim, 1, nxn, stage.nx);
    g.Xi_fb = sol.x.block(nu_dim + nxn, 1, nf, stage.nx);
    g.Z_fb = sol.x.block(nu_dim + nxn + nf, 1, na, stage.nx);

    // value model at node k from the stage sensitivities
    ValueModel& vk = bp.values[k];
    vk.Vx = cost.lx + cost.lxu * g.k_ff +
            dyn.fx.transpose() * (traj.lams[k + 1] + g.xi_ff);
    vk.Vxx = cost.lxx + cost.lxu * g.K_fb + dyn.fx.transpose() * g.Xi_fb;
    for (int i = 0; i < na; ++i) {
      const int j = g.active[i];
      vk.Vx.noalias() += ineq.hx.row(j).transpose() *
                         (traj.nus[k](j) + g.zeta_ff(i));
      vk.Vxx.noalias() += ineq.hx.row(j).transpose() * g.Z_fb.row(i);
    }
    if (pen.rho > 0.0) {
      vk.Vx += pen.rho * (traj.xs[k] - anchor.xs[k]);
      vk.Vxx.diagonal().array() += pen.rho;
    }
    symmetrize(vk.Vxx);
  }

  // initial node: x_0 = x0_bar with multiplier lam_0
  {
    const int nx0 = prob.stages[0].nx;
    kkt::SaddleSystem sys;
    sys.mu_e = pen.mu_e;
    sys.mu_i = pen.mu_i;
    sys.H = bp.values[0].Vxx;
    sys.Jeq = MatrixXd::Identity(nx0, nx0);
    sys.Jineq_active = MatrixXd(0, nx0);
    sys.rhs.resize(2 * nx0, 1);
    sys.rhs.col(0).head(nx0) = -(bp.values[0].Vx + traj.lams[0]);
    sys.rhs.col(0).tail(nx0) =
        -(evals.init_residual + pen.mu_e * (anchor.lams[0] - traj.lams[0]));
    const kkt::SaddleSolution sol =
        kkt::regularize_and_solve(sys, reg, delta_hint);
    if (!sol.factor_ok) {
      bp.ok = false;
      return bp;
    }
    if (sol.inertia.delta > 0.0) {
      bp.regularizations++;
      bp.max_delta = std::max(bp.max_delta, sol.inertia.delta);
    }
    bp.dx0 = sol.x.col(0).head(nx0);
    bp.dlam0 = sol.x.col(0).tail(nx0);
  }

  bp.ok = true;
  return bp;
}

BackwardPassResult backward_pass(const TrajOptProblem& prob,
                                 const Trajectory& traj,
                                 const Trajectory& anchor,
                                 const PenaltyState& pen) {
  double hint = 0.0;
  return backward_pass(prob, traj, anchor, pen,
                       evaluate_expansions(prob, traj), hint);
}

TrajDirection compute_direction(const TrajOptProblem& prob,
                                const Trajectory& traj,
                                const BackwardPassResult& bp) {
  const int n = prob.horizon();
  TrajDirection dir;
  dir.dxs.resize(n + 1);
  dir.dus.resize(n);
  dir.dlams.resize(n + 1);
  dir.dnus.resize(n + 1);

  dir.dxs[0] = bp.dx0;
  dir.dlams[0] = bp.dlam0;
  for (int k = 0; k < n; ++k) {
    const StageGains& g = bp.gains[k];
    dir.dus[k] = g.k_ff + g.K_fb * dir.dxs[k];
    dir.dnus[k] = -traj.nus[k];
    for (std::size_t i = 0; i < g.active.size(); ++i) {
      dir.dnus[k](g.active[i]) =
          g.zeta_ff(static_cast<Eigen::Index>(i)) +
          g.Z_fb.row(static_cast<Eigen::Index>(i)).dot(dir.dxs[k]);
    }
    dir.dxs[k + 1] = g.a_ff + g.A_fb * dir.dxs[k];
    dir.dlams[k + 1] = g.xi_ff + g.Xi_fb * dir.dxs[k];
  }
  dir.dnus[n] = -traj.nus[n];
  for (std::size_t i = 0; i < bp.terminal.active.size(); ++i) {
    dir.dnus[n](bp.terminal.active[i]) =
        bp.terminal.zeta_ff(static_cast<Eigen::Index>(i)) +
        bp.terminal.Z_fb.row(static_cast<Eigen::Index>(i)).dot(dir.dxs[n]);
  }
  return dir;
}

Trajectory apply_direction(const Trajectory& traj, const TrajDirection& dir,
                           double alpha) {
  Trajectory out = traj;
  for (std::size_t k = 0; k < traj.xs.size(); ++k) {
    out.xs[k] += alpha * dir.dxs[k];
    out.lams[k] += alpha * dir.dlams[k];
    out.nus[k] += alpha * dir.dnus[k];
  }
  for (std::size_t k = 0; k < traj.us.size(); ++k) {
    out.us[k] += alpha * dir.dus[k];
  }
  return out;
}

Trajectory forward_linear_rollout(const TrajOptProblem& prob,
                                  const Trajectory& traj,
                                  const BackwardPassResult& bp, double alpha) {
  return apply_direction(traj, compute_direction(prob, traj, bp), alpha);
}

LineSearchOutcome linesearch_and_accept(const TrajOptProblem& prob,
                                        const Trajectory& traj,
                                        const Trajectory& anchor,
                                        const PenaltyState& pen,
                                        const TrajDirection& dir,
                                        const LineSearchParams& ls,
                                        double merit0, double slope) {
  LineSearchOutcome out;
  const double noise = 10.0 * 2.2e-16 * (1.0 + std::abs(merit0));
  double alpha = 1.0;
  while (true) {
    Trajectory candidate = apply_direction(traj, dir, alpha);
    double merit;
    try {
      merit = traj_merit(prob, candidate, anchor, pen);
    } catch (const std::domain_error&) {
      // evaluator left its domain (e.g. unphysical speeds); backtrack
      alpha *= ls.backtrack_factor;
      if (alpha < ls.alpha_min) return out;
      continue;
    }
    if (merit <= merit0 + ls.c1 * alpha * slope + noise) {
      out.trajectory = std::move(candidate);
      out.alpha = alpha;
      out.merit = merit;
      out.ok = true;
      return out;
    }
    alpha *= ls.backtrack_factor;
    if (alpha < ls.alpha_min) {
      out.alpha = alpha;
      return out;
    }
  }
}

namespace {

int total_active(const BackwardPassResult& bp) {
  int count = static_cast<int>(bp.terminal.active.size());
  for (const auto& g : bp.gains) count += static_cast<int>(g.active.size());
  return count;
}

// Rows outside the stage sets whose shifted value the direction crosses
// within `window` of a unit step. Without them the merit walls right at
// the crossing and the line search degenerates to a breakpoint crawl.
bool find_anticipated_rows(const TrajOptProblem& prob,
                           const Trajectory& anchor, const PenaltyState& pen,
                           const TrajExpansions& evals,
                           const BackwardPassResult& bp,
                           const TrajDirection& dir, double window,
                           std::vector<std::vector<int>>& forced) {
  const int n = prob.horizon();
  bool added = false;
  auto scan = [&](int node, const VectorXd& h, const MatrixXd& hx,
                  const MatrixXd* hu, const std::vector<int>& active,
                  const VectorXd& nu_l, const VectorXd& dx,
                  const VectorXd* du) {
    auto& slot = forced[static_cast<std::size_t>(node)];
    for (int j = 0; j < h.size(); ++j) {
      if (std::binary_search(active.begin(), active.end(), j)) continue;
      if (std::find(slot.begin(), slot.end(), j) != slot.end()) continue;
      const double s = nu_l(j) + h(j) / pen.mu_i;  // < 0 on inactive rows
      double v = hx.row(j).dot(dx);
      if (hu != nullptr) v += hu->row(j).dot(*du);
      v /= pen.mu_i;
      if (v <= 0.0) continue;
      if (-s / v <= window) {
        slot.push_back(j);
        added = true;
      }
    }
  };
  for (int k = 0; k < n; ++k) {
    if (prob.stages[k].nh == 0) continue;
    scan(k, evals.ineqs[k].value, evals.ineqs[k].hx, &evals.ineqs[k].hu,
         bp.gains[k].active, anchor.nus[k], dir.dxs[k], &dir.dus[k]);
  }
  if (prob.terminal.nh > 0) {
    scan(n, evals.terminal_ineq.value, evals.terminal_ineq.hx, nullptr,
         bp.terminal.active, anchor.nus[n], dir.dxs[n], nullptr);
  }
  return added;
}

}  // namespace

TrajSolveResult solve(const TrajOptProblem& prob,
                      const Trajectory& initial_traj, const BclParams& bcl,
                      const LineSearchParams& ls, HessianMode hess_mode,
                      const ProxSchedule& prox) {
  (void)hess_mode;  // stage models carry first-order constraint data only
  prob.validate();
  initial_traj.validate(prob);
  bcl.validate();

  TrajSolveResult result;
  Trajectory traj = initial_traj;
  Trajectory anchor = initial_traj;  // multiplier estimates + prox centers
  TrajSolveReport& report = result.report;

  PenaltyState pen;
  pen.mu_e = bcl.mu_e_init;
  pen.mu_i = bcl.mu_i_init;
  pen.rho = bcl.rho_init;
  pen.omega_l = bcl.omega0;
  pen.eps_l = bcl.eps0;

  double delta_hint = 0.0;
  int consecutive_full_steps = 0;
  bool converged = false;
  TrajResiduals res;

  for (int outer = 0; outer < bcl.max_outer_iters && !converged; ++outer) {
    report.outer_iters = outer + 1;
    double pending_alpha = -1.0;  // alpha of the step that produced traj
    double pending_merit = 0.0;
    double pending_delta = 0.0;
    int pending_active = 0;

    for (int it = 0; it <= bcl.max_inner_iters; ++it) {
      const TrajExpansions evals = evaluate_expansions(prob, traj);
      res = traj_residuals(prob, traj, anchor, pen, evals);

      if (pending_alpha >= 0.0) {
        TraceRecord rec;
        rec.outer_iter = outer;
        rec.inner_iter = ++report.total_inner_iters;
        rec.merit = pending_merit;
        rec.primal_inf = res.primal_inf;
        rec.dual_inf = res.dual_inf;
        rec.mu_e = pen.mu_e;
        rec.mu_i = pen.mu_i;
        rec.rho = pen.rho;
        rec.alpha = pending_alpha;
        rec.active_set_size = pending_active;
        rec.reg_delta = pending_delta;
        report.trace.push_back(rec);
        pending_alpha = -1.0;
      }

      if (res.dual_inf <= bcl.eps_abs && res.primal_inf <= bcl.eps_abs) {
        converged = true;
        break;
      }
      if (res.rl_norm <= pen.omega_l) break;
      if (it == bcl.max_inner_iters) break;

      // backward pass with rho escalation on failure / non-descent;
      // slopes within round-off of zero count as usable directions
      BackwardPassResult bp;
      TrajDirection dir;
      double slope = 0.0;
      const double merit0 = traj_merit(prob, traj, anchor, pen);
      const double slope_noise = 1e-13 * (1.0 + std::abs(merit0));
      while (true) {
        bp = backward_pass(prob, traj, anchor, pen, evals, delta_hint);
        if (bp.ok) {
          dir = compute_direction(prob, traj, bp);
          slope = traj_merit_slope(prob, traj, anchor, pen, evals, dir);
          if (slope < slope_noise) break;
        }
        if (pen.rho >= prox.rho_max) {
          report.status = SolveStatus::LineSearchFailure;
          result.trajectory = traj;
          report.dual_residual = res.dual_inf;
          report.primal_infeasibility = res.primal_inf;
          return result;
        }
        pen.rho = std::min(
            prox.rho_max,
            std::max({pen.rho, bcl.rho_init, 1e-8}) * prox.rho_escalate);
      }

      // anticipated activation of rows the direction crosses immediately;
      // reverted whenever it spoils the descent property
      {
        std::vector<std::vector<int>> forced(
            static_cast<std::size_t>(prob.horizon()) + 1);
        for (int round = 0; round < 8; ++round) {
          if (!find_anticipated_rows(prob, anchor, pen, evals, bp, dir, 0.1,
                                     forced)) {
            break;
          }
          BackwardPassResult bp2 = backward_pass(prob, traj, anchor, pen,
                                                 evals, delta_hint, &forced);
          if (!bp2.ok) break;
          TrajDirection dir2 = compute_direction(prob, traj, bp2);
          const double slope2 =
              traj_merit_slope(prob, traj, anchor, pen, evals, dir2);
          if (slope2 >= slope_noise) break;  // keep the safe direction
          bp = std::move(bp2);
          dir = std::move(dir2);
          slope = slope2;
        }
      }
      slope = std::min(slope, 0.0);
      report.total_regularizations += bp.regularizations;

      // on a failed search, stiffen the proximal term and retry: near
      // kinks of the obstacle rows the frozen-set slope can mispredict,
      // and a larger rho restores agreement in a neighborhood
      LineSearchOutcome lso;
      double merit_ref = merit0;
      while (true) {
        lso = linesearch_and_accept(prob, traj, anchor, pen, dir, ls,
                                    merit_ref, slope);
        if (lso.ok) break;
        if (pen.rho >= prox.rho_max) {
          report.status = SolveStatus::LineSearchFailure;
          result.trajectory = traj;
          report.dual_residual = res.dual_inf;
          report.primal_infeasibility = res.primal_inf;
          return result;
        }
        pen.rho = std::min(
            prox.rho_max,
            std::max({pen.rho, bcl.rho_init, 1e-8}) * prox.rho_escalate);
        bp = backward_pass(prob, traj, anchor, pen, evals, delta_hint);
        if (!bp.ok) continue;  // escalate further
        dir = compute_direction(prob, traj, bp);
        slope = traj_merit_slope(prob, traj, anchor, pen, evals, dir);
        merit_ref = traj_merit(prob, traj, anchor, pen);
      }
      traj = lso.trajectory;
      pending_alpha = lso.alpha;
      pending_merit = lso.merit;
      pending_delta = bp.max_delta;
      pending_active = total_active(bp);

      if (lso.alpha == 1.0) {
        if (++consecutive_full_steps >= 2) {
          pen.rho = std::max(bcl.rho_init, pen.rho * prox.rho_relax);
        }
      } else {
        consecutive_full_steps = 0;
      }
    }
    if (converged) break;

    // BCL branch on the stacked primal infeasibility
    const double eta_next = res.primal_inf;
    const bool accepted = eta_next < pen.eps_l;
    if (accepted) {
      const int n = prob.horizon();
      const TrajValues vals = evaluate_values(prob, traj);
      // Lagrange multiplier extrapolation, node by node
      {
        const VectorXd lam_hat =
            anchor.lams[0] + vals.init_residual / pen.mu_e;
        anchor.lams[0] = 2.0 * lam_hat - traj.lams[0];
      }
      for (int k = 0; k < n; ++k) {
        const VectorXd pi =
            anchor.lams[k + 1] + vals.defects[k] / pen.mu_e;
        anchor.lams[k + 1] = 2.0 * pi - traj.lams[k + 1];
        if (vals.ineqs[k].size() > 0) {
          const VectorXd nu_hat =
              positive_part(anchor.nus[k] + vals.ineqs[k] / pen.mu_i);
          anchor.nus[k] = positive_part(2.0 * nu_hat - traj.nus[k]);
        }
      }
      if (vals.terminal_ineq.size() > 0) {
        const VectorXd nu_hat = positive_part(
            anchor.nus[n] + vals.terminal_ineq / pen.mu_i);
        anchor.nus[n] = positive_part(2.0 * nu_hat - traj.nus[n]);
      }
    }
    // warm start the next subproblem: updated estimates on acceptance,
    // relaxed duals kept through rejections
    if (accepted) {
      traj.lams = anchor.lams;
      traj.nus = anchor.nus;
    }
    anchor.xs = traj.xs;
    anchor.us = traj.us;
    pen = nlp::bcl_update(pen, bcl, eta_next, accepted);
    // clamp the subproblem tolerances at the target accuracy
    pen.omega_l = std::max(pen.omega_l, bcl.eps_abs);
    pen.eps_l = std::max(pen.eps_l, bcl.eps_abs);
  }

  if (converged) report.status = SolveStatus::Converged;
  result.trajectory = traj;
  report.dual_residual = res.dual_inf;
  report.primal_infeasibility = res.primal_inf;
  return result;
}

}  // namespace alprox::trajopt
