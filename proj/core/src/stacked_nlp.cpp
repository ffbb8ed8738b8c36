#include <memory>

#include "alprox/trajopt/solver.hpp"

namespace alprox::trajopt {

StackedLayout stacked_layout(const TrajOptProblem& prob) {
  const int n = prob.horizon();
  StackedLayout lay;
  lay.x_offsets.resize(n + 1);
  lay.u_offsets.resize(n);
  int off = 0;
  for (int k = 0; k < n; ++k) {
    lay.x_offsets[k] = off;
    off += prob.stages[k].nx;
  }
  lay.x_offsets[n] = off;
  off += prob.terminal.nx;
  for (int k = 0; k < n; ++k) {
    lay.u_offsets[k] = off;
    off += prob.stages[k].nu;
  }
  lay.n = off;
  lay.ne = prob.stages[0].nx;
  lay.ni = 0;
  for (const auto& stage : prob.stages) {
    lay.ne += stage.nx_next;
    lay.ni += stage.nh;
  }
  lay.ni += prob.terminal.nh;
  return lay;
}

VectorXd stack_trajectory(const TrajOptProblem& prob, const Trajectory& traj) {
  const StackedLayout lay = stacked_layout(prob);
  VectorXd z(lay.n);
  const int n = prob.horizon();
  for (int k = 0; k <= n; ++k) {
    z.segment(lay.x_offsets[k], traj.xs[k].size()) = traj.xs[k];
  }
  for (int k = 0; k < n; ++k) {
    z.segment(lay.u_offsets[k], traj.us[k].size()) = traj.us[k];
  }
  return z;
}

Trajectory unstack_trajectory(const TrajOptProblem& prob, const VectorXd& z) {
  const StackedLayout lay = stacked_layout(prob);
  Trajectory traj = make_zero_like(prob);
  const int n = prob.horizon();
  for (int k = 0; k <= n; ++k) {
    traj.xs[k] = z.segment(lay.x_offsets[k], traj.xs[k].size());
  }
  for (int k = 0; k < n; ++k) {
    traj.us[k] = z.segment(lay.u_offsets[k], traj.us[k].size());
  }
  return traj;
}

nlp::NlpProblem stacked_nlp_view(const TrajOptProblem& prob) {
  prob.validate();
  const auto shared = std::make_shared<const TrajOptProblem>(prob);
  const StackedLayout lay = stacked_layout(*shared);
  const int n = shared->horizon();

  nlp::NlpProblem out;
  out.n = lay.n;
  out.ne = lay.ne;
  out.ni = lay.ni;

  auto xs_at = [shared, lay](const VectorXd& z, int k) -> VectorXd {
    const int dim = k < shared->horizon() ? shared->stages[k].nx
                                          : shared->terminal.nx;
    return z.segment(lay.x_offsets[k], dim);
  };
  auto us_at = [shared, lay](const VectorXd& z, int k) -> VectorXd {
    return z.segment(lay.u_offsets[k], shared->stages[k].nu);
  };

  out.eval_f = [shared, xs_at, us_at, n](const VectorXd& z) {
    double value = 0.0;
    for (int k = 0; k < n; ++k) {
      value += shared->stages[k].eval_cost(xs_at(z, k), us_at(z, k));
    }
    value += shared->terminal.eval_cost(xs_at(z, n));
    return value;
  };

  out.eval_grad_f = [shared, lay, xs_at, us_at, n](const VectorXd& z) {
    VectorXd g = VectorXd::Zero(lay.n);
    for (int k = 0; k < n; ++k) {
      const auto exp = shared->stages[k].eval_cost_expansion(xs_at(z, k),
                                                             us_at(z, k));
      g.segment(lay.x_offsets[k], exp.lx.size()) += exp.lx;
      g.segment(lay.u_offsets[k], exp.lu.size()) += exp.lu;
    }
    const auto texp = shared->terminal.eval_cost_expansion(xs_at(z, n));
    g.segment(lay.x_offsets[n], texp.lx.size()) += texp.lx;
    return g;
  };

  out.eval_c = [shared, lay, xs_at, us_at, n](const VectorXd& z) {
    VectorXd c(lay.ne);
    int row = 0;
    const int nx0 = shared->stages[0].nx;
    c.head(nx0) = xs_at(z, 0) - shared->x0_bar;
    row += nx0;
    for (int k = 0; k < n; ++k) {
      const VectorXd f =
          shared->stages[k].eval_dyn(xs_at(z, k), us_at(z, k), xs_at(z, k + 1));
      c.segment(row, f.size()) = f;
      row += static_cast<int>(f.size());
    }
    return c;
  };

  out.eval_Jc = [shared, lay, xs_at, us_at, n](const VectorXd& z) {
    MatrixXd jac = MatrixXd::Zero(lay.ne, lay.n);
    int row = 0;
    const int nx0 = shared->stages[0].nx;
    jac.block(0, lay.x_offsets[0], nx0, nx0).setIdentity();
    row += nx0;
    for (int k = 0; k < n; ++k) {
      const auto& stage = shared->stages[k];
      const auto d = stage.eval_dyn_expansion(xs_at(z, k), us_at(z, k),
                                              xs_at(z, k + 1));
      jac.block(row, lay.x_offsets[k], stage.nx_next, stage.nx) = d.fx;
      jac.block(row, lay.u_offsets[k], stage.nx_next, stage.nu) = d.fu;
      jac.block(row, lay.x_offsets[k + 1], stage.nx_next, stage.nx_next) =
          d.fxn;
      row += stage.nx_next;
    }
    return jac;
  };

  out.eval_h = [shared, lay, xs_at, us_at, n](const VectorXd& z) {
    VectorXd h(lay.ni);
    int row = 0;
    for (int k = 0; k < n; ++k) {
      if (shared->stages[k].nh == 0) continue;
      const VectorXd v =
          shared->stages[k].eval_ineq(xs_at(z, k), us_at(z, k));
      h.segment(row, v.size()) = v;
      row += static_cast<int>(v.size());
    }
    if (shared->terminal.nh > 0) {
      h.segment(row, shared->terminal.nh) =
          shared->terminal.eval_ineq(xs_at(z, n));
    }
    return h;
  };

  out.eval_Jh = [shared, lay, xs_at, us_at, n](const VectorXd& z) {
    MatrixXd jac = MatrixXd::Zero(lay.ni, lay.n);
    int row = 0;
    for (int k = 0; k < n; ++k) {
      const auto& stage = shared->stages[k];
      if (stage.nh == 0) continue;
      const auto e = stage.eval_ineq_expansion(xs_at(z, k), us_at(z, k));
      jac.block(row, lay.x_offsets[k], stage.nh, stage.nx) = e.hx;
      jac.block(row, lay.u_offsets[k], stage.nh, stage.nu) = e.hu;
      row += stage.nh;
    }
    if (shared->terminal.nh > 0) {
      const auto e = shared->terminal.eval_ineq_expansion(xs_at(z, n));
      jac.block(row, lay.x_offsets[n], shared->terminal.nh,
                shared->terminal.nx) = e.hx;
    }
    return jac;
  };

  // block-diagonal cost Hessian (Gauss-Newton: constraint curvature dropped)
  out.eval_lag_hess = [shared, lay, xs_at, us_at, n](
                          const VectorXd& z, const VectorXd&,
                          const VectorXd&) {
    MatrixXd hess = MatrixXd::Zero(lay.n, lay.n);
    for (int k = 0; k < n; ++k) {
      const auto& stage = shared->stages[k];
      const auto exp = stage.eval_cost_expansion(xs_at(z, k), us_at(z, k));
      hess.block(lay.x_offsets[k], lay.x_offsets[k], stage.nx, stage.nx) =
          exp.lxx;
      hess.block(lay.u_offsets[k], lay.u_offsets[k], stage.nu, stage.nu) =
          exp.luu;
      hess.block(lay.x_offsets[k], lay.u_offsets[k], stage.nx, stage.nu) =
          exp.lxu;
      hess.block(lay.u_offsets[k], lay.x_offsets[k], stage.nu, stage.nx) =
          exp.lxu.transpose();
    }
    const auto texp = shared->terminal.eval_cost_expansion(xs_at(z, n));
    hess.block(lay.x_offsets[n], lay.x_offsets[n], shared->terminal.nx,
               shared->terminal.nx) = texp.lxx;
    return hess;
  };

  return out;
}

}  // namespace alprox::trajopt
