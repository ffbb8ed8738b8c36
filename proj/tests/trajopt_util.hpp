/// Test-only builders for linear-quadratic trajectory problems and the
/// Riccati reference recursion.
#pragma once

#include "alprox/trajopt/solver.hpp"
#include "oracles.hpp"

namespace testutil {

using alprox::trajopt::CostExpansion;
using alprox::trajopt::DynExpansion;
using alprox::trajopt::IneqExpansion;
using alprox::trajopt::StageModel;
using alprox::trajopt::TerminalCostExpansion;
using alprox::trajopt::TerminalIneqExpansion;
using alprox::trajopt::TerminalModel;
using alprox::trajopt::TrajOptProblem;

struct LqStageData {
  MatrixXd A, B, Q, R;
  VectorXd c;
  double ubar = -1.0;  // < 0: no bounds
};

inline StageModel make_lq_stage(const LqStageData& d) {
  StageModel stage;
  const int nx = static_cast<int>(d.A.rows());
  const int nu = static_cast<int>(d.B.cols());
  stage.nx = nx;
  stage.nu = nu;
  stage.nx_next = nx;
  stage.nh = d.ubar > 0 ? 2 * nu : 0;
  stage.eval_cost = [d](const VectorXd& x, const VectorXd& u) {
    return 0.5 * x.dot(d.Q * x) + 0.5 * u.dot(d.R * u);
  };
  stage.eval_cost_expansion = [d, nx, nu](const VectorXd& x,
                                          const VectorXd& u) {
    CostExpansion e;
    e.value = 0.5 * x.dot(d.Q * x) + 0.5 * u.dot(d.R * u);
    e.lx = d.Q * x;
    e.lu = d.R * u;
    e.lxx = d.Q;
    e.luu = d.R;
    e.lxu = MatrixXd::Zero(nx, nu);
    return e;
  };
  stage.eval_dyn = [d](const VectorXd& x, const VectorXd& u,
                       const VectorXd& xn) -> VectorXd {
    return d.A * x + d.B * u + d.c - xn;
  };
  stage.eval_dyn_expansion = [d, nx](const VectorXd& x, const VectorXd& u,
                                     const VectorXd& xn) {
    DynExpansion e;
    e.defect = d.A * x + d.B * u + d.c - xn;
    e.fx = d.A;
    e.fu = d.B;
    e.fxn = -MatrixXd::Identity(nx, nx);
    return e;
  };
  if (stage.nh > 0) {
    stage.eval_ineq = [d, nu](const VectorXd&, const VectorXd& u) {
      VectorXd h(2 * nu);
      h.head(nu) = u.array() - d.ubar;
      h.tail(nu) = -u.array() - d.ubar;
      return h;
    };
    stage.eval_ineq_expansion = [d, nx, nu](const VectorXd&,
                                            const VectorXd& u) {
      IneqExpansion e;
      e.value.resize(2 * nu);
      e.value.head(nu) = u.array() - d.ubar;
      e.value.tail(nu) = -u.array() - d.ubar;
      e.hx = MatrixXd::Zero(2 * nu, nx);
      e.hu.resize(2 * nu, nu);
      e.hu.topRows(nu) = MatrixXd::Identity(nu, nu);
      e.hu.bottomRows(nu) = -MatrixXd::Identity(nu, nu);
      return e;
    };
  }
  return stage;
}

inline TerminalModel make_lq_terminal(const MatrixXd& qn) {
  TerminalModel term;
  term.nx = static_cast<int>(qn.rows());
  term.nh = 0;
  term.eval_cost = [qn](const VectorXd& x) { return 0.5 * x.dot(qn * x); };
  term.eval_cost_expansion = [qn](const VectorXd& x) {
    TerminalCostExpansion e;
    e.value = 0.5 * x.dot(qn * x);
    e.lx = qn * x;
    e.lxx = qn;
    return e;
  };
  return term;
}

inline TrajOptProblem make_lq_problem(const LqStageData& d, const MatrixXd& qn,
                                      const VectorXd& x0, int horizon) {
  TrajOptProblem prob;
  for (int k = 0; k < horizon; ++k) prob.stages.push_back(make_lq_stage(d));
  prob.terminal = make_lq_terminal(qn);
  prob.x0_bar = x0;
  return prob;
}

inline TrajOptProblem random_lq_problem(Rng& rng, int horizon, int nx, int nu,
                                        bool with_bounds) {
  LqStageData d;
  d.A = rng.matrix(nx, nx) * (0.8 / std::sqrt(double(nx)));
  d.A.diagonal().array() += 0.3;
  d.B = rng.matrix(nx, nu);
  d.c = rng.vector(nx) * 0.1;
  d.Q = rng.spd(nx, 0.2);
  d.R = rng.spd(nu, 0.2);
  d.ubar = with_bounds ? rng.uniform(0.1, 0.5) : -1.0;
  const MatrixXd qn = rng.spd(nx, 0.5);
  const VectorXd x0 = rng.vector(nx);
  return make_lq_problem(d, qn, x0, horizon);
}

/// Classical Riccati recursion for the unconstrained LQR, returning the
/// feedback gains of u = K x (our sign convention: du = k + K dx).
inline std::vector<MatrixXd> riccati_gains(const MatrixXd& A,
                                           const MatrixXd& B,
                                           const MatrixXd& Q,
                                           const MatrixXd& R,
                                           const MatrixXd& QN, int horizon) {
  std::vector<MatrixXd> gains(static_cast<std::size_t>(horizon));
  MatrixXd P = QN;
  for (int k = horizon - 1; k >= 0; --k) {
    const MatrixXd G = R + B.transpose() * P * B;
    const MatrixXd K = -G.fullPivLu().solve(B.transpose() * P * A);
    gains[static_cast<std::size_t>(k)] = K;
    P = Q + A.transpose() * P * (A + B * K);
    P = 0.5 * (P + P.transpose()).eval();
  }
  return gains;
}

}  // namespace testutil
