#include <doctest.h>

#include "alprox/nlp/solver.hpp"
#include "alprox/trajopt/solver.hpp"
#include "trajopt_util.hpp"

using namespace alprox;
using namespace alprox::trajopt;
using testutil::Rng;

namespace {

Trajectory random_trajectory(Rng& rng, const TrajOptProblem& prob) {
  Trajectory traj = make_zero_like(prob);
  for (auto& x : traj.xs) x = rng.vector(x.size());
  for (auto& u : traj.us) u = rng.vector(u.size());
  for (auto& l : traj.lams) l = rng.vector(l.size());
  for (auto& v : traj.nus) v = rng.vector(v.size());
  return traj;
}

PenaltyState test_penalty(double mu, double rho) {
  PenaltyState pen;
  pen.mu_e = mu;
  pen.mu_i = mu;
  pen.rho = rho;
  return pen;
}

}  // namespace

TEST_CASE("stage_q_params: gradient blocks at a feasible, dual-consistent "
          "point reduce to cost plus value terms") {
  Rng rng(3);
  const auto prob = testutil::random_lq_problem(rng, 3, 2, 1, false);
  const auto& stage = prob.stages[0];

  Trajectory traj = make_initial_trajectory(prob);
  traj.xs[0] = rng.vector(2);
  traj.us[0] = rng.vector(1);
  // consistent next state: zero defect
  traj.xs[1] = stage.eval_dyn(traj.xs[0], traj.us[0],
                              VectorXd::Zero(2)) +
               VectorXd::Zero(2);

  const auto evals = evaluate_expansions(prob, traj);
  REQUIRE(infty_norm(evals.dyns[0].defect) < 1e-12);

  ValueModel next;
  next.Vx = rng.vector(2);
  next.Vxx = rng.spd(2);
  const PenaltyState pen = test_penalty(0.1, 0.0);
  const auto q = stage_q_params(stage, next, evals.costs[0], evals.dyns[0],
                                evals.ineqs[0], VectorXd::Zero(2),
                                VectorXd(0), VectorXd::Zero(2), VectorXd(0),
                                pen);
  CHECK(infty_norm(VectorXd(q.Qx - evals.costs[0].lx)) < 1e-12);
  CHECK(infty_norm(VectorXd(q.Qu - evals.costs[0].lu)) < 1e-12);
  CHECK(infty_norm(VectorXd(q.Qxn - next.Vx)) < 1e-12);
  // curvature keeps the Gauss-Newton penalty terms
  const MatrixXd quu_expect =
      evals.costs[0].luu +
      (2.0 / pen.mu_e) * evals.dyns[0].fu.transpose() * evals.dyns[0].fu;
  CHECK(infty_norm(MatrixXd(q.Quu - quu_expect)) < 1e-12);
}

TEST_CASE("stage_q_params: symbolic expansion on a 2-state LQR stage") {
  Rng rng(5);
  const auto prob = testutil::random_lq_problem(rng, 2, 2, 2, true);
  const auto& stage = prob.stages[0];
  Trajectory traj = random_trajectory(rng, prob);
  const auto evals = evaluate_expansions(prob, traj);
  ValueModel next;
  next.Vx = rng.vector(2);
  next.Vxx = rng.spd(2);
  const PenaltyState pen = test_penalty(0.25, 0.0);
  const VectorXd nu_l = rng.vector(4).cwiseAbs();
  const auto q = stage_q_params(stage, next, evals.costs[0], evals.dyns[0],
                                evals.ineqs[0], traj.lams[1], traj.nus[0],
                                traj.lams[1], nu_l, pen);

  // independent symbolic expansion
  const auto& dyn = evals.dyns[0];
  const auto& ineq = evals.ineqs[0];
  MatrixXd quu = evals.costs[0].luu +
                 (2.0 / pen.mu_e) * dyn.fu.transpose() * dyn.fu;
  VectorXd qu = evals.costs[0].lu;
  const VectorXd pi = traj.lams[1] + dyn.defect / pen.mu_e;
  qu += dyn.fu.transpose() * (2.0 * pi - traj.lams[1]);
  for (int j = 0; j < 4; ++j) {
    const double shifted = nu_l(j) + ineq.value(j) / pen.mu_i;
    if (shifted >= 0.0) {
      quu += (2.0 / pen.mu_i) * ineq.hu.row(j).transpose() * ineq.hu.row(j);
      qu += ineq.hu.row(j).transpose() * (2.0 * shifted - traj.nus[0](j));
    }
  }
  CHECK(infty_norm(MatrixXd(q.Quu - quu)) < 1e-12);
  CHECK(infty_norm(VectorXd(q.Qu - qu)) < 1e-12);
}

TEST_CASE("backward_pass: Riccati limit on the unconstrained LQR") {
  Rng rng(17);
  testutil::LqStageData d;
  const int nx = 3, nu = 2, horizon = 12;
  d.A = rng.matrix(nx, nx) * 0.4;
  d.A.diagonal().array() += 0.5;
  d.B = rng.matrix(nx, nu);
  d.c = rng.vector(nx) * 0.2;
  d.Q = rng.spd(nx, 0.3);
  d.R = rng.spd(nu, 0.3);
  const MatrixXd qn = rng.spd(nx, 0.5);
  const auto prob = testutil::make_lq_problem(d, qn, rng.vector(nx), horizon);

  Trajectory traj = make_initial_trajectory(prob);
  Trajectory anchor = traj;
  PenaltyState pen = test_penalty(1e-9, 0.0);
  const auto bp = backward_pass(prob, traj, anchor, pen);
  REQUIRE(bp.ok);

  const auto gains = testutil::riccati_gains(d.A, d.B, d.Q, d.R, qn, horizon);
  for (int k = 0; k < horizon; ++k) {
    CHECK(infty_norm(MatrixXd(bp.gains[k].K_fb - gains[k])) <= 1e-6);
  }
}

TEST_CASE("backward_pass: inactive inequalities match the equality-only pass") {
  Rng rng(29);
  auto prob_bounded = testutil::random_lq_problem(rng, 4, 2, 2, true);
  // push the bounds far out so nothing activates
  for (auto& stage : prob_bounded.stages) {
    auto inner = stage.eval_ineq;
    stage.eval_ineq = [inner](const VectorXd& x, const VectorXd& u) {
      return VectorXd(inner(x, u).array() - 1e3);
    };
    auto inner_exp = stage.eval_ineq_expansion;
    stage.eval_ineq_expansion = [inner_exp](const VectorXd& x,
                                            const VectorXd& u) {
      auto e = inner_exp(x, u);
      e.value.array() -= 1e3;
      return e;
    };
  }
  auto prob_plain = prob_bounded;
  for (auto& stage : prob_plain.stages) {
    stage.nh = 0;
    stage.eval_ineq = nullptr;
    stage.eval_ineq_expansion = nullptr;
  }

  Rng rng2(71);
  Trajectory traj = random_trajectory(rng2, prob_plain);
  Trajectory traj_b = traj;
  for (auto& v : traj_b.nus) v.setZero();
  // nus of prob_bounded have rows; rebuild with correct shapes
  traj_b.nus.clear();
  for (int k = 0; k < prob_bounded.horizon(); ++k) {
    traj_b.nus.push_back(VectorXd::Zero(prob_bounded.stages[k].nh));
  }
  traj_b.nus.push_back(VectorXd::Zero(0));

  Trajectory anchor = traj;
  for (auto& v : anchor.nus) v = VectorXd::Zero(v.size());
  Trajectory anchor_b = traj_b;

  PenaltyState pen = test_penalty(0.05, 1e-6);
  const auto bp_plain = backward_pass(prob_plain, traj, anchor, pen);
  const auto bp_bound = backward_pass(prob_bounded, traj_b, anchor_b, pen);
  REQUIRE(bp_plain.ok);
  REQUIRE(bp_bound.ok);
  for (int k = 0; k < 4; ++k) {
    CHECK(bp_bound.gains[k].active.empty());
    CHECK(infty_norm(VectorXd(bp_plain.gains[k].k_ff -
                              bp_bound.gains[k].k_ff)) < 1e-10);
    CHECK(infty_norm(MatrixXd(bp_plain.gains[k].K_fb -
                              bp_bound.gains[k].K_fb)) < 1e-10);
  }
  CHECK(infty_norm(VectorXd(bp_plain.dx0 - bp_bound.dx0)) < 1e-10);
}

TEST_CASE("backward_pass: N=1 scalar stage matches a dense saddle solve") {
  // one stage, one state, one control, one active constraint row
  testutil::LqStageData d;
  d.A = MatrixXd::Constant(1, 1, 1.2);
  d.B = MatrixXd::Constant(1, 1, 0.7);
  d.c = VectorXd::Constant(1, 0.1);
  d.Q = MatrixXd::Constant(1, 1, 2.0);
  d.R = MatrixXd::Constant(1, 1, 0.5);
  d.ubar = 0.3;
  const MatrixXd qn = MatrixXd::Constant(1, 1, 3.0);
  const auto prob = testutil::make_lq_problem(d, qn, VectorXd::Ones(1), 1);

  Trajectory traj = make_initial_trajectory(prob);
  traj.us[0] = VectorXd::Constant(1, 0.4);  // upper bound violated
  traj.xs[1] = VectorXd::Constant(1, 0.9);
  traj.lams[1] = VectorXd::Constant(1, -0.2);
  traj.nus[0] = VectorXd::Zero(2);
  Trajectory anchor = traj;
  anchor.nus[0] = VectorXd::Zero(2);

  PenaltyState pen = test_penalty(0.1, 0.0);
  const auto bp = backward_pass(prob, traj, anchor, pen);
  REQUIRE(bp.ok);
  REQUIRE(bp.gains[0].active == std::vector<int>{0});  // u - ubar >= 0 shifted

  // hand-assembled 4x4 stage system over (du, dxn, dlam, dnu_0)
  const auto evals = evaluate_expansions(prob, traj);
  MatrixXd k4 = MatrixXd::Zero(4, 4);
  k4(0, 0) = d.R(0, 0);
  k4(1, 1) = qn(0, 0);  // terminal Vxx
  k4(0, 2) = d.B(0, 0);
  k4(2, 0) = d.B(0, 0);
  k4(1, 2) = -1.0;
  k4(2, 1) = -1.0;
  k4(2, 2) = -pen.mu_e;
  k4(0, 3) = 1.0;  // h_u of the upper bound row
  k4(3, 0) = 1.0;
  k4(3, 3) = -pen.mu_i;
  VectorXd rhs(4);
  const double lam = traj.lams[1](0);
  rhs(0) = -(d.R(0, 0) * traj.us[0](0) + d.B(0, 0) * lam +
             1.0 * traj.nus[0](0));
  rhs(1) = -(qn(0, 0) * traj.xs[1](0) + (-1.0) * lam);
  rhs(2) = -(evals.dyns[0].defect(0) + pen.mu_e * (anchor.lams[1](0) - lam));
  rhs(3) = -(evals.ineqs[0].value(0) +
             pen.mu_i * (anchor.nus[0](0) - traj.nus[0](0)));
  const VectorXd sol = testutil::dense_solve(k4, rhs);
  CHECK(bp.gains[0].k_ff(0) == doctest::Approx(sol(0)).epsilon(1e-10));
  CHECK(bp.gains[0].a_ff(0) == doctest::Approx(sol(1)).epsilon(1e-10));
  CHECK(bp.gains[0].xi_ff(0) == doctest::Approx(sol(2)).epsilon(1e-10));
  CHECK(bp.gains[0].zeta_ff(0) == doctest::Approx(sol(3)).epsilon(1e-10));
}

TEST_CASE("rollout: alpha = 0 returns the current trajectory") {
  Rng rng(41);
  const auto prob = testutil::random_lq_problem(rng, 3, 2, 1, true);
  Trajectory traj = make_initial_trajectory(prob);
  Trajectory anchor = traj;
  PenaltyState pen = test_penalty(0.1, 1e-6);
  const auto bp = backward_pass(prob, traj, anchor, pen);
  REQUIRE(bp.ok);
  const Trajectory cand = forward_linear_rollout(prob, traj, bp, 0.0);
  for (std::size_t k = 0; k < traj.xs.size(); ++k) {
    CHECK(infty_norm(VectorXd(cand.xs[k] - traj.xs[k])) == 0.0);
  }
  for (std::size_t k = 0; k < traj.us.size(); ++k) {
    CHECK(infty_norm(VectorXd(cand.us[k] - traj.us[k])) == 0.0);
  }
}

TEST_CASE("rollout: ddp direction equals the stacked-NLP Newton step") {
  Rng rng(53);
  for (int trial = 0; trial < 8; ++trial) {
    const int horizon = rng.integer(1, 4);
    const int nx = rng.integer(1, 3);
    const int nu = rng.integer(1, 2);
    const bool bounds = trial % 2 == 0;
    const auto prob = testutil::random_lq_problem(rng, horizon, nx, nu, bounds);

    Trajectory traj = random_trajectory(rng, prob);
    Trajectory anchor = random_trajectory(rng, prob);
    for (auto& v : anchor.nus) v = v.cwiseAbs();

    PenaltyState pen = test_penalty(std::pow(10.0, rng.uniform(-3, -1)),
                                    trial % 2 == 0 ? 1e-5 : 0.0);

    double hint = 0.0;
    const auto evals = evaluate_expansions(prob, traj);
    const auto bp = backward_pass(prob, traj, anchor, pen, evals, hint);
    REQUIRE(bp.ok);
    REQUIRE(bp.regularizations == 0);
    const auto dir = compute_direction(prob, traj, bp);

    // same step through the flat NLP view
    const auto nlp_prob = stacked_nlp_view(prob);
    const VectorXd z = stack_trajectory(prob, traj);
    VectorXd lam_stacked(nlp_prob.ne);
    VectorXd nu_stacked(nlp_prob.ni);
    VectorXd lam_l_stacked(nlp_prob.ne);
    VectorXd nu_l_stacked(nlp_prob.ni);
    int row = 0;
    lam_stacked.head(nx) = traj.lams[0];
    lam_l_stacked.head(nx) = anchor.lams[0];
    row += nx;
    for (int k = 0; k < horizon; ++k) {
      lam_stacked.segment(row, nx) = traj.lams[k + 1];
      lam_l_stacked.segment(row, nx) = anchor.lams[k + 1];
      row += nx;
    }
    row = 0;
    for (int k = 0; k < horizon; ++k) {
      if (prob.stages[k].nh == 0) continue;
      nu_stacked.segment(row, prob.stages[k].nh) = traj.nus[k];
      nu_l_stacked.segment(row, prob.stages[k].nh) = anchor.nus[k];
      row += prob.stages[k].nh;
    }

    nlp::NlpIterate center;
    center.x = stack_trajectory(prob, anchor);
    center.lam = lam_l_stacked;
    center.nu = nu_l_stacked;
    center.x_prev = center.x;

    double hint2 = 0.0;
    const auto step = nlp::pd_newton_step(
        nlp_prob, z, lam_stacked, nu_stacked, center, pen,
        nlp::HessianMode::GaussNewton, kkt::RegParams{}, hint2);
    REQUIRE(step.ok);

    const Trajectory dtraj = unstack_trajectory(prob, VectorXd(z + step.dx));
    for (int k = 0; k <= horizon; ++k) {
      CHECK(infty_norm(VectorXd(traj.xs[k] + dir.dxs[k] - dtraj.xs[k])) <=
            1e-7);
    }
    for (int k = 0; k < horizon; ++k) {
      CHECK(infty_norm(VectorXd(traj.us[k] + dir.dus[k] - dtraj.us[k])) <=
            1e-7);
    }
    // multiplier blocks
    row = 0;
    CHECK(infty_norm(VectorXd(dir.dlams[0] - step.dlam.head(nx))) <= 1e-7);
    row = nx;
    for (int k = 0; k < horizon; ++k) {
      CHECK(infty_norm(VectorXd(dir.dlams[k + 1] -
                                step.dlam.segment(row, nx))) <= 1e-7);
      row += nx;
    }
    row = 0;
    for (int k = 0; k < horizon; ++k) {
      if (prob.stages[k].nh == 0) continue;
      CHECK(infty_norm(VectorXd(dir.dnus[k] -
                                step.dnu.segment(row, prob.stages[k].nh))) <=
            1e-7);
      row += prob.stages[k].nh;
    }
  }
}

TEST_CASE("rollout consistency: full step solves the stage KKT conditions") {
  Rng rng(67);
  const auto prob = testutil::random_lq_problem(rng, 5, 2, 2, true);
  Trajectory traj = random_trajectory(rng, prob);
  Trajectory anchor = random_trajectory(rng, prob);
  for (auto& v : anchor.nus) v = v.cwiseAbs();
  PenaltyState pen = test_penalty(0.05, 1e-5);

  double hint = 0.0;
  const auto evals = evaluate_expansions(prob, traj);
  const auto bp = backward_pass(prob, traj, anchor, pen, evals, hint);
  REQUIRE(bp.ok);
  const auto dir = compute_direction(prob, traj, bp);

  // at every node, the linearized shifted KKT conditions must hold
  for (int k = 0; k < 5; ++k) {
    const auto& dyn = evals.dyns[k];
    const auto& ineq = evals.ineqs[k];
    const auto& cost = evals.costs[k];
    const VectorXd lam_new = traj.lams[k + 1] + dir.dlams[k + 1];
    const VectorXd nu_new = traj.nus[k] + dir.dnus[k];

    // linearized dynamics-multiplier relation
    const VectorXd lin_defect = dyn.defect + dyn.fx * dir.dxs[k] +
                                dyn.fu * dir.dus[k] + dyn.fxn * dir.dxs[k + 1];
    CHECK(infty_norm(VectorXd(lin_defect +
                              pen.mu_e * (anchor.lams[k + 1] - lam_new))) <=
          1e-9);

    // active multiplier rows
    for (std::size_t i = 0; i < bp.gains[k].active.size(); ++i) {
      const int j = bp.gains[k].active[i];
      const double lin_h = ineq.value(j) + ineq.hx.row(j).dot(dir.dxs[k]) +
                           ineq.hu.row(j).dot(dir.dus[k]);
      CHECK(std::abs(lin_h + pen.mu_i * (anchor.nus[k](j) - nu_new(j))) <=
            1e-9);
    }
    // inactive rows are driven to zero
    for (int j = 0; j < prob.stages[k].nh; ++j) {
      if (std::find(bp.gains[k].active.begin(), bp.gains[k].active.end(),
                    j) == bp.gains[k].active.end()) {
        CHECK(std::abs(nu_new(j)) <= 1e-12);
      }
    }

    // control stationarity of the stage Lagrangian with the prox term
    VectorXd stat_u = cost.lu + cost.luu * dir.dus[k] +
                      cost.lxu.transpose() * dir.dxs[k] +
                      dyn.fu.transpose() * lam_new +
                      pen.rho * (traj.us[k] + dir.dus[k] - anchor.us[k]);
    for (int j = 0; j < prob.stages[k].nh; ++j) {
      stat_u.noalias() += ineq.hu.row(j).transpose() * nu_new(j);
    }
    CHECK(infty_norm(stat_u) <= 1e-9);
  }
  // initial condition block
  const VectorXd lam0_new = traj.lams[0] + dir.dlams[0];
  CHECK(infty_norm(VectorXd(evals.init_residual + dir.dxs[0] +
                            pen.mu_e * (anchor.lams[0] - lam0_new))) <= 1e-9);
}

TEST_CASE("traj_merit: feasible and dual-consistent trajectory costs only") {
  Rng rng(83);
  const auto prob = testutil::random_lq_problem(rng, 4, 2, 1, false);
  Trajectory traj = make_initial_trajectory(prob);
  // roll the dynamics out exactly
  for (int k = 0; k < 4; ++k) {
    traj.us[k] = rng.vector(1) * 0.1;
    traj.xs[k + 1] =
        prob.stages[k].eval_dyn(traj.xs[k], traj.us[k], VectorXd::Zero(2));
  }
  traj.xs[0] = prob.x0_bar;
  Trajectory anchor = traj;  // zero multipliers, centers at the point
  PenaltyState pen = test_penalty(0.1, 0.3);

  double cost = prob.terminal.eval_cost(traj.xs[4]);
  for (int k = 0; k < 4; ++k) {
    cost += prob.stages[k].eval_cost(traj.xs[k], traj.us[k]);
  }
  CHECK(traj_merit(prob, traj, anchor, pen) == doctest::Approx(cost));
}

TEST_CASE("traj_merit: single stage equals the stacked nlp merit") {
  Rng rng(97);
  const auto prob = testutil::random_lq_problem(rng, 1, 2, 2, true);
  Trajectory traj = random_trajectory(rng, prob);
  Trajectory anchor = random_trajectory(rng, prob);
  for (auto& v : anchor.nus) v = v.cwiseAbs();
  PenaltyState pen = test_penalty(0.2, 1e-3);

  const double m_traj = traj_merit(prob, traj, anchor, pen);

  const auto nlp_prob = stacked_nlp_view(prob);
  const VectorXd z = stack_trajectory(prob, traj);
  VectorXd lam(nlp_prob.ne), lam_l(nlp_prob.ne);
  lam << traj.lams[0], traj.lams[1];
  lam_l << anchor.lams[0], anchor.lams[1];
  nlp::NlpIterate center;
  center.x = stack_trajectory(prob, anchor);
  center.lam = lam_l;
  center.nu = anchor.nus[0];
  center.x_prev = center.x;
  const double m_nlp =
      nlp::merit_value(nlp_prob, z, lam, traj.nus[0], center, pen);
  CHECK(m_traj == doctest::Approx(m_nlp).epsilon(1e-12));
}

TEST_CASE("traj_merit_slope matches finite differences of the merit") {
  Rng rng(109);
  for (int trial = 0; trial < 6; ++trial) {
    const auto prob =
        testutil::random_lq_problem(rng, rng.integer(1, 4), 2, 1, true);
    Trajectory traj = random_trajectory(rng, prob);
    Trajectory anchor = random_trajectory(rng, prob);
    for (auto& v : anchor.nus) v = v.cwiseAbs();
    PenaltyState pen = test_penalty(0.3, 1e-4);
    const auto evals = evaluate_expansions(prob, traj);

    // any direction works; take the solver's own
    double hint = 0.0;
    const auto bp = backward_pass(prob, traj, anchor, pen, evals, hint);
    REQUIRE(bp.ok);
    const auto dir = compute_direction(prob, traj, bp);
    const double slope = traj_merit_slope(prob, traj, anchor, pen, evals, dir);

    const double eps = 1e-6;
    const double mp = traj_merit(prob, apply_direction(traj, dir, eps),
                                 anchor, pen);
    const double mm = traj_merit(prob, apply_direction(traj, dir, -eps),
                                 anchor, pen);
    const double fd = (mp - mm) / (2.0 * eps);
    CHECK(slope == doctest::Approx(fd).epsilon(1e-5));
    CHECK(slope < 0.0);  // inertia-corrected direction must descend
  }
}

TEST_CASE("linesearch: exact quadratic model accepts alpha = 1") {
  Rng rng(121);
  const auto prob = testutil::random_lq_problem(rng, 4, 2, 1, false);
  Trajectory traj = make_initial_trajectory(prob);
  Trajectory anchor = traj;
  PenaltyState pen = test_penalty(0.1, 1e-6);
  const auto evals = evaluate_expansions(prob, traj);
  double hint = 0.0;
  const auto bp = backward_pass(prob, traj, anchor, pen, evals, hint);
  REQUIRE(bp.ok);
  const auto dir = compute_direction(prob, traj, bp);
  const double slope = traj_merit_slope(prob, traj, anchor, pen, evals, dir);
  const double merit0 = traj_merit(prob, traj, anchor, pen);
  const auto out = linesearch_and_accept(prob, traj, anchor, pen, dir,
                                         LineSearchParams{}, merit0, slope);
  REQUIRE(out.ok);
  CHECK(out.alpha == 1.0);
  CHECK(out.merit < merit0);
}

TEST_CASE("solve: unconstrained LQR converges and matches Riccati rollout") {
  Rng rng(131);
  const auto prob = testutil::random_lq_problem(rng, 10, 2, 2, false);
  BclParams bcl;
  bcl.eps_abs = 1e-9;
  const auto result = solve(prob, make_initial_trajectory(prob), bcl,
                            LineSearchParams{}, HessianMode::GaussNewton);
  CHECK(result.report.status == SolveStatus::Converged);
  CHECK(result.report.dual_residual <= 1e-9);
  CHECK(result.report.primal_infeasibility <= 1e-9);
  CHECK(infty_norm(VectorXd(result.trajectory.xs[0] - prob.x0_bar)) <= 1e-9);
}

TEST_CASE("solve: warm start at the optimum converges immediately") {
  Rng rng(139);
  const auto prob = testutil::random_lq_problem(rng, 6, 2, 1, false);
  BclParams bcl;
  bcl.eps_abs = 1e-9;
  const auto first = solve(prob, make_initial_trajectory(prob), bcl,
                           LineSearchParams{}, HessianMode::GaussNewton);
  REQUIRE(first.report.status == SolveStatus::Converged);
  const auto second = solve(prob, first.trajectory, bcl, LineSearchParams{},
                            HessianMode::GaussNewton);
  CHECK(second.report.status == SolveStatus::Converged);
  CHECK(second.report.total_inner_iters == 0);
}

TEST_CASE("solve: stacked-NLP cross-validation on random bounded problems") {
  Rng rng(149);
  for (int trial = 0; trial < 10; ++trial) {
    const int horizon = rng.integer(2, 5);
    const int nx = rng.integer(1, 3);
    const int nu = rng.integer(1, 3);
    const auto prob = testutil::random_lq_problem(rng, horizon, nx, nu, true);

    BclParams bcl;
    bcl.eps_abs = 1e-9;
    const auto ddp = solve(prob, make_initial_trajectory(prob), bcl,
                           LineSearchParams{}, HessianMode::GaussNewton);
    REQUIRE(ddp.report.status == SolveStatus::Converged);

    const auto nlp_prob = stacked_nlp_view(prob);
    nlp::NlpIterate sol;
    const auto report = nlp::solve(
        nlp_prob, VectorXd::Zero(nlp_prob.n), VectorXd::Zero(nlp_prob.ne),
        VectorXd::Zero(nlp_prob.ni), bcl, LineSearchParams{},
        nlp::HessianMode::GaussNewton, &sol);
    REQUIRE(report.status == SolveStatus::Converged);

    const Trajectory flat = unstack_trajectory(prob, sol.x);
    for (int k = 0; k <= horizon; ++k) {
      CHECK(infty_norm(VectorXd(flat.xs[k] - ddp.trajectory.xs[k])) <= 1e-6);
    }
    for (int k = 0; k < horizon; ++k) {
      CHECK(infty_norm(VectorXd(flat.us[k] - ddp.trajectory.us[k])) <= 1e-6);
    }
  }
}

TEST_CASE("stacked_nlp_view: objective and Jacobian structure") {
  Rng rng(157);
  const auto prob = testutil::random_lq_problem(rng, 3, 2, 1, true);
  const auto nlp_prob = stacked_nlp_view(prob);
  const auto lay = stacked_layout(prob);

  Trajectory traj = random_trajectory(rng, prob);
  const VectorXd z = stack_trajectory(prob, traj);

  double cost = prob.terminal.eval_cost(traj.xs[3]);
  for (int k = 0; k < 3; ++k) {
    cost += prob.stages[k].eval_cost(traj.xs[k], traj.us[k]);
  }
  CHECK(nlp_prob.eval_f(z) == doctest::Approx(cost));

  // dynamics rows touch only (x_k, u_k, x_{k+1})
  const MatrixXd jc = nlp_prob.eval_Jc(z);
  int row = prob.stages[0].nx;
  for (int k = 0; k < 3; ++k) {
    const auto& stage = prob.stages[k];
    for (int other = 0; other <= 3; ++other) {
      if (other == k || other == k + 1) continue;
      CHECK(infty_norm(MatrixXd(jc.block(row, lay.x_offsets[other],
                                         stage.nx_next, 2))) == 0.0);
    }
    row += stage.nx_next;
  }
}
