/// @file solver.hpp
/// @brief Constrained DDP on the proximal primal-dual augmented Lagrangian:
///        stage KKT backward pass, linear rollout, Armijo search and the
///        BCL outer loop.
#pragma once

#include "alprox/kkt/saddle.hpp"
#include "alprox/nlp/problem.hpp"
#include "alprox/trajopt/problem.hpp"

namespace alprox::trajopt {

using nlp::BclParams;
using nlp::HessianMode;
using nlp::LineSearchParams;
using nlp::PenaltyState;

/// Quadratic value model V_k(x + dx) ~ V + Vx^T dx + 1/2 dx^T Vxx dx.
struct ValueModel {
  VectorXd Vx;
  MatrixXd Vxx;
};

/// Feedforward/feedback sensitivities of one stage subproblem. The
/// multiplier rows (zeta, Z) cover only the shifted active set.
struct StageGains {
  VectorXd k_ff;
  MatrixXd K_fb;
  VectorXd a_ff;
  MatrixXd A_fb;
  VectorXd xi_ff;
  MatrixXd Xi_fb;
  VectorXd zeta_ff;
  MatrixXd Z_fb;
  std::vector<int> active;
};

struct TerminalGains {
  VectorXd zeta_ff;
  MatrixXd Z_fb;
  std::vector<int> active;
};

/// Cached values (no derivatives) of every node, for merit evaluations.
struct TrajValues {
  std::vector<double> costs;        // N
  std::vector<VectorXd> defects;    // N
  std::vector<VectorXd> ineqs;      // N
  double terminal_cost = 0.0;
  VectorXd terminal_ineq;
  VectorXd init_residual;           // x_0 - x0_bar
};

/// Cached first/second-order data of every node.
struct TrajExpansions {
  std::vector<CostExpansion> costs;
  std::vector<DynExpansion> dyns;
  std::vector<IneqExpansion> ineqs;
  TerminalCostExpansion terminal_cost;
  TerminalIneqExpansion terminal_ineq;
  VectorXd init_residual;
};

TrajValues evaluate_values(const TrajOptProblem& prob, const Trajectory& traj);
TrajExpansions evaluate_expansions(const TrajOptProblem& prob,
                                   const Trajectory& traj);

/// Second-order data of the stage primal-dual Q-function around the
/// current point, with the next value model absorbed into the x' blocks.
struct StageQParams {
  VectorXd Qx, Qu, Qxn;
  MatrixXd Qxx, Qux, Quxn, Qxnxn, Qxnx, Quu;
  std::vector<int> active;
};

/// Expands the augmented primal-dual Q-function of stage k at the current
/// trajectory point. `lam` is the dynamics multiplier (node k+1), `nu` the
/// path multiplier, (lam_l, nu_l) their BCL estimates.
StageQParams stage_q_params(const StageModel& stage,
                            const ValueModel& next_value,
                            const CostExpansion& cost, const DynExpansion& dyn,
                            const IneqExpansion& ineq, const VectorXd& lam,
                            const VectorXd& nu, const VectorXd& lam_l,
                            const VectorXd& nu_l, const PenaltyState& pen);

struct BackwardPassResult {
  std::vector<StageGains> gains;    // N entries
  std::vector<ValueModel> values;   // N + 1 entries
  TerminalGains terminal;
  VectorXd dx0;                     // initial-node primal step
  VectorXd dlam0;                   // initial-node multiplier step
  int regularizations = 0;          // stage solves that needed delta > 0
  double max_delta = 0.0;
  bool ok = false;
};

/// Sweeps k = N..0, solving the regularized stage KKT systems for the
/// feedforward column and feedback block, and propagates the value model.
/// `anchor` carries the BCL multiplier estimates (lams, nus) and the
/// proximal centers (xs, us). `extra_active`, when given, holds rows
/// (per stage, index horizon() for the terminal node) merged into the
/// shifted active sets; the solver uses it to anticipate rows whose
/// breakpoint the current direction crosses almost immediately.
BackwardPassResult backward_pass(const TrajOptProblem& prob,
                                 const Trajectory& traj,
                                 const Trajectory& anchor,
                                 const PenaltyState& pen,
                                 const TrajExpansions& evals,
                                 double& delta_hint,
                                 const std::vector<std::vector<int>>*
                                     extra_active = nullptr);

/// Convenience overload that evaluates the expansions itself.
BackwardPassResult backward_pass(const TrajOptProblem& prob,
                                 const Trajectory& traj,
                                 const Trajectory& anchor,
                                 const PenaltyState& pen);

/// Primal-dual direction obtained by the linear rollout of the gains.
struct TrajDirection {
  std::vector<VectorXd> dxs, dus, dlams, dnus;
};

TrajDirection compute_direction(const TrajOptProblem& prob,
                                const Trajectory& traj,
                                const BackwardPassResult& bp);

/// Candidate trajectory: current point plus alpha times the rollout
/// direction (one alpha for every primal and dual block).
Trajectory forward_linear_rollout(const TrajOptProblem& prob,
                                  const Trajectory& traj,
                                  const BackwardPassResult& bp, double alpha);

Trajectory apply_direction(const Trajectory& traj, const TrajDirection& dir,
                           double alpha);

/// Trajectory-level proximal primal-dual merit: stage/terminal costs plus
/// the augmented Lagrangian penalties of every constraint block and the
/// proximal term around the anchor's (xs, us).
double traj_merit(const TrajOptProblem& prob, const Trajectory& traj,
                  const Trajectory& anchor, const PenaltyState& pen);
double traj_merit(const TrajOptProblem& prob, const TrajValues& vals,
                  const Trajectory& traj, const Trajectory& anchor,
                  const PenaltyState& pen);

/// Directional derivative of traj_merit along dir with the active sets
/// frozen at the current point.
double traj_merit_slope(const TrajOptProblem& prob, const Trajectory& traj,
                        const Trajectory& anchor, const PenaltyState& pen,
                        const TrajExpansions& evals, const TrajDirection& dir);

struct TrajResiduals {
  double rl_norm = 0.0;     // stacked inner-loop criterion
  double dual_inf = 0.0;    // stacked stationarity without proximal terms
  double primal_inf = 0.0;  // max over (init, defects, [h]_+)
};

TrajResiduals traj_residuals(const TrajOptProblem& prob,
                             const Trajectory& traj, const Trajectory& anchor,
                             const PenaltyState& pen,
                             const TrajExpansions& evals);

struct LineSearchOutcome {
  Trajectory trajectory;
  double alpha = 0.0;
  double merit = 0.0;
  bool ok = false;
};

/// Armijo backtracking on traj_merit along the rollout direction.
/// Requires slope < 0.
LineSearchOutcome linesearch_and_accept(const TrajOptProblem& prob,
                                        const Trajectory& traj,
                                        const Trajectory& anchor,
                                        const PenaltyState& pen,
                                        const TrajDirection& dir,
                                        const LineSearchParams& ls,
                                        double merit0, double slope);

struct TrajSolveReport {
  SolveStatus status = SolveStatus::MaxIters;
  int outer_iters = 0;
  int total_inner_iters = 0;
  int total_regularizations = 0;
  double dual_residual = 0.0;
  double primal_infeasibility = 0.0;
  std::vector<TraceRecord> trace;
};

struct TrajSolveResult {
  Trajectory trajectory;
  TrajSolveReport report;
};

/// Extra knobs of the DDP outer loop on top of the shared BCL schedule.
struct ProxSchedule {
  double rho_max = 1e4;
  double rho_escalate = 10.0;  // on non-descent directions
  double rho_relax = 0.5;      // toward rho_init on consecutive full steps
};

TrajSolveResult solve(const TrajOptProblem& prob,
                      const Trajectory& initial_traj, const BclParams& bcl,
                      const LineSearchParams& ls, HessianMode hess_mode,
                      const ProxSchedule& prox = {});

/// Equivalent flat NLP over (x_0..x_N, u_0..u_{N-1}) for cross-validation:
/// equalities (x_0 - x0_bar, all f_k), inequalities (all h_k, h_N).
/// The Lagrangian Hessian is the block-diagonal cost Hessian (Gauss-Newton).
nlp::NlpProblem stacked_nlp_view(const TrajOptProblem& prob);

/// Layout helpers for the stacked view.
struct StackedLayout {
  std::vector<int> x_offsets;  // N + 1
  std::vector<int> u_offsets;  // N
  int n = 0;
  int ne = 0;
  int ni = 0;
};
StackedLayout stacked_layout(const TrajOptProblem& prob);
VectorXd stack_trajectory(const TrajOptProblem& prob, const Trajectory& traj);
Trajectory unstack_trajectory(const TrajOptProblem& prob, const VectorXd& z);

}  // namespace alprox::trajopt
