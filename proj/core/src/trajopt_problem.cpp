#include "alprox/trajopt/problem.hpp"

namespace alprox::trajopt {

void TrajOptProblem::validate() const {
  if (stages.empty()) {
    throw std::invalid_argument("TrajOptProblem: empty horizon");
  }
  check_dim(x0_bar.size(), stages.front().nx, "x0_bar");
  for (std::size_t k = 0; k + 1 < stages.size(); ++k) {
    check_dim(stages[k + 1].nx, stages[k].nx_next, "stage dimension chain");
  }
  check_dim(terminal.nx, stages.back().nx_next, "terminal state dimension");
  for (const auto& stage : stages) {
    if (!stage.eval_cost || !stage.eval_cost_expansion || !stage.eval_dyn ||
        !stage.eval_dyn_expansion) {
      throw std::invalid_argument("StageModel: missing evaluator");
    }
    if (stage.nh > 0 && (!stage.eval_ineq || !stage.eval_ineq_expansion)) {
      throw std::invalid_argument("StageModel: missing inequality evaluator");
    }
  }
  if (!terminal.eval_cost || !terminal.eval_cost_expansion) {
    throw std::invalid_argument("TerminalModel: missing evaluator");
  }
  if (terminal.nh > 0 && (!terminal.eval_ineq || !terminal.eval_ineq_expansion)) {
    throw std::invalid_argument("TerminalModel: missing inequality evaluator");
  }
}

void Trajectory::validate(const TrajOptProblem& prob) const {
  const std::size_t n = prob.stages.size();
  if (xs.size() != n + 1 || us.size() != n || lams.size() != n + 1 ||
      nus.size() != n + 1) {
    throw DimensionError("Trajectory: wrong number of nodes");
  }
  check_dim(xs[0].size(), prob.stages[0].nx, "x[0]");
  check_dim(lams[0].size(), prob.stages[0].nx, "lam[0]");
  for (std::size_t k = 0; k < n; ++k) {
    const auto& stage = prob.stages[k];
    check_dim(xs[k].size(), stage.nx, "x[k]");
    check_dim(us[k].size(), stage.nu, "u[k]");
    check_dim(xs[k + 1].size(), stage.nx_next, "x[k+1]");
    check_dim(lams[k + 1].size(), stage.nx_next, "lam[k+1]");
    check_dim(nus[k].size(), stage.nh, "nu[k]");
  }
  check_dim(nus[n].size(), prob.terminal.nh, "nu[N]");
}

Trajectory make_initial_trajectory(const TrajOptProblem& prob) {
  Trajectory traj = make_zero_like(prob);
  for (auto& x : traj.xs) x = prob.x0_bar;
  return traj;
}

Trajectory make_zero_like(const TrajOptProblem& prob) {
  const std::size_t n = prob.stages.size();
  Trajectory traj;
  traj.xs.resize(n + 1);
  traj.us.resize(n);
  traj.lams.resize(n + 1);
  traj.nus.resize(n + 1);
  traj.xs[0] = VectorXd::Zero(prob.stages[0].nx);
  traj.lams[0] = VectorXd::Zero(prob.stages[0].nx);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& stage = prob.stages[k];
    traj.us[k] = VectorXd::Zero(stage.nu);
    traj.xs[k + 1] = VectorXd::Zero(stage.nx_next);
    traj.lams[k + 1] = VectorXd::Zero(stage.nx_next);
    traj.nus[k] = VectorXd::Zero(stage.nh);
  }
  traj.nus[n] = VectorXd::Zero(prob.terminal.nh);
  return traj;
}

}  // namespace alprox::trajopt
