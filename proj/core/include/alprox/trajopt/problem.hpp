/// @file problem.hpp
/// @brief Discrete optimal-control problem data: stage costs, implicit
///        dynamics, path constraints, and primal-dual trajectories.
#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "alprox/math.hpp"

namespace alprox::trajopt {

struct CostExpansion {
  double value = 0.0;
  VectorXd lx;   // nx
  VectorXd lu;   // nu
  MatrixXd lxx;  // nx x nx, symmetric
  MatrixXd lxu;  // nx x nu
  MatrixXd luu;  // nu x nu, symmetric
};

struct DynExpansion {
  VectorXd defect;  // f(x, u, x'), nx_next
  MatrixXd fx;      // nx_next x nx
  MatrixXd fu;      // nx_next x nu
  MatrixXd fxn;     // nx_next x nx_next
};

struct IneqExpansion {
  VectorXd value;  // nh
  MatrixXd hx;     // nh x nx
  MatrixXd hu;     // nh x nu
};

/// One node of the horizon: cost l_k(x, u), implicit dynamics
/// f_k(x, u, x') = 0 and path constraint h_k(x, u) <= 0.
struct StageModel {
  int nx = 0;
  int nu = 0;
  int nx_next = 0;
  int nh = 0;

  std::function<double(const VectorXd&, const VectorXd&)> eval_cost;
  std::function<CostExpansion(const VectorXd&, const VectorXd&)>
      eval_cost_expansion;
  std::function<VectorXd(const VectorXd&, const VectorXd&, const VectorXd&)>
      eval_dyn;
  std::function<DynExpansion(const VectorXd&, const VectorXd&,
                             const VectorXd&)>
      eval_dyn_expansion;
  std::function<VectorXd(const VectorXd&, const VectorXd&)> eval_ineq;
  std::function<IneqExpansion(const VectorXd&, const VectorXd&)>
      eval_ineq_expansion;
};

struct TerminalCostExpansion {
  double value = 0.0;
  VectorXd lx;
  MatrixXd lxx;
};

struct TerminalIneqExpansion {
  VectorXd value;
  MatrixXd hx;
};

struct TerminalModel {
  int nx = 0;
  int nh = 0;
  std::function<double(const VectorXd&)> eval_cost;
  std::function<TerminalCostExpansion(const VectorXd&)> eval_cost_expansion;
  std::function<VectorXd(const VectorXd&)> eval_ineq;
  std::function<TerminalIneqExpansion(const VectorXd&)> eval_ineq_expansion;
};

struct TrajOptProblem {
  std::vector<StageModel> stages;
  TerminalModel terminal;
  VectorXd x0_bar;

  int horizon() const { return static_cast<int>(stages.size()); }

  /// Checks that adjacent stage dimensions chain and that the terminal
  /// model matches the last stage.
  void validate() const;
};

/// Primal-dual trajectory. lams[0] belongs to the initial-condition
/// constraint, lams[k+1] to the dynamics f_k; nus[k] to h_k and nus[N]
/// to the terminal constraint.
struct Trajectory {
  std::vector<VectorXd> xs;    // N + 1
  std::vector<VectorXd> us;    // N
  std::vector<VectorXd> lams;  // N + 1
  std::vector<VectorXd> nus;   // N + 1

  void validate(const TrajOptProblem& prob) const;
};

/// Default initial guess: zero controls, every state a copy of x0_bar,
/// zero multipliers. Dynamics defects are allowed.
Trajectory make_initial_trajectory(const TrajOptProblem& prob);

/// Zero-filled direction/multiplier container shaped like a trajectory.
Trajectory make_zero_like(const TrajOptProblem& prob);

}  // namespace alprox::trajopt
