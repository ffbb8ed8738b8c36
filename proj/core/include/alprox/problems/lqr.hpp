/// @file lqr.hpp
/// @brief Bound-constrained LQR benchmarks and their polyhedral-obstacle
///        extension.
#pragma once

#include "alprox/trajopt/problem.hpp"

namespace alprox::problems {

using trajopt::TrajOptProblem;

/// Discrete LQR with control bounds:
///   min sum 1/2 x^T Q x + 1/2 u^T R u + 1/2 x_N^T QN x_N
///   s.t. x' = A x + B u + c,  x_0 = x0,  -u_bar <= u <= u_bar.
/// Non-finite entries of u_bar leave that control unbounded.
struct BoundLqrConfig {
  MatrixXd A;
  MatrixXd B;
  VectorXd c;
  MatrixXd Q;
  MatrixXd R;
  MatrixXd QN;
  VectorXd u_bar;
  VectorXd x0;
  int N = 0;

  void validate() const;
};

enum class DiscretizeScheme { ZeroOrderHold, ExplicitEuler };

/// Discretizes x_dot = Ac x + u + c_cont (identity input matrix) with the
/// chosen scheme. Zero-order hold uses the exact matrix exponential.
struct DiscreteSystem {
  MatrixXd A;
  MatrixXd B;
  VectorXd c;
};
DiscreteSystem discretize_rotational(const MatrixXd& Ac,
                                     const VectorXd& c_cont, double dt,
                                     DiscretizeScheme scheme);

TrajOptProblem make_bound_lqr(const BoundLqrConfig& cfg);

/// Polyhedron P = {x : C x <= d} whose interior must be avoided; the
/// node-wise constraint is h(x) = -max_i (C x - d)_i <= 0 with the
/// semi-smooth gradient taken from the lowest-index maximizing row.
struct PolyhedralObstacle {
  MatrixXd C;
  VectorXd d;
};

double obstacle_value(const PolyhedralObstacle& obs, const VectorXd& x);
VectorXd obstacle_gradient(const PolyhedralObstacle& obs, const VectorXd& x);

/// Bound LQR plus one avoidance row per obstacle at every node, terminal
/// included.
TrajOptProblem make_obstacle_lqr(const BoundLqrConfig& cfg,
                                 const std::vector<PolyhedralObstacle>& obstacles);

}  // namespace alprox::problems
