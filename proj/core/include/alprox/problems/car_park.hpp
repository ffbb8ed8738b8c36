/// @file car_park.hpp
/// @brief Kinematic car parking benchmark with box-bounded controls.
#pragma once

#include "alprox/trajopt/problem.hpp"

namespace alprox::problems {

using trajopt::TrajOptProblem;

/// Kinematic car with state (x, y, theta, v) and controls (w, a): front
/// wheel angle and acceleration. The goal is to park at the origin.
struct CarParkConfig {
  double d_axle = 2.0;   // front-rear axle distance [m]
  double dt = 0.03;      // timestep [s]
  double T = 15.0;       // horizon [s]
  double a_max = 10.0;   // |a| bound [m/s^2]
  double w_max = 0.5;    // |w| bound
  VectorXd x0 = (Eigen::Vector4d() << 1.0, 1.0, 3.0 * M_PI / 2.0, 0.0)
                    .finished();
  // quadratic weights toward the origin, calibrated so the default task
  // parks (final state within 0.1 of the origin per coordinate)
  VectorXd q_diag = (Eigen::Vector4d() << 1e-3, 1e-3, 1e-3, 1e-4).finished();
  VectorXd r_diag = (Eigen::Vector2d() << 1e-1, 1e-2).finished();
  VectorXd qn_diag =
      100.0 * (Eigen::Vector4d() << 1.0, 1.0, 1.0, 0.3).finished();

  int horizon() const;
  void validate() const;
};

/// One explicit kinematic step of the car model.
VectorXd car_step(const CarParkConfig& cfg, const VectorXd& x,
                  const VectorXd& u);

/// Jacobians of car_step with respect to state and control.
struct CarStepJacobians {
  MatrixXd jx;  // 4 x 4
  MatrixXd ju;  // 4 x 2
};
CarStepJacobians car_step_jacobians(const CarParkConfig& cfg,
                                    const VectorXd& x, const VectorXd& u);

TrajOptProblem make_car_park(const CarParkConfig& cfg);

}  // namespace alprox::problems
