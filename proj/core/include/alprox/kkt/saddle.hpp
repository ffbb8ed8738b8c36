/// @file saddle.hpp
/// @brief Assembly, inertia-controlled regularization and factorization of
///        the primal-dual saddle-point systems.
#pragma once

#include <Eigen/Core>

#include "alprox/kkt/ldlt.hpp"
#include "alprox/math.hpp"

namespace alprox::kkt {

/// One saddle-point system
///
///   [ H + delta*I   Jeq^T          Jineq^T ] [ dx   ]   [ rhs_x  ]
///   [ Jeq           -mu_e*I        0       ] [ dlam ] = [ rhs_e  ]
///   [ Jineq         0              -mu_i*I ] [ dnu  ]   [ rhs_i  ]
///
/// H is the (possibly proximal-shifted) primal block; Jineq_active holds
/// only the active inequality rows. The dual diagonal is negative definite
/// since mu_e, mu_i > 0.
struct SaddleSystem {
  MatrixXd H;
  MatrixXd Jeq;
  MatrixXd Jineq_active;
  double mu_e = 1.0;
  double mu_i = 1.0;
  MatrixXd rhs;

  Eigen::Index n_primal() const { return H.rows(); }
  Eigen::Index n_dual() const { return Jeq.rows() + Jineq_active.rows(); }
  Eigen::Index dim() const { return n_primal() + n_dual(); }

  /// Dense symmetric matrix with delta added to the primal diagonal.
  MatrixXd assemble(double delta = 0.0) const;

  void validate() const;
};

struct InertiaRecord {
  int n_pos = 0;
  int n_neg = 0;
  int n_zero = 0;
  double delta = 0.0;  // primal regularization that was added
};

/// Expected inertia of a well-posed saddle system: all primal pivots
/// positive, all dual pivots negative, no zero pivots.
struct InertiaTarget {
  int n_pos = 0;
  int n_neg = 0;
};

inline InertiaTarget saddle_target(const SaddleSystem& sys) {
  return {static_cast<int>(sys.n_primal()), static_cast<int>(sys.n_dual())};
}

struct SaddleSolution {
  MatrixXd x;  // dim() x rhs.cols(), valid only when factor_ok
  InertiaRecord inertia;
  bool factor_ok = false;
};

/// Factors the assembled system once (no regularization) and solves for
/// every right-hand side column. factor_ok is false on a zero pivot.
SaddleSolution factor_and_solve(const SaddleSystem& sys);

/// Schedule for the primal regularization loop.
struct RegParams {
  double delta0 = 1e-9;
  double growth = 8.0;
  double delta_max = 1e6;
};

/// Grows delta geometrically until the factorization reports the target
/// inertia. delta_hint seeds the first nonzero try (last successful
/// delta / growth from a previous solve); it is updated on success.
/// Returns factor_ok = false when delta_max is exceeded.
SaddleSolution regularize_and_solve(const SaddleSystem& sys,
                                    const RegParams& params,
                                    double& delta_hint);

/// Spec-shaped variant: applies the found delta to sys.H in place and
/// reports the final inertia. Solutions are discarded.
InertiaRecord regularize_until_correct(SaddleSystem& sys,
                                       const InertiaTarget& target,
                                       const RegParams& params = {});

/// Instrumentation for verification runs: when enabled, every successful
/// solve records ||K w - rhs||_inf / (1 + ||rhs||_inf) and the worst ratio
/// seen so far can be queried. Not thread-safe; meant for single-solve
/// verification, disabled by default.
void enable_residual_monitor(bool on);
void reset_residual_monitor();
double residual_monitor_worst();
long residual_monitor_count();

}  // namespace alprox::kkt
