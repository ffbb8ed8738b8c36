#include "alprox/kkt/saddle.hpp"

namespace alprox::kkt {

void SaddleSystem::validate() const {
  check_dim(H.cols(), H.rows(), "SaddleSystem H square");
  if (Jeq.size() > 0) check_dim(Jeq.cols(), H.rows(), "SaddleSystem Jeq cols");
  if (Jineq_active.size() > 0) {
    check_dim(Jineq_active.cols(), H.rows(), "SaddleSystem Jineq cols");
  }
  check_dim(rhs.rows(), dim(), "SaddleSystem rhs rows");
  if (mu_e <= 0.0 || mu_i <= 0.0) {
    throw std::invalid_argument("SaddleSystem: penalties must be positive");
  }
}

MatrixXd SaddleSystem::assemble(double delta) const {
  const Eigen::Index n = n_primal();
  const Eigen::Index ne = Jeq.rows();
  const Eigen::Index na = Jineq_active.rows();
  MatrixXd k = MatrixXd::Zero(dim(), dim());
  k.topLeftCorner(n, n) = 0.5 * (H + H.transpose());
  k.topLeftCorner(n, n).diagonal().array() += delta;
  if (ne > 0) {
    k.block(n, 0, ne, n) = Jeq;
    k.block(0, n, n, ne) = Jeq.transpose();
    k.block(n, n, ne, ne).diagonal().setConstant(-mu_e);
  }
  if (na > 0) {
    k.block(n + ne, 0, na, n) = Jineq_active;
    k.block(0, n + ne, n, na) = Jineq_active.transpose();
    k.bottomRightCorner(na, na).diagonal().setConstant(-mu_i);
  }
  return k;
}

namespace {

struct ResidualMonitor {
  bool enabled = false;
  double worst = 0.0;
  long count = 0;
};
ResidualMonitor g_monitor;

void monitor_record(const MatrixXd& k, const MatrixXd& x,
                    const MatrixXd& rhs) {
  if (!g_monitor.enabled) return;
  const double ratio =
      infty_norm(MatrixXd(k * x - rhs)) / (1.0 + infty_norm(rhs));
  g_monitor.worst = std::max(g_monitor.worst, ratio);
  g_monitor.count++;
}

InertiaRecord to_record(const Inertia& inr, double delta) {
  return {inr.n_pos, inr.n_neg, inr.n_zero, delta};
}

bool inertia_matches(const Inertia& inr, const InertiaTarget& target) {
  return inr.n_pos == target.n_pos && inr.n_neg == target.n_neg &&
         inr.n_zero == 0;
}

// Symmetric Jacobi equilibration. The saddle systems mix value-Hessian
// entries that grow like 1/mu with dual pivots of size mu; scaling keeps
// the pivot tolerance meaningful. Inertia is congruence-invariant.
VectorXd equilibrate(const MatrixXd& k) {
  VectorXd d(k.rows());
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    const double row_max = k.row(i).cwiseAbs().maxCoeff();
    d(i) = row_max > 0.0 ? 1.0 / std::sqrt(row_max) : 1.0;
  }
  return d;
}

// Factors D K D and solves with one step of iterative refinement on the
// unscaled system.
struct ScaledFactor {
  BunchKaufman ldlt;
  VectorXd d;
  bool ok = false;

  void compute(const MatrixXd& k) {
    d = equilibrate(k);
    const MatrixXd scaled = d.asDiagonal() * k * d.asDiagonal();
    ldlt.compute(scaled);
    ok = !ldlt.singular();
  }

  MatrixXd solve(const MatrixXd& k, const MatrixXd& rhs) const {
    MatrixXd x =
        d.asDiagonal() * ldlt.solve(MatrixXd(d.asDiagonal() * rhs));
    const MatrixXd resid = rhs - k * x;
    x += d.asDiagonal() * ldlt.solve(MatrixXd(d.asDiagonal() * resid));
    return x;
  }
};
}  // namespace

SaddleSolution factor_and_solve(const SaddleSystem& sys) {
  sys.validate();
  const MatrixXd k = sys.assemble();
  ScaledFactor factor;
  factor.compute(k);
  SaddleSolution sol;
  sol.inertia = to_record(factor.ldlt.inertia(), 0.0);
  sol.factor_ok = factor.ok;
  if (sol.factor_ok) {
    sol.x = factor.solve(k, sys.rhs);
    monitor_record(k, sol.x, sys.rhs);
  }
  return sol;
}

SaddleSolution regularize_and_solve(const SaddleSystem& sys,
                                    const RegParams& params,
                                    double& delta_hint) {
  sys.validate();
  const InertiaTarget target = saddle_target(sys);
  ScaledFactor factor;
  double delta = 0.0;
  while (true) {
    const MatrixXd k = sys.assemble(delta);
    factor.compute(k);
    if (factor.ok && inertia_matches(factor.ldlt.inertia(), target)) {
      SaddleSolution sol;
      sol.inertia = to_record(factor.ldlt.inertia(), delta);
      sol.factor_ok = true;
      sol.x = factor.solve(k, sys.rhs);
      monitor_record(k, sol.x, sys.rhs);
      if (delta > 0.0) delta_hint = delta / params.growth;
      return sol;
    }
    if (delta == 0.0) {
      delta = std::max(params.delta0, delta_hint);
    } else {
      delta *= params.growth;
    }
    if (delta > params.delta_max) {
      SaddleSolution sol;
      sol.inertia = to_record(factor.ldlt.inertia(), delta);
      sol.factor_ok = false;
      return sol;
    }
  }
}

InertiaRecord regularize_until_correct(SaddleSystem& sys,
                                       const InertiaTarget& target,
                                       const RegParams& params) {
  sys.validate();
  ScaledFactor factor;
  double delta = 0.0;
  while (true) {
    factor.compute(sys.assemble(delta));
    if (factor.ok && inertia_matches(factor.ldlt.inertia(), target)) break;
    delta = delta == 0.0 ? params.delta0 : delta * params.growth;
    if (delta > params.delta_max) break;
  }
  sys.H.diagonal().array() += delta;
  return to_record(factor.ldlt.inertia(), delta);
}

void enable_residual_monitor(bool on) { g_monitor.enabled = on; }

void reset_residual_monitor() {
  g_monitor.worst = 0.0;
  g_monitor.count = 0;
}

double residual_monitor_worst() { return g_monitor.worst; }

long residual_monitor_count() { return g_monitor.count; }

}  // namespace alprox::kkt
