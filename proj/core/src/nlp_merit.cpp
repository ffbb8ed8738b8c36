#include "alprox/nlp/merit.hpp"

#include <algorithm>

namespace alprox::nlp {

VectorXd NlpProblem::c(const VectorXd& x) const {
  if (ne == 0) return VectorXd(0);
  VectorXd v = eval_c(x);
  check_dim(v.size(), ne, "NlpProblem::c output");
  return v;
}

VectorXd NlpProblem::h(const VectorXd& x) const {
  if (ni == 0) return VectorXd(0);
  VectorXd v = eval_h(x);
  check_dim(v.size(), ni, "NlpProblem::h output");
  return v;
}

MatrixXd NlpProblem::Jc(const VectorXd& x) const {
  if (ne == 0) return MatrixXd(0, n);
  MatrixXd j = eval_Jc(x);
  check_dim(j.rows(), ne, "NlpProblem::Jc rows");
  check_dim(j.cols(), n, "NlpProblem::Jc cols");
  return j;
}

MatrixXd NlpProblem::Jh(const VectorXd& x) const {
  if (ni == 0) return MatrixXd(0, n);
  MatrixXd j = eval_Jh(x);
  check_dim(j.rows(), ni, "NlpProblem::Jh rows");
  check_dim(j.cols(), n, "NlpProblem::Jh cols");
  return j;
}

MatrixXd NlpProblem::lag_hess(const VectorXd& x, const VectorXd& lam,
                              const VectorXd& nu, HessianMode mode) const {
  switch (mode) {
    case HessianMode::Identity:
      return MatrixXd::Identity(n, n);
    case HessianMode::GaussNewton:
      return eval_lag_hess(x, VectorXd::Zero(ne), VectorXd::Zero(ni));
    case HessianMode::Exact:
      return eval_lag_hess(x, lam, nu);
  }
  return MatrixXd::Identity(n, n);
}

void NlpProblem::validate_point(const VectorXd& x, const VectorXd& lam,
                                const VectorXd& nu) const {
  check_dim(x.size(), n, "primal point");
  check_dim(lam.size(), ne, "equality multiplier");
  check_dim(nu.size(), ni, "inequality multiplier");
}

NlpIterate NlpIterate::zero(const NlpProblem& prob) {
  NlpIterate it;
  it.x = VectorXd::Zero(prob.n);
  it.lam = VectorXd::Zero(prob.ne);
  it.nu = VectorXd::Zero(prob.ni);
  it.x_prev = VectorXd::Zero(prob.n);
  return it;
}

void BclParams::validate() const {
  const bool ok = mu_f > 0 && mu_f < 1 && alpha_bcl > 0 && alpha_bcl < 1 &&
                  beta_bcl > 0 && beta_bcl < 1 && mu_e_floor > 0 &&
                  mu_i_floor > 0 && eps_abs > 0 && omega0 > 0 && eps0 > 0 &&
                  mu_e_init > 0 && mu_i_init > 0 && rho_init >= 0 &&
                  max_outer_iters > 0 && max_inner_iters > 0;
  if (!ok) throw std::invalid_argument("BclParams: invalid hyper-parameters");
}

bool ActiveSet::contains(int j) const {
  return std::binary_search(indices.begin(), indices.end(), j);
}

double lagrangian(const NlpProblem& prob, const VectorXd& x,
                  const VectorXd& lam, const VectorXd& nu) {
  prob.validate_point(x, lam, nu);
  double value = prob.eval_f(x);
  if (prob.ne > 0) value += lam.dot(prob.c(x));
  if (prob.ni > 0) value += nu.dot(prob.h(x));
  return value;
}

namespace {
VectorXd lagrangian_grad_x(const NlpProblem& prob, const VectorXd& x,
                           const VectorXd& lam, const VectorXd& nu) {
  VectorXd g = prob.eval_grad_f(x);
  check_dim(g.size(), prob.n, "grad_f output");
  if (prob.ne > 0) g.noalias() += prob.Jc(x).transpose() * lam;
  if (prob.ni > 0) g.noalias() += prob.Jh(x).transpose() * nu;
  return g;
}
}  // namespace

KktResiduals kkt_residuals(const NlpProblem& prob, const VectorXd& x,
                           const VectorXd& lam, const VectorXd& nu) {
  prob.validate_point(x, lam, nu);
  KktResiduals res;
  res.dual_inf = infty_norm(lagrangian_grad_x(prob, x, lam, nu));
  res.primal_inf = primal_infeasibility(prob, x);
  return res;
}

double primal_infeasibility(const NlpProblem& prob, const VectorXd& x) {
  double value = 0.0;
  if (prob.ne > 0) value = std::max(value, infty_norm(prob.c(x)));
  if (prob.ni > 0) value = std::max(value, infty_norm(positive_part(prob.h(x))));
  return value;
}

ShiftedMultipliers shifted_multipliers(const NlpProblem& prob,
                                       const VectorXd& x,
                                       const VectorXd& lam_l,
                                       const VectorXd& nu_l, double mu_e,
                                       double mu_i) {
  ShiftedMultipliers out;
  out.lam_hat = prob.ne > 0 ? VectorXd(lam_l + prob.c(x) / mu_e) : VectorXd(0);
  out.nu_hat =
      prob.ni > 0 ? positive_part(nu_l + prob.h(x) / mu_i) : VectorXd(0);
  return out;
}

VectorXd shifted_slack(const NlpProblem& prob, const VectorXd& x,
                       const VectorXd& nu_l, double mu_i) {
  if (prob.ni == 0) return VectorXd(0);
  return negative_part(prob.h(x) + mu_i * nu_l);
}

ActiveSet active_set(const NlpProblem& prob, const VectorXd& x,
                     const VectorXd& nu_l, double mu_i) {
  ActiveSet set;
  if (prob.ni == 0) return set;
  const VectorXd shifted = nu_l + prob.h(x) / mu_i;
  for (int j = 0; j < prob.ni; ++j) {
    if (shifted(j) >= 0.0) set.indices.push_back(j);
  }
  return set;
}

double merit_value(const NlpProblem& prob, const VectorXd& x,
                   const VectorXd& lam, const VectorXd& nu,
                   const NlpIterate& iterate_center, const PenaltyState& pen) {
  prob.validate_point(x, lam, nu);
  double value = prob.eval_f(x);
  if (prob.ne > 0) {
    const VectorXd c = prob.c(x);
    const VectorXd& lam_l = iterate_center.lam;
    value += (c + pen.mu_e * lam_l).squaredNorm() / (2.0 * pen.mu_e);
    value += (c + pen.mu_e * (lam_l - lam)).squaredNorm() / (2.0 * pen.mu_e);
  }
  if (prob.ni > 0) {
    const VectorXd shifted =
        positive_part(prob.h(x) + pen.mu_i * iterate_center.nu);
    value += shifted.squaredNorm() / (2.0 * pen.mu_i);
    value += (shifted - pen.mu_i * nu).squaredNorm() / (2.0 * pen.mu_i);
  }
  if (pen.rho > 0.0) {
    value += 0.5 * pen.rho * (x - iterate_center.x_prev).squaredNorm();
  }
  return value;
}

VectorXd merit_gradient(const NlpProblem& prob, const VectorXd& x,
                        const VectorXd& lam, const VectorXd& nu,
                        const NlpIterate& iterate_center,
                        const PenaltyState& pen) {
  prob.validate_point(x, lam, nu);
  VectorXd grad = VectorXd::Zero(prob.n + prob.ne + prob.ni);
  auto gx = grad.head(prob.n);
  gx = prob.eval_grad_f(x);
  if (pen.rho > 0.0) gx += pen.rho * (x - iterate_center.x_prev);

  const ShiftedMultipliers sm = shifted_multipliers(
      prob, x, iterate_center.lam, iterate_center.nu, pen.mu_e, pen.mu_i);
  if (prob.ne > 0) {
    gx.noalias() += prob.Jc(x).transpose() * (2.0 * sm.lam_hat - lam);
    grad.segment(prob.n, prob.ne) = pen.mu_e * (lam - sm.lam_hat);
  }
  if (prob.ni > 0) {
    // only active rows contribute through h(x); inactive rows keep the
    // pure mu_i nu_j quadratic
    const MatrixXd jh = prob.Jh(x);
    const ActiveSet act = active_set(prob, x, iterate_center.nu, pen.mu_i);
    for (int j : act.indices) {
      gx.noalias() += jh.row(j).transpose() * (2.0 * sm.nu_hat(j) - nu(j));
    }
    grad.tail(prob.ni) = pen.mu_i * (nu - sm.nu_hat);
  }
  return grad;
}

RlResidual rl_residual(const NlpProblem& prob, const VectorXd& x,
                       const VectorXd& lam, const VectorXd& nu,
                       const NlpIterate& iterate_center,
                       const PenaltyState& pen) {
  prob.validate_point(x, lam, nu);
  RlResidual out;
  out.r = VectorXd::Zero(prob.n + prob.ne + prob.ni);
  out.r.head(prob.n) = lagrangian_grad_x(prob, x, lam, nu) +
                       pen.rho * (x - iterate_center.x_prev);
  const ShiftedMultipliers sm = shifted_multipliers(
      prob, x, iterate_center.lam, iterate_center.nu, pen.mu_e, pen.mu_i);
  if (prob.ne > 0) {
    out.r.segment(prob.n, prob.ne) = pen.mu_e * (sm.lam_hat - lam);
  }
  if (prob.ni > 0) {
    out.r.tail(prob.ni) = pen.mu_i * (sm.nu_hat - nu);
  }
  out.norm = infty_norm(out.r);
  return out;
}

}  // namespace alprox::nlp
