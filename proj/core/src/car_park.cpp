#include "alprox/problems/car_park.hpp"

#include <cmath>

namespace alprox::problems {

using trajopt::CostExpansion;
using trajopt::DynExpansion;
using trajopt::IneqExpansion;
using trajopt::StageModel;
using trajopt::TerminalCostExpansion;
using trajopt::TerminalModel;

int CarParkConfig::horizon() const {
  return static_cast<int>(std::lround(T / dt));
}

void CarParkConfig::validate() const {
  if (dt <= 0 || T <= 0 || d_axle <= 0 || a_max <= 0 || w_max <= 0) {
    throw std::invalid_argument("CarParkConfig: parameters must be positive");
  }
  const double steps = T / dt;
  if (std::abs(steps - std::lround(steps)) > 1e-9) {
    throw std::invalid_argument("CarParkConfig: T must be a multiple of dt");
  }
  check_dim(x0.size(), 4, "car x0");
  check_dim(q_diag.size(), 4, "car q_diag");
  check_dim(r_diag.size(), 2, "car r_diag");
  check_dim(qn_diag.size(), 4, "car qn_diag");
}

VectorXd car_step(const CarParkConfig& cfg, const VectorXd& x,
                  const VectorXd& u) {
  const double theta = x(2), v = x(3);
  const double w = u(0), a = u(1);
  const double d = cfg.d_axle;
  const double r = v * cfg.dt;  // rolling distance of the front wheels
  const double s = std::sin(w), cw = std::cos(w);
  const double g = s * r / d;
  if (std::abs(g) > 1.0) {
    throw std::domain_error("car_step: speed too large for the wheel model");
  }
  const double beta = std::asin(g);
  const double q = std::sqrt(d * d - r * r * s * s);
  const double b = r * cw + d - q;  // body travel along the heading

  VectorXd xn(4);
  xn(0) = x(0) + b * std::cos(theta);
  xn(1) = x(1) + b * std::sin(theta);
  xn(2) = theta + beta;
  xn(3) = v + a * cfg.dt;
  return xn;
}

CarStepJacobians car_step_jacobians(const CarParkConfig& cfg,
                                    const VectorXd& x, const VectorXd& u) {
  const double theta = x(2), v = x(3);
  const double w = u(0);
  const double d = cfg.d_axle;
  const double dt = cfg.dt;
  const double r = v * dt;
  const double s = std::sin(w), cw = std::cos(w);
  const double q = std::sqrt(d * d - r * r * s * s);
  const double b = r * cw + d - q;

  const double db_dv = dt * (cw + r * s * s / q);
  const double db_dw = -r * s + r * r * s * cw / q;
  const double dbeta_dv = s * dt / q;
  const double dbeta_dw = cw * r / q;

  CarStepJacobians jac;
  jac.jx = MatrixXd::Identity(4, 4);
  jac.jx(0, 2) = -b * std::sin(theta);
  jac.jx(0, 3) = db_dv * std::cos(theta);
  jac.jx(1, 2) = b * std::cos(theta);
  jac.jx(1, 3) = db_dv * std::sin(theta);
  jac.jx(2, 3) = dbeta_dv;

  jac.ju = MatrixXd::Zero(4, 2);
  jac.ju(0, 0) = db_dw * std::cos(theta);
  jac.ju(1, 0) = db_dw * std::sin(theta);
  jac.ju(2, 0) = dbeta_dw;
  jac.ju(3, 1) = dt;
  return jac;
}

TrajOptProblem make_car_park(const CarParkConfig& cfg) {
  cfg.validate();
  const MatrixXd Q = cfg.q_diag.asDiagonal();
  const MatrixXd R = cfg.r_diag.asDiagonal();
  const MatrixXd QN = cfg.qn_diag.asDiagonal();
  const VectorXd u_bar =
      (Eigen::Vector2d() << cfg.w_max, cfg.a_max).finished();

  StageModel stage;
  stage.nx = 4;
  stage.nu = 2;
  stage.nx_next = 4;
  stage.nh = 4;

  stage.eval_cost = [Q, R](const VectorXd& x, const VectorXd& u) {
    return 0.5 * x.dot(Q * x) + 0.5 * u.dot(R * u);
  };
  stage.eval_cost_expansion = [Q, R](const VectorXd& x, const VectorXd& u) {
    CostExpansion e;
    e.value = 0.5 * x.dot(Q * x) + 0.5 * u.dot(R * u);
    e.lx = Q * x;
    e.lu = R * u;
    e.lxx = Q;
    e.luu = R;
    e.lxu = MatrixXd::Zero(4, 2);
    return e;
  };
  stage.eval_dyn = [cfg](const VectorXd& x, const VectorXd& u,
                         const VectorXd& xn) -> VectorXd {
    return car_step(cfg, x, u) - xn;
  };
  stage.eval_dyn_expansion = [cfg](const VectorXd& x, const VectorXd& u,
                                   const VectorXd& xn) {
    DynExpansion e;
    e.defect = car_step(cfg, x, u) - xn;
    const CarStepJacobians jac = car_step_jacobians(cfg, x, u);
    e.fx = jac.jx;
    e.fu = jac.ju;
    e.fxn = -MatrixXd::Identity(4, 4);
    return e;
  };
  stage.eval_ineq = [u_bar](const VectorXd&, const VectorXd& u) {
    VectorXd h(4);
    h.head(2) = u - u_bar;
    h.tail(2) = -u - u_bar;
    return h;
  };
  stage.eval_ineq_expansion = [u_bar](const VectorXd&, const VectorXd& u) {
    IneqExpansion e;
    e.value.resize(4);
    e.value.head(2) = u - u_bar;
    e.value.tail(2) = -u - u_bar;
    e.hx = MatrixXd::Zero(4, 4);
    e.hu.resize(4, 2);
    e.hu.topRows(2) = MatrixXd::Identity(2, 2);
    e.hu.bottomRows(2) = -MatrixXd::Identity(2, 2);
    return e;
  };

  TerminalModel term;
  term.nx = 4;
  term.nh = 0;
  term.eval_cost = [QN](const VectorXd& x) { return 0.5 * x.dot(QN * x); };
  term.eval_cost_expansion = [QN](const VectorXd& x) {
    TerminalCostExpansion e;
    e.value = 0.5 * x.dot(QN * x);
    e.lx = QN * x;
    e.lxx = QN;
    return e;
  };

  TrajOptProblem prob;
  prob.stages.assign(static_cast<std::size_t>(cfg.horizon()), stage);
  prob.terminal = term;
  prob.x0_bar = cfg.x0;
  return prob;
}

}  // namespace alprox::problems
