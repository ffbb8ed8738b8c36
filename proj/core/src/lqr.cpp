#include "alprox/problems/lqr.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace alprox::problems {

using trajopt::CostExpansion;
using trajopt::DynExpansion;
using trajopt::IneqExpansion;
using trajopt::StageModel;
using trajopt::TerminalCostExpansion;
using trajopt::TerminalIneqExpansion;
using trajopt::TerminalModel;

void BoundLqrConfig::validate() const {
  const Eigen::Index nx = A.rows();
  const Eigen::Index nu = B.cols();
  check_dim(A.cols(), nx, "A");
  check_dim(B.rows(), nx, "B rows");
  check_dim(c.size(), nx, "c");
  check_dim(Q.rows(), nx, "Q");
  check_dim(Q.cols(), nx, "Q");
  check_dim(R.rows(), nu, "R");
  check_dim(R.cols(), nu, "R");
  check_dim(QN.rows(), nx, "QN");
  check_dim(QN.cols(), nx, "QN");
  check_dim(u_bar.size(), nu, "u_bar");
  check_dim(x0.size(), nx, "x0");
  if (N <= 0) throw std::invalid_argument("BoundLqrConfig: N must be positive");
  for (Eigen::Index i = 0; i < nu; ++i) {
    if (std::isfinite(u_bar(i)) && u_bar(i) < 0) {
      throw std::invalid_argument("BoundLqrConfig: u_bar must be nonnegative");
    }
  }
}

DiscreteSystem discretize_rotational(const MatrixXd& Ac,
                                     const VectorXd& c_cont, double dt,
                                     DiscretizeScheme scheme) {
  const Eigen::Index nx = Ac.rows();
  check_dim(Ac.cols(), nx, "Ac");
  check_dim(c_cont.size(), nx, "c_cont");
  if (dt <= 0) throw std::invalid_argument("discretize: dt must be positive");

  DiscreteSystem sys;
  if (scheme == DiscretizeScheme::ExplicitEuler) {
    sys.A = MatrixXd::Identity(nx, nx) + dt * Ac;
    sys.B = dt * MatrixXd::Identity(nx, nx);
    sys.c = dt * c_cont;
    return sys;
  }
  // exact hold: exp([[Ac, I], [0, 0]] dt) packs e^{Ac dt} and the input
  // integral int_0^dt e^{Ac s} ds in one call
  MatrixXd aug = MatrixXd::Zero(2 * nx, 2 * nx);
  aug.topLeftCorner(nx, nx) = Ac;
  aug.topRightCorner(nx, nx).setIdentity();
  const MatrixXd expm = (aug * dt).exp();
  sys.A = expm.topLeftCorner(nx, nx);
  sys.B = expm.topRightCorner(nx, nx);
  sys.c = sys.B * c_cont;
  return sys;
}

namespace {

std::vector<int> bounded_entries(const VectorXd& u_bar) {
  std::vector<int> idx;
  for (Eigen::Index i = 0; i < u_bar.size(); ++i) {
    if (std::isfinite(u_bar(i))) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

StageModel make_lqr_stage(const BoundLqrConfig& cfg) {
  const int nx = static_cast<int>(cfg.A.rows());
  const int nu = static_cast<int>(cfg.B.cols());
  const std::vector<int> bounded = bounded_entries(cfg.u_bar);
  const int nb = static_cast<int>(bounded.size());

  StageModel stage;
  stage.nx = nx;
  stage.nu = nu;
  stage.nx_next = nx;
  stage.nh = 2 * nb;

  const MatrixXd A = cfg.A;
  const MatrixXd B = cfg.B;
  const VectorXd c = cfg.c;
  const MatrixXd Q = cfg.Q;
  const MatrixXd R = cfg.R;
  const VectorXd u_bar = cfg.u_bar;

  stage.eval_cost = [Q, R](const VectorXd& x, const VectorXd& u) {
    return 0.5 * x.dot(Q * x) + 0.5 * u.dot(R * u);
  };
  stage.eval_cost_expansion = [Q, R, nx, nu](const VectorXd& x,
                                             const VectorXd& u) {
    CostExpansion e;
    e.value = 0.5 * x.dot(Q * x) + 0.5 * u.dot(R * u);
    e.lx = Q * x;
    e.lu = R * u;
    e.lxx = Q;
    e.luu = R;
    e.lxu = MatrixXd::Zero(nx, nu);
    return e;
  };
  stage.eval_dyn = [A, B, c](const VectorXd& x, const VectorXd& u,
                             const VectorXd& xn) -> VectorXd {
    return A * x + B * u + c - xn;
  };
  stage.eval_dyn_expansion = [A, B, c, nx](const VectorXd& x,
                                           const VectorXd& u,
                                           const VectorXd& xn) {
    DynExpansion e;
    e.defect = A * x + B * u + c - xn;
    e.fx = A;
    e.fu = B;
    e.fxn = -MatrixXd::Identity(nx, nx);
    return e;
  };
  if (nb > 0) {
    stage.eval_ineq = [u_bar, bounded, nb](const VectorXd&,
                                           const VectorXd& u) {
      VectorXd h(2 * nb);
      for (int i = 0; i < nb; ++i) {
        h(i) = u(bounded[i]) - u_bar(bounded[i]);
        h(nb + i) = -u(bounded[i]) - u_bar(bounded[i]);
      }
      return h;
    };
    stage.eval_ineq_expansion = [u_bar, bounded, nb, nx, nu](
                                    const VectorXd&, const VectorXd& u) {
      IneqExpansion e;
      e.value.resize(2 * nb);
      e.hx = MatrixXd::Zero(2 * nb, nx);
      e.hu = MatrixXd::Zero(2 * nb, nu);
      for (int i = 0; i < nb; ++i) {
        e.value(i) = u(bounded[i]) - u_bar(bounded[i]);
        e.value(nb + i) = -u(bounded[i]) - u_bar(bounded[i]);
        e.hu(i, bounded[i]) = 1.0;
        e.hu(nb + i, bounded[i]) = -1.0;
      }
      return e;
    };
  }
  return stage;
}

TerminalModel make_lqr_terminal(const BoundLqrConfig& cfg) {
  const MatrixXd QN = cfg.QN;
  TerminalModel term;
  term.nx = static_cast<int>(cfg.A.rows());
  term.nh = 0;
  term.eval_cost = [QN](const VectorXd& x) { return 0.5 * x.dot(QN * x); };
  term.eval_cost_expansion = [QN](const VectorXd& x) {
    TerminalCostExpansion e;
    e.value = 0.5 * x.dot(QN * x);
    e.lx = QN * x;
    e.lxx = QN;
    return e;
  };
  return term;
}

}  // namespace

TrajOptProblem make_bound_lqr(const BoundLqrConfig& cfg) {
  cfg.validate();
  TrajOptProblem prob;
  prob.stages.assign(static_cast<std::size_t>(cfg.N), make_lqr_stage(cfg));
  prob.terminal = make_lqr_terminal(cfg);
  prob.x0_bar = cfg.x0;
  return prob;
}

double obstacle_value(const PolyhedralObstacle& obs, const VectorXd& x) {
  return -(obs.C * x - obs.d).maxCoeff();
}

VectorXd obstacle_gradient(const PolyhedralObstacle& obs, const VectorXd& x) {
  const VectorXd vals = obs.C * x - obs.d;
  // lowest-index maximizer for a deterministic semi-smooth selection
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < vals.size(); ++i) {
    if (vals(i) > vals(arg)) arg = i;
  }
  return -obs.C.row(arg).transpose();
}

TrajOptProblem make_obstacle_lqr(
    const BoundLqrConfig& cfg,
    const std::vector<PolyhedralObstacle>& obstacles) {
  cfg.validate();
  for (const auto& obs : obstacles) {
    if (obs.C.rows() == 0) {
      throw std::invalid_argument("PolyhedralObstacle: needs at least one row");
    }
    check_dim(obs.C.cols(), cfg.A.rows(), "obstacle C cols");
    check_dim(obs.d.size(), obs.C.rows(), "obstacle d");
  }

  TrajOptProblem prob = make_bound_lqr(cfg);
  const int nx = static_cast<int>(cfg.A.rows());
  const int n_obs = static_cast<int>(obstacles.size());

  auto obs_values = [obstacles, n_obs](const VectorXd& x) {
    VectorXd v(n_obs);
    for (int j = 0; j < n_obs; ++j) v(j) = obstacle_value(obstacles[j], x);
    return v;
  };
  auto obs_jac = [obstacles, n_obs, nx](const VectorXd& x) {
    MatrixXd jac(n_obs, nx);
    for (int j = 0; j < n_obs; ++j) {
      jac.row(j) = obstacle_gradient(obstacles[j], x).transpose();
    }
    return jac;
  };

  for (auto& stage : prob.stages) {
    const int nh_base = stage.nh;
    const int nu = stage.nu;
    auto base_ineq = stage.eval_ineq;
    auto base_exp = stage.eval_ineq_expansion;
    stage.nh = nh_base + n_obs;
    stage.eval_ineq = [base_ineq, obs_values, nh_base, n_obs](
                          const VectorXd& x, const VectorXd& u) {
      VectorXd h(nh_base + n_obs);
      if (nh_base > 0) h.head(nh_base) = base_ineq(x, u);
      h.tail(n_obs) = obs_values(x);
      return h;
    };
    stage.eval_ineq_expansion = [base_exp, obs_values, obs_jac, nh_base,
                                 n_obs, nx, nu](const VectorXd& x,
                                                const VectorXd& u) {
      IneqExpansion e;
      e.value.resize(nh_base + n_obs);
      e.hx = MatrixXd::Zero(nh_base + n_obs, nx);
      e.hu = MatrixXd::Zero(nh_base + n_obs, nu);
      if (nh_base > 0) {
        const IneqExpansion base = base_exp(x, u);
        e.value.head(nh_base) = base.value;
        e.hx.topRows(nh_base) = base.hx;
        e.hu.topRows(nh_base) = base.hu;
      }
      e.value.tail(n_obs) = obs_values(x);
      e.hx.bottomRows(n_obs) = obs_jac(x);
      return e;
    };
  }

  prob.terminal.nh = n_obs;
  prob.terminal.eval_ineq = [obs_values](const VectorXd& x) {
    return obs_values(x);
  };
  prob.terminal.eval_ineq_expansion = [obs_values, obs_jac](const VectorXd& x) {
    TerminalIneqExpansion e;
    e.value = obs_values(x);
    e.hx = obs_jac(x);
    return e;
  };
  return prob;
}

}  // namespace alprox::problems
