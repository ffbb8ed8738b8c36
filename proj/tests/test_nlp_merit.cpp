#include <doctest.h>

#include "alprox/nlp/merit.hpp"
#include "oracles.hpp"

using namespace alprox;
using namespace alprox::nlp;
using testutil::Rng;

namespace {

NlpProblem scalar_problem(std::function<double(double)> f,
                          std::function<double(double)> df,
                          std::function<double(double)> c,
                          std::function<double(double)> h) {
  NlpProblem prob;
  prob.n = 1;
  prob.ne = c ? 1 : 0;
  prob.ni = h ? 1 : 0;
  prob.eval_f = [f](const VectorXd& x) { return f(x(0)); };
  prob.eval_grad_f = [df](const VectorXd& x) {
    return VectorXd::Constant(1, df(x(0)));
  };
  if (c) {
    prob.eval_c = [c](const VectorXd& x) {
      return VectorXd::Constant(1, c(x(0)));
    };
    prob.eval_Jc = [](const VectorXd&) { return MatrixXd::Ones(1, 1); };
  }
  if (h) {
    prob.eval_h = [h](const VectorXd& x) {
      return VectorXd::Constant(1, h(x(0)));
    };
    prob.eval_Jh = [](const VectorXd&) { return MatrixXd::Ones(1, 1); };
  }
  prob.eval_lag_hess = [](const VectorXd&, const VectorXd&, const VectorXd&) {
    return MatrixXd::Ones(1, 1);
  };
  return prob;
}

VectorXd scalar(double v) { return VectorXd::Constant(1, v); }

}  // namespace

TEST_CASE("lagrangian: zero multipliers reduce to the objective") {
  auto prob = scalar_problem([](double x) { return x * x; },
                             [](double x) { return 2 * x; },
                             [](double x) { return x - 1.0; }, nullptr);
  CHECK(lagrangian(prob, scalar(1.0), scalar(0.0), VectorXd(0)) ==
        doctest::Approx(1.0));
  CHECK(lagrangian(prob, scalar(-2.5), scalar(0.0), VectorXd(0)) ==
        doctest::Approx(6.25));
}

TEST_CASE("lagrangian: linear arithmetic") {
  auto prob = scalar_problem([](double) { return 0.0; },
                             [](double) { return 0.0; },
                             [](double x) { return x; },
                             [](double x) { return x; });
  CHECK(lagrangian(prob, scalar(2.0), scalar(3.0), scalar(1.0)) ==
        doctest::Approx(8.0));
}

TEST_CASE("kkt_residuals: unconstrained quadratic at its minimum") {
  NlpProblem prob;
  prob.n = 3;
  prob.eval_f = [](const VectorXd& x) { return 0.5 * x.squaredNorm(); };
  prob.eval_grad_f = [](const VectorXd& x) -> VectorXd { return x; };
  const auto res =
      kkt_residuals(prob, VectorXd::Zero(3), VectorXd(0), VectorXd(0));
  CHECK(res.dual_inf == 0.0);
  CHECK(res.primal_inf == 0.0);
}

TEST_CASE("kkt_residuals: analytic KKT point of an equality problem") {
  auto prob = scalar_problem(
      [](double x) { return 0.5 * (x - 2.0) * (x - 2.0); },
      [](double x) { return x - 2.0; }, [](double x) { return x; }, nullptr);
  const auto res = kkt_residuals(prob, scalar(0.0), scalar(2.0), VectorXd(0));
  CHECK(res.dual_inf == doctest::Approx(0.0));
  CHECK(res.primal_inf == doctest::Approx(0.0));
}

TEST_CASE("kkt_residuals: positive part of violated inequality") {
  auto prob = scalar_problem([](double) { return 0.0; },
                             [](double) { return 0.0; }, nullptr,
                             [](double x) { return x - 1.0; });
  const auto res = kkt_residuals(prob, scalar(2.0), VectorXd(0), scalar(0.0));
  CHECK(res.primal_inf == doctest::Approx(1.0));
}

TEST_CASE("primal_infeasibility examples") {
  auto both = scalar_problem([](double) { return 0.0; },
                             [](double) { return 0.0; },
                             [](double x) { return 0.3 * x; },
                             [](double) { return -2.0; });
  CHECK(primal_infeasibility(both, scalar(1.0)) == doctest::Approx(0.3));

  NlpProblem ineq_only;
  ineq_only.n = 1;
  ineq_only.ni = 2;
  ineq_only.eval_f = [](const VectorXd&) { return 0.0; };
  ineq_only.eval_grad_f = [](const VectorXd&) { return VectorXd::Zero(1); };
  ineq_only.eval_h = [](const VectorXd&) {
    VectorXd h(2);
    h << 0.7, -0.1;
    return h;
  };
  ineq_only.eval_Jh = [](const VectorXd&) { return MatrixXd::Zero(2, 1); };
  CHECK(primal_infeasibility(ineq_only, scalar(0.0)) == doctest::Approx(0.7));
}

TEST_CASE("shifted_multipliers") {
  SUBCASE("zero constraint values pass estimates through") {
    auto prob = scalar_problem([](double) { return 0.0; },
                               [](double) { return 0.0; },
                               [](double) { return 0.0; },
                               [](double) { return 0.0; });
    const auto sm = shifted_multipliers(prob, scalar(0.0), scalar(1.5),
                                        scalar(-0.25), 0.3, 0.3);
    CHECK(sm.lam_hat(0) == doctest::Approx(1.5));
    CHECK(sm.nu_hat(0) == doctest::Approx(0.0));  // [-0.25]_+ clamps
  }
  SUBCASE("equality shift arithmetic") {
    auto prob = scalar_problem([](double) { return 0.0; },
                               [](double) { return 0.0; },
                               [](double) { return 0.5; }, nullptr);
    const auto sm = shifted_multipliers(prob, scalar(0.0), scalar(1.0),
                                        VectorXd(0), 0.5, 1.0);
    CHECK(sm.lam_hat(0) == doctest::Approx(2.0));
  }
  SUBCASE("projection clamps strongly negative shift") {
    auto prob = scalar_problem([](double) { return 0.0; },
                               [](double) { return 0.0; }, nullptr,
                               [](double) { return -1.0; });
    const auto sm = shifted_multipliers(prob, scalar(0.0), VectorXd(0),
                                        scalar(0.1), 1.0, 0.1);
    CHECK(sm.nu_hat(0) == doctest::Approx(0.0));
  }
}

TEST_CASE("shifted_slack") {
  auto with_h = [](double hval) {
    return scalar_problem([](double) { return 0.0; },
                          [](double) { return 0.0; }, nullptr,
                          [hval](double) { return hval; });
  };
  CHECK(shifted_slack(with_h(-1.0), scalar(0.0), scalar(0.0), 0.7)(0) ==
        doctest::Approx(-1.0));
  CHECK(shifted_slack(with_h(1.0), scalar(0.0), scalar(0.0), 0.7)(0) ==
        doctest::Approx(0.0));
  CHECK(shifted_slack(with_h(-0.2), scalar(0.0), scalar(1.0), 0.1)(0) ==
        doctest::Approx(-0.1));
}

TEST_CASE("active_set conventions") {
  NlpProblem prob;
  prob.n = 1;
  prob.ni = 2;
  prob.eval_f = [](const VectorXd&) { return 0.0; };
  prob.eval_grad_f = [](const VectorXd&) { return VectorXd::Zero(1); };
  VectorXd hval(2);
  prob.eval_h = [&hval](const VectorXd&) { return hval; };
  prob.eval_Jh = [](const VectorXd&) { return MatrixXd::Zero(2, 1); };

  SUBCASE("strictly negative values with zero estimates: empty") {
    hval << -0.3, -1.0;
    const auto act = active_set(prob, scalar(0.0), VectorXd::Zero(2), 0.5);
    CHECK(act.indices.empty());
  }
  SUBCASE("boundary case is included") {
    hval << 0.0, -1.0;
    const auto act = active_set(prob, scalar(0.0), VectorXd::Zero(2), 0.5);
    CHECK(act.indices == std::vector<int>{0});
    CHECK(act.contains(0));
    CHECK_FALSE(act.contains(1));
  }
  SUBCASE("shifted arithmetic") {
    hval << -0.05, -1.0;
    VectorXd nu_l(2);
    nu_l << 1.0, 0.0;
    const auto act = active_set(prob, scalar(0.0), nu_l, 0.1);
    CHECK(act.indices == std::vector<int>{0});
  }
}

TEST_CASE("merit_value special cases") {
  SUBCASE("no constraints, rho = 0: objective") {
    NlpProblem prob;
    prob.n = 2;
    prob.eval_f = [](const VectorXd& x) { return x.sum(); };
    prob.eval_grad_f = [](const VectorXd&) { return VectorXd::Ones(2); };
    NlpIterate center = NlpIterate::zero(prob);
    PenaltyState pen;
    pen.rho = 0.0;
    VectorXd x(2);
    x << 3.0, -1.0;
    CHECK(merit_value(prob, x, VectorXd(0), VectorXd(0), center, pen) ==
          doctest::Approx(2.0));
  }
  SUBCASE("inactive satisfied inequalities with consistent duals") {
    auto prob = scalar_problem([](double x) { return 0.5 * x * x; },
                               [](double x) { return x; }, nullptr,
                               [](double x) { return x - 10.0; });
    NlpIterate center = NlpIterate::zero(prob);
    center.x = scalar(1.0);
    center.x_prev = scalar(1.0);
    PenaltyState pen;
    pen.rho = 0.5;
    // x = x_l, nu = nu_l = nu_hat = 0, h strongly inactive
    CHECK(merit_value(prob, scalar(1.0), VectorXd(0), scalar(0.0), center,
                      pen) == doctest::Approx(0.5));
  }
  SUBCASE("equality at feasible point with zero estimates") {
    auto prob = scalar_problem([](double x) { return 0.5 * x * x; },
                               [](double x) { return x; },
                               [](double x) { return x - 1.0; }, nullptr);
    NlpIterate center = NlpIterate::zero(prob);
    PenaltyState pen;
    pen.mu_e = 1.0;
    pen.rho = 0.0;
    CHECK(merit_value(prob, scalar(1.0), scalar(0.0), VectorXd(0), center,
                      pen) == doctest::Approx(0.5));
  }
}

TEST_CASE("merit_gradient: finite-difference oracle on random QPs") {
  Rng rng(101);
  int checked = 0;
  while (checked < 100) {
    const int n = rng.integer(1, 10);
    const int ne = rng.integer(0, 4);
    const int ni = rng.integer(0, 6);
    const auto qp = testutil::random_qp(rng, n, ne, ni);
    const auto prob = testutil::make_qp_nlp(qp);

    PenaltyState pen;
    pen.mu_e = std::pow(10.0, rng.uniform(-3, 0));
    pen.mu_i = std::pow(10.0, rng.uniform(-3, 0));
    pen.rho = rng.uniform(0.0, 1e-2);
    NlpIterate center = NlpIterate::zero(prob);
    center.lam = rng.vector(ne);
    center.nu = rng.vector(ni).cwiseAbs();
    center.x_prev = rng.vector(n);

    const VectorXd x = rng.vector(n);
    const VectorXd lam = rng.vector(ne);
    const VectorXd nu = rng.vector(ni);

    // skip points within the semi-smooth margin
    if (ni > 0) {
      const VectorXd shifted = prob.h(x) + pen.mu_i * center.nu;
      if (shifted.cwiseAbs().minCoeff() < 1e-4) continue;
    }
    ++checked;

    const VectorXd analytic = merit_gradient(prob, x, lam, nu, center, pen);
    auto stacked = [&](const VectorXd& w) {
      return merit_value(prob, w.head(n), w.segment(n, ne), w.tail(ni),
                         center, pen);
    };
    VectorXd w(n + ne + ni);
    w << x, lam, nu;
    const VectorXd fd = testutil::fd_gradient(stacked, w);
    const double rel = alprox::infty_norm(VectorXd(fd - analytic)) /
                       std::max(1.0, alprox::infty_norm(analytic));
    CHECK(rel <= 1e-6);
  }
}

TEST_CASE("merit_gradient: zero at unconstrained minimum") {
  NlpProblem prob;
  prob.n = 2;
  prob.eval_f = [](const VectorXd& x) { return 0.5 * x.squaredNorm(); };
  prob.eval_grad_f = [](const VectorXd& x) -> VectorXd { return x; };
  NlpIterate center = NlpIterate::zero(prob);
  PenaltyState pen;
  pen.rho = 0.0;
  const VectorXd g =
      merit_gradient(prob, VectorXd::Zero(2), VectorXd(0), VectorXd(0),
                     center, pen);
  CHECK(alprox::infty_norm(g) == 0.0);
}

TEST_CASE("merit_gradient: lambda block sign convention") {
  Rng rng(55);
  const auto qp = testutil::random_qp(rng, 4, 2, 0);
  const auto prob = testutil::make_qp_nlp(qp);
  PenaltyState pen;
  pen.mu_e = 0.37;
  NlpIterate center = NlpIterate::zero(prob);
  center.lam = rng.vector(2);
  const VectorXd x = rng.vector(4);
  const VectorXd lam = rng.vector(2);
  const VectorXd g = merit_gradient(prob, x, lam, VectorXd(0), center, pen);
  const auto sm = shifted_multipliers(prob, x, center.lam, center.nu,
                                      pen.mu_e, pen.mu_i);
  const VectorXd expected = pen.mu_e * (lam - sm.lam_hat);
  CHECK(alprox::infty_norm(VectorXd(g.segment(4, 2) - expected)) < 1e-14);
}

TEST_CASE("rl_residual: zero at a consistent KKT fixed point") {
  // equality QP: solve the KKT system directly, then feed the triple in
  Rng rng(77);
  const auto qp = testutil::random_qp(rng, 5, 2, 0);
  const auto prob = testutil::make_qp_nlp(qp);
  MatrixXd kkt(7, 7);
  kkt.setZero();
  kkt.topLeftCorner(5, 5) = qp.P;
  kkt.topRightCorner(5, 2) = qp.A.transpose();
  kkt.bottomLeftCorner(2, 5) = qp.A;
  VectorXd rhs(7);
  rhs << -qp.q, qp.b;
  const VectorXd sol = testutil::dense_solve(kkt, rhs);
  const VectorXd xstar = sol.head(5);
  const VectorXd lamstar = sol.tail(2);

  NlpIterate center{xstar, lamstar, VectorXd(0), xstar};
  PenaltyState pen;
  pen.mu_e = 0.05;
  pen.rho = 1e-3;
  const auto rl = rl_residual(prob, xstar, lamstar, VectorXd(0), center, pen);
  CHECK(rl.norm < 1e-10);
}

TEST_CASE("rl_residual: independent recomputation on random iterates") {
  Rng rng(88);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(2, 8);
    const int ne = rng.integer(1, 3);
    const int ni = rng.integer(1, 4);
    const auto qp = testutil::random_qp(rng, n, ne, ni);
    const auto prob = testutil::make_qp_nlp(qp);
    PenaltyState pen;
    pen.mu_e = 0.2;
    pen.mu_i = 0.4;
    pen.rho = 0.01;
    NlpIterate center{rng.vector(n), rng.vector(ne),
                      rng.vector(ni).cwiseAbs(), rng.vector(n)};
    const VectorXd x = rng.vector(n);
    const VectorXd lam = rng.vector(ne);
    const VectorXd nu = rng.vector(ni);

    const auto rl = rl_residual(prob, x, lam, nu, center, pen);

    // literal recomputation from the definitions
    const VectorXd grad_l = qp.P * x + qp.q + qp.A.transpose() * lam +
                            qp.C.transpose() * nu +
                            pen.rho * (x - center.x_prev);
    const VectorXd lam_hat = center.lam + (qp.A * x - qp.b) / pen.mu_e;
    const VectorXd nu_hat =
        (center.nu + (qp.C * x - qp.d) / pen.mu_i).cwiseMax(0.0);
    VectorXd expect(n + ne + ni);
    expect << grad_l, pen.mu_e * (lam_hat - lam), pen.mu_i * (nu_hat - nu);
    CHECK(alprox::infty_norm(VectorXd(rl.r - expect)) < 1e-12);
    CHECK(rl.norm == doctest::Approx(alprox::infty_norm(expect)));
  }
}

TEST_CASE("projection identities") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const VectorXd z = rng.vector(rng.integer(1, 12)) * 10.0;
    const VectorXd zp = positive_part(z);
    const VectorXd zm = negative_part(z);
    CHECK(zp.minCoeff() >= 0.0);
    CHECK(zm.maxCoeff() <= 0.0);
    CHECK(alprox::infty_norm(VectorXd(zp + zm - z)) == 0.0);
  }
}

TEST_CASE("active-set consistency: inactive rows have nu_hat 0 and slack "
          "equal to the shifted value") {
  Rng rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = rng.integer(1, 6);
    const int ni = rng.integer(1, 8);
    const auto qp = testutil::random_qp(rng, n, 0, ni);
    const auto prob = testutil::make_qp_nlp(qp);
    const double mu_i = std::pow(10.0, rng.uniform(-3, 0));
    const VectorXd nu_l = rng.vector(ni).cwiseAbs();
    const VectorXd x = rng.vector(n);
    const auto act = active_set(prob, x, nu_l, mu_i);
    const auto sm = shifted_multipliers(prob, x, VectorXd(0), nu_l, 1.0, mu_i);
    const VectorXd slack = shifted_slack(prob, x, nu_l, mu_i);
    const VectorXd shifted = prob.h(x) + mu_i * nu_l;
    for (int j = 0; j < ni; ++j) {
      if (!act.contains(j)) {
        CHECK(sm.nu_hat(j) == 0.0);
        CHECK(slack(j) == doctest::Approx(shifted(j)));
      }
    }
  }
}
