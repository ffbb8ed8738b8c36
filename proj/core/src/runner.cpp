#include "alprox/runner.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>

#include "alprox/nlp/solver.hpp"
#include "alprox/problems/car_park.hpp"
#include "alprox/problems/config_file.hpp"
#include "alprox/problems/lqr.hpp"

namespace alprox::runner {

namespace {

using json = nlohmann::json;
using problems::BoundLqrConfig;
using problems::CarParkConfig;
using problems::DiscretizeScheme;
using problems::PolyhedralObstacle;

int log_level() {
  const char* env = std::getenv("ALPROX_LOG");
  return env == nullptr ? 0 : std::atoi(env);
}

// Fig-2/3-style rotational systems. The paper leaves dt, N, weights and
// the start state open; these values reproduce the qualitative behavior
// (saturation for the stable system, bang-bang for the unstable one).
BoundLqrConfig rotational_config(bool unstable) {
  MatrixXd ac(2, 2);
  if (unstable) {
    ac << 0.4, 2.0, -2.0, 0.4;
  } else {
    ac << 0.0, 2.0, -2.0, 0.0;
  }
  const VectorXd c_cont = (VectorXd(2) << 0.3, -0.2).finished();
  const auto sys = problems::discretize_rotational(
      ac, c_cont, 0.05, DiscretizeScheme::ZeroOrderHold);
  BoundLqrConfig cfg;
  cfg.A = sys.A;
  cfg.B = sys.B;
  cfg.c = sys.c;
  cfg.Q = 0.5 * MatrixXd::Identity(2, 2);
  cfg.R = MatrixXd::Identity(2, 2);
  cfg.QN = 10.0 * MatrixXd::Identity(2, 2);
  cfg.u_bar = VectorXd::Constant(2, 0.4);
  cfg.x0 = unstable ? (VectorXd(2) << 1.0, 1.0).finished()
                    : (VectorXd(2) << 0.7, 0.7).finished();
  cfg.N = 60;
  return cfg;
}

PolyhedralObstacle rectangle(double xlo, double xhi, double ylo, double yhi) {
  PolyhedralObstacle obs;
  obs.C.resize(4, 2);
  obs.C << 1, 0, -1, 0, 0, 1, 0, -1;
  obs.d.resize(4);
  obs.d << xhi, -xlo, yhi, -ylo;
  return obs;
}

BoundLqrConfig random_lqr_config(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.05, 0.4);
  const int nx = 2, nu = 2, horizon = 4;
  auto mat = [&](int r, int c) {
    MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = normal(gen);
    return m;
  };
  BoundLqrConfig cfg;
  cfg.A = mat(nx, nx) * 0.5;
  cfg.A.diagonal().array() += 0.4;
  cfg.B = mat(nx, nu) * 0.5;
  cfg.c = mat(nx, 1) * 0.1;
  MatrixXd q = mat(nx, nx);
  cfg.Q = q * q.transpose() / nx + 0.3 * MatrixXd::Identity(nx, nx);
  MatrixXd r = mat(nu, nu);
  cfg.R = r * r.transpose() / nu + 0.3 * MatrixXd::Identity(nu, nu);
  cfg.QN = 2.0 * cfg.Q;
  cfg.u_bar = VectorXd::Constant(nu, unif(gen));
  cfg.x0 = mat(nx, 1);
  cfg.N = horizon;
  return cfg;
}

void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open output file: " + tmp);
    file << contents;
  }
  std::filesystem::rename(tmp, path);
}

std::string format_trace(const std::vector<TraceRecord>& trace,
                         const std::vector<std::string>& comments) {
  std::ostringstream os;
  write_trace_csv(os, trace, comments);
  return os.str();
}

json vector_to_json(const VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json trajectory_to_json(const std::vector<VectorXd>& vecs) {
  json arr = json::array();
  for (const auto& v : vecs) arr.push_back(vector_to_json(v));
  return arr;
}

std::string plot_states_csv(const trajopt::Trajectory& traj, double dt) {
  std::ostringstream os;
  const Eigen::Index nx = traj.xs[0].size();
  os << "k,t";
  for (Eigen::Index i = 0; i < nx; ++i) os << fmt::format(",x{}", i);
  os << "\n";
  for (std::size_t k = 0; k < traj.xs.size(); ++k) {
    os << fmt::format("{},{:.6f}", k, double(k) * dt);
    for (Eigen::Index i = 0; i < nx; ++i) {
      os << fmt::format(",{:.16e}", traj.xs[k](i));
    }
    os << "\n";
  }
  return os.str();
}

std::string plot_controls_csv(const trajopt::Trajectory& traj, double dt,
                              const VectorXd& u_bar) {
  std::ostringstream os;
  const Eigen::Index nu = traj.us.empty() ? 0 : traj.us[0].size();
  os << "k,t";
  for (Eigen::Index i = 0; i < nu; ++i) os << fmt::format(",u{}", i);
  for (Eigen::Index i = 0; i < u_bar.size(); ++i) {
    os << fmt::format(",u{}_lb,u{}_ub", i, i);
  }
  os << "\n";
  for (std::size_t k = 0; k < traj.us.size(); ++k) {
    os << fmt::format("{},{:.6f}", k, double(k) * dt);
    for (Eigen::Index i = 0; i < nu; ++i) {
      os << fmt::format(",{:.16e}", traj.us[k](i));
    }
    for (Eigen::Index i = 0; i < u_bar.size(); ++i) {
      os << fmt::format(",{:.16e},{:.16e}", -u_bar(i), u_bar(i));
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace

const std::vector<ProblemInfo>& list_problems() {
  static const std::vector<ProblemInfo> problems = {
      {"lqr-rot",
       "bound-constrained LQR around a rotational system (saturating "
       "controls, target reached)"},
      {"lqr-unstable",
       "bound-constrained LQR near a repulsive equilibrium (bang-bang "
       "controls)"},
      {"lqr-obstacle",
       "LQR with control bounds and a rectangular obstacle to avoid"},
      {"car-park", "kinematic car parking to the origin with box-bounded "
                   "wheel angle and acceleration"},
      {"rand-bound-lqr",
       "randomized small bound-constrained LQR instance (use --seed)"},
  };
  return problems;
}

BuiltProblem build_problem(const RunSpec& spec) {
  problems::ConfigMap cfg_map;
  if (!spec.config_path.empty()) {
    cfg_map = problems::parse_config_file(spec.config_path);
  }
  const bool has_config = !cfg_map.empty();

  BuiltProblem built;
  if (spec.problem_name == "lqr-rot" || spec.problem_name == "lqr-unstable" ||
      spec.problem_name == "rand-bound-lqr") {
    BoundLqrConfig cfg;
    if (has_config) {
      cfg = problems::load_bound_lqr_config(cfg_map);
    } else if (spec.problem_name == "rand-bound-lqr") {
      cfg = random_lqr_config(spec.seed);
    } else {
      cfg = rotational_config(spec.problem_name == "lqr-unstable");
    }
    built.problem = problems::make_bound_lqr(cfg);
    built.u_bar = cfg.u_bar;
    built.dt = 0.05;
  } else if (spec.problem_name == "lqr-obstacle") {
    BoundLqrConfig cfg;
    std::vector<PolyhedralObstacle> obstacles;
    if (has_config) {
      cfg = problems::load_bound_lqr_config(cfg_map);
      obstacles = problems::load_obstacles(
          cfg_map, static_cast<int>(cfg.A.rows()));
    } else {
      cfg = rotational_config(false);
      obstacles = {rectangle(-0.9, -0.4, -0.5, -0.2)};
    }
    built.problem = problems::make_obstacle_lqr(cfg, obstacles);
    built.u_bar = cfg.u_bar;
    built.dt = 0.05;
  } else if (spec.problem_name == "car-park") {
    CarParkConfig cfg;
    if (has_config) cfg = problems::load_car_park_config(cfg_map);
    built.problem = problems::make_car_park(cfg);
    built.u_bar = (Eigen::Vector2d() << cfg.w_max, cfg.a_max).finished();
    built.dt = cfg.dt;
  } else {
    throw std::out_of_range("unknown problem: " + spec.problem_name);
  }
  return built;
}

nlp::BclParams bcl_from_spec(const RunSpec& spec) {
  nlp::BclParams bcl;
  bcl.eps_abs = spec.tolerance;
  bcl.mu_e_init = 1.0 / spec.mu0;
  bcl.mu_i_init = 1.0 / (spec.mui0 > 0 ? spec.mui0 : spec.mu0);
  bcl.rho_init = spec.rho0;
  bcl.max_outer_iters = spec.max_outer;
  bcl.max_inner_iters = spec.max_inner;
  return bcl;
}

int run(const RunSpec& spec) {
  using clock = std::chrono::steady_clock;
  const int verbosity = log_level();

  BuiltProblem built;
  try {
    built = build_problem(spec);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "alprox: %s\n", err.what());
    return 2;
  }
  if (spec.tolerance <= 0 || spec.mu0 <= 0 ||
      (spec.solver != "ddp" && spec.solver != "stacked-nlp")) {
    std::fprintf(stderr, "alprox: invalid run specification\n");
    return 2;
  }

  const nlp::BclParams bcl = bcl_from_spec(spec);

  const std::vector<std::string> trace_comments = {
      fmt::format("penalty convention: mu0={:g}, mui0={:g} -> mu_e_init={:g}, "
                  "mu_i_init={:g} (internal step-sizes are reciprocals)",
                  spec.mu0, spec.mui0 > 0 ? spec.mui0 : spec.mu0,
                  bcl.mu_e_init, bcl.mu_i_init)};

  trajopt::Trajectory traj = trajopt::make_initial_trajectory(built.problem);
  const auto t_start = clock::now();

  SolveStatus status;
  trajopt::TrajSolveReport report;
  try {
    if (spec.solver == "ddp") {
      auto result = trajopt::solve(built.problem, traj, bcl,
                                   nlp::LineSearchParams{},
                                   nlp::HessianMode::GaussNewton);
      traj = std::move(result.trajectory);
      report = std::move(result.report);
    } else {
      const auto view = trajopt::stacked_nlp_view(built.problem);
      nlp::NlpIterate sol;
      const auto nlp_report = nlp::solve(
          view, trajopt::stack_trajectory(built.problem, traj),
          VectorXd::Zero(view.ne), VectorXd::Zero(view.ni), bcl,
          nlp::LineSearchParams{}, nlp::HessianMode::GaussNewton, &sol);
      traj = trajopt::unstack_trajectory(built.problem, sol.x);
      report.status = nlp_report.status;
      report.outer_iters = nlp_report.outer_iters;
      report.total_inner_iters = nlp_report.total_inner_iters;
      report.dual_residual = nlp_report.dual_residual;
      report.primal_infeasibility = nlp_report.primal_infeasibility;
      report.trace = nlp_report.trace;
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "alprox: solver error: %s\n", err.what());
    if (!spec.trace_path.empty()) {
      atomic_write(spec.trace_path, format_trace(report.trace, trace_comments));
    }
    return 1;
  }
  status = report.status;
  const double runtime =
      std::chrono::duration<double>(clock::now() - t_start).count();

  if (verbosity >= 1) {
    std::fprintf(stderr,
                 "alprox: %s solver=%s status=%s outer=%d inner=%d "
                 "dual=%.3e primal=%.3e (%.3fs)\n",
                 spec.problem_name.c_str(), spec.solver.c_str(),
                 to_string(status), report.outer_iters,
                 report.total_inner_iters, report.dual_residual,
                 report.primal_infeasibility, runtime);
  }

  if (!spec.trace_path.empty()) {
    atomic_write(spec.trace_path, format_trace(report.trace, trace_comments));
  }
  if (!spec.out_path.empty()) {
    json doc;
    doc["schema_version"] = 1;
    doc["problem"] = spec.problem_name;
    doc["solver"] = spec.solver;
    doc["status"] = to_string(status);
    doc["tolerance"] = spec.tolerance;
    doc["outer_iters"] = report.outer_iters;
    doc["total_inner_iters"] = report.total_inner_iters;
    doc["total_regularizations"] = report.total_regularizations;
    doc["final_dual_residual"] = report.dual_residual;
    doc["final_primal_infeasibility"] = report.primal_infeasibility;
    doc["mu_e_init"] = bcl.mu_e_init;
    doc["mu_i_init"] = bcl.mu_i_init;
    doc["rho_init"] = bcl.rho_init;
    doc["seed"] = spec.seed;
    doc["runtime_seconds"] = runtime;
    doc["xs"] = trajectory_to_json(traj.xs);
    doc["us"] = trajectory_to_json(traj.us);
    atomic_write(spec.out_path, doc.dump(2) + "\n");
  }
  if (!spec.plot_data_path.empty()) {
    atomic_write(spec.plot_data_path + "_states.csv",
                 plot_states_csv(traj, built.dt));
    atomic_write(spec.plot_data_path + "_controls.csv",
                 plot_controls_csv(traj, built.dt, built.u_bar));
  }

  return status == SolveStatus::Converged ? 0 : 1;
}

}  // namespace alprox::runner
