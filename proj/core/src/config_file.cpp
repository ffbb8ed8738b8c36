#include "alprox/problems/config_file.hpp"

#include <fmt/format.h>

#include <fstream>
#include <limits>
#include <sstream>

namespace alprox::problems {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& token, int line_no) {
  const std::string t = trim(token);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double value = 0;
  try {
    value = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("line {}: bad number '{}'", line_no, t));
  }
  if (pos != t.size()) {
    throw ConfigError(fmt::format("line {}: trailing junk in '{}'", line_no, t));
  }
  return value;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(fmt::format("line {}: empty key", line_no));
    }
    std::vector<double> numbers;
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']') {
        throw ConfigError(fmt::format("line {}: unterminated array", line_no));
      }
      std::string inner = value.substr(1, value.size() - 2);
      std::istringstream items(inner);
      std::string item;
      while (std::getline(items, item, ',')) {
        if (trim(item).empty()) continue;
        numbers.push_back(parse_number(item, line_no));
      }
    } else {
      numbers.push_back(parse_number(value, line_no));
    }
    out[key] = std::move(numbers);
  }
  return out;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_config_text(buffer.str());
}

namespace {

double get_scalar(const ConfigMap& cfg, const std::string& key) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) throw ConfigError("missing key: " + key);
  if (it->second.size() != 1) {
    throw ConfigError("key is not a scalar: " + key);
  }
  return it->second[0];
}

VectorXd get_vector(const ConfigMap& cfg, const std::string& key,
                    Eigen::Index size) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) throw ConfigError("missing key: " + key);
  if (static_cast<Eigen::Index>(it->second.size()) != size) {
    throw ConfigError(fmt::format("key {}: expected {} entries, got {}", key,
                                  size, it->second.size()));
  }
  return Eigen::Map<const VectorXd>(it->second.data(), size);
}

MatrixXd get_matrix(const ConfigMap& cfg, const std::string& key,
                    Eigen::Index rows, Eigen::Index cols) {
  const VectorXd flat = get_vector(cfg, key, rows * cols);
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = flat(i * cols + j);
  }
  return m;
}

}  // namespace

BoundLqrConfig load_bound_lqr_config(const ConfigMap& cfg) {
  const auto nx = static_cast<Eigen::Index>(get_scalar(cfg, "nx"));
  const auto nu = static_cast<Eigen::Index>(get_scalar(cfg, "nu"));
  BoundLqrConfig out;
  out.N = static_cast<int>(get_scalar(cfg, "N"));
  out.A = get_matrix(cfg, "A", nx, nx);
  out.B = get_matrix(cfg, "B", nx, nu);
  out.c = get_vector(cfg, "c", nx);
  out.Q = get_matrix(cfg, "Q", nx, nx);
  out.R = get_matrix(cfg, "R", nu, nu);
  out.QN = get_matrix(cfg, "QN", nx, nx);
  out.u_bar = get_vector(cfg, "u_bar", nu);
  out.x0 = get_vector(cfg, "x0", nx);
  out.validate();
  return out;
}

CarParkConfig load_car_park_config(const ConfigMap& cfg) {
  CarParkConfig out;
  out.d_axle = get_scalar(cfg, "d_axle");
  out.dt = get_scalar(cfg, "dt");
  out.T = get_scalar(cfg, "T");
  out.a_max = get_scalar(cfg, "a_max");
  out.w_max = get_scalar(cfg, "w_max");
  out.x0 = get_vector(cfg, "x0", 4);
  out.q_diag = get_vector(cfg, "q_diag", 4);
  out.r_diag = get_vector(cfg, "r_diag", 2);
  out.qn_diag = get_vector(cfg, "qn_diag", 4);
  out.validate();
  return out;
}

std::vector<PolyhedralObstacle> load_obstacles(const ConfigMap& cfg, int nx) {
  std::vector<PolyhedralObstacle> obstacles;
  for (int i = 0;; ++i) {
    const std::string dkey = fmt::format("obs{}_d", i);
    const std::string ckey = fmt::format("obs{}_C", i);
    if (cfg.find(dkey) == cfg.end()) break;
    const auto rows = static_cast<Eigen::Index>(cfg.at(dkey).size());
    PolyhedralObstacle obs;
    obs.d = get_vector(cfg, dkey, rows);
    obs.C = get_matrix(cfg, ckey, rows, nx);
    obstacles.push_back(std::move(obs));
  }
  return obstacles;
}

}  // namespace alprox::problems
