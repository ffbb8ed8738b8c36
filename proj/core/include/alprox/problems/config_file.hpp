/// @file config_file.hpp
/// @brief Plain-text key-value configuration files for the benchmark
///        problems.
///
/// Format: one `key = value` pair per line, `#` starts a comment. Values
/// are decimal numbers (`inf` allowed where a bound may be absent) or
/// arrays in bracket syntax `[1.0, 2.0, 3.0]`. Matrices are stored
/// row-major with their shape fixed by the dimension keys.
///
/// BoundLqrConfig keys: nx, nu, N, A (nx*nx), B (nx*nu), c (nx),
///   Q (nx*nx), R (nu*nu), QN (nx*nx), u_bar (nu), x0 (nx).
/// CarParkConfig keys: d_axle, dt, T, a_max, w_max, x0 (4), q_diag (4),
///   r_diag (2), qn_diag (4).
/// Obstacle keys (optional, i = 0..): obs<i>_C (rows*nx), obs<i>_d (rows).
#pragma once

#include <map>
#include <string>
#include <vector>

#include "alprox/problems/car_park.hpp"
#include "alprox/problems/lqr.hpp"

namespace alprox::problems {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raw parsed file: every value is a list of numbers (scalars have one).
using ConfigMap = std::map<std::string, std::vector<double>>;

ConfigMap parse_config_file(const std::string& path);
ConfigMap parse_config_text(const std::string& text);

BoundLqrConfig load_bound_lqr_config(const ConfigMap& cfg);
CarParkConfig load_car_park_config(const ConfigMap& cfg);
std::vector<PolyhedralObstacle> load_obstacles(const ConfigMap& cfg, int nx);

}  // namespace alprox::problems
