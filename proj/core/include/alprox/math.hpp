/// @file math.hpp
/// @brief Small dense-algebra helpers shared across the solvers.
#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace alprox {

using Eigen::MatrixXd;
using Eigen::VectorXd;

template <typename Derived>
double infty_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.template lpNorm<Eigen::Infinity>();
}

/// Componentwise projection on the nonnegative orthant, [z]_+.
inline VectorXd positive_part(const Eigen::Ref<const VectorXd>& z) {
  return z.cwiseMax(0.0);
}

/// Componentwise projection on the nonpositive orthant, [z]_-.
inline VectorXd negative_part(const Eigen::Ref<const VectorXd>& z) {
  return z.cwiseMin(0.0);
}

inline void symmetrize(MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

inline void check_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": got " + std::to_string(got) +
                         ", expected " + std::to_string(want));
  }
}

}  // namespace alprox
