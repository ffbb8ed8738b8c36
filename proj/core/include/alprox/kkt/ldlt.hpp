/// @file ldlt.hpp
/// @brief Dense symmetric-indefinite LDL^T factorization with Bunch-Kaufman
///        pivoting and inertia extraction.
#pragma once

#include <Eigen/Core>

#include "alprox/math.hpp"

namespace alprox::kkt {

/// Signs of the pivots of a factored symmetric matrix.
struct Inertia {
  int n_pos = 0;
  int n_neg = 0;
  int n_zero = 0;

  bool operator==(const Inertia&) const = default;
};

/// LDL^T factorization P A P^T = L D L^T where D is block-diagonal with
/// 1x1 and 2x2 blocks. Pivots are chosen by the Bunch-Kaufman criterion,
/// which keeps the factorization stable on indefinite saddle-point
/// matrices where plain Cholesky-style LDL^T breaks down.
class BunchKaufman {
 public:
  /// Pivots below pivot_rel_tol times the largest diagonal magnitude of
  /// the input count as zero.
  explicit BunchKaufman(double pivot_rel_tol = 1e-12)
      : pivot_rel_tol_(pivot_rel_tol) {}

  void compute(const MatrixXd& a);

  /// True if a zero pivot (beyond tolerance) was hit; solve() is then
  /// unreliable and callers should regularize instead.
  bool singular() const { return singular_; }

  const Inertia& inertia() const { return inertia_; }

  /// Solves A X = B for all columns of B. Requires !singular().
  MatrixXd solve(const MatrixXd& rhs) const;

  Eigen::Index dim() const { return n_; }

 private:
  double pivot_rel_tol_;
  Eigen::Index n_ = 0;
  MatrixXd lower_;               // unit lower-triangular factor
  VectorXd diag_;                // diagonal of D
  VectorXd offdiag_;             // offdiag_[k] != 0 marks a 2x2 block at (k, k+1)
  std::vector<Eigen::Index> perm_;
  Inertia inertia_;
  bool singular_ = false;
};

}  // namespace alprox::kkt
