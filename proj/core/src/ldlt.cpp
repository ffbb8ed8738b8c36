#include "alprox/kkt/ldlt.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace alprox::kkt {

namespace {
// Bunch-Kaufman pivot threshold, minimizes worst-case element growth.
const double kAlpha = (1.0 + std::sqrt(17.0)) / 8.0;

void count_1x1(double d, double tol, Inertia& inr) {
  if (d > tol) {
    inr.n_pos++;
  } else if (d < -tol) {
    inr.n_neg++;
  } else {
    inr.n_zero++;
  }
}

void count_2x2(double a, double b, double c, double tol, Inertia& inr) {
  const double det = a * c - b * b;
  if (det < -tol * tol) {
    // standard Bunch-Kaufman 2x2 pivot: one positive, one negative eigenvalue
    inr.n_pos++;
    inr.n_neg++;
    return;
  }
  const double mean = 0.5 * (a + c);
  const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  count_1x1(mean + rad, tol, inr);
  count_1x1(mean - rad, tol, inr);
}
}  // namespace

void BunchKaufman::compute(const MatrixXd& a) {
  check_dim(a.rows(), a.cols(), "BunchKaufman: matrix must be square");
  n_ = a.rows();
  MatrixXd w = a;  // working copy, trailing block stays symmetric
  lower_ = MatrixXd::Identity(n_, n_);
  diag_ = VectorXd::Zero(n_);
  offdiag_ = VectorXd::Zero(n_);
  perm_.resize(static_cast<std::size_t>(n_));
  std::iota(perm_.begin(), perm_.end(), Eigen::Index{0});
  inertia_ = Inertia{};
  singular_ = false;
  if (n_ == 0) return;

  const double scale =
      std::max(a.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  const double tol = pivot_rel_tol_ * scale;

  Eigen::Index k = 0;

  // Swaps rows/columns i and j of the working matrix and the already
  // computed part of L (columns 0..k-1).
  auto swap_rc = [&](Eigen::Index i, Eigen::Index j) {
    if (i == j) return;
    w.row(i).swap(w.row(j));
    w.col(i).swap(w.col(j));
    if (k > 0) lower_.row(i).head(k).swap(lower_.row(j).head(k));
    std::swap(perm_[static_cast<std::size_t>(i)],
              perm_[static_cast<std::size_t>(j)]);
  };

  while (k < n_) {
    const Eigen::Index m = n_ - k - 1;
    bool use_2x2 = false;

    if (m > 0) {
      Eigen::Index r_off;
      const double lambda = w.col(k).tail(m).cwiseAbs().maxCoeff(&r_off);
      const Eigen::Index r = k + 1 + r_off;
      const double akk = std::abs(w(k, k));
      if (lambda > 0.0 && akk < kAlpha * lambda) {
        double sigma = 0.0;
        for (Eigen::Index i = k; i < n_; ++i) {
          if (i == r) continue;
          sigma = std::max(sigma, std::abs(w(i, r)));
        }
        if (akk * sigma >= kAlpha * lambda * lambda) {
          // 1x1 pivot at k without interchange
        } else if (std::abs(w(r, r)) >= kAlpha * sigma) {
          swap_rc(k, r);
        } else {
          swap_rc(k + 1, r);
          use_2x2 = true;
        }
      }
    }

    if (!use_2x2) {
      const double d = w(k, k);
      diag_(k) = d;
      count_1x1(d, tol, inertia_);
      if (std::abs(d) <= tol) {
        singular_ = true;
      } else if (m > 0) {
        const VectorXd col = w.col(k).tail(m);
        const VectorXd l = col / d;
        lower_.col(k).tail(m) = l;
        w.bottomRightCorner(m, m).noalias() -= l * col.transpose();
      }
      k += 1;
    } else {
      const double da = w(k, k);
      const double db = w(k + 1, k);
      const double dc = w(k + 1, k + 1);
      diag_(k) = da;
      diag_(k + 1) = dc;
      offdiag_(k) = db;
      count_2x2(da, db, dc, tol, inertia_);
      const double det = da * dc - db * db;
      if (std::abs(det) <= tol * tol) {
        singular_ = true;
      } else if (m - 1 > 0) {
        const Eigen::Index m2 = n_ - k - 2;
        const MatrixXd wt = w.block(k + 2, k, m2, 2);
        MatrixXd dinv(2, 2);
        dinv << dc, -db, -db, da;
        dinv /= det;
        const MatrixXd l2 = wt * dinv;
        lower_.block(k + 2, k, m2, 2) = l2;
        w.bottomRightCorner(m2, m2).noalias() -= l2 * wt.transpose();
      }
      k += 2;
    }
  }
}

MatrixXd BunchKaufman::solve(const MatrixXd& rhs) const {
  check_dim(rhs.rows(), n_, "BunchKaufman::solve rhs rows");
  MatrixXd x(n_, rhs.cols());
  for (Eigen::Index i = 0; i < n_; ++i) {
    x.row(i) = rhs.row(perm_[static_cast<std::size_t>(i)]);
  }
  lower_.triangularView<Eigen::UnitLower>().solveInPlace(x);
  Eigen::Index k = 0;
  while (k < n_) {
    if (k + 1 < n_ && offdiag_(k) != 0.0) {
      const double a = diag_(k), b = offdiag_(k), c = diag_(k + 1);
      const double det = a * c - b * b;
      const Eigen::RowVectorXd yk = x.row(k);
      const Eigen::RowVectorXd yk1 = x.row(k + 1);
      x.row(k) = (c * yk - b * yk1) / det;
      x.row(k + 1) = (-b * yk + a * yk1) / det;
      k += 2;
    } else {
      x.row(k) /= diag_(k);
      k += 1;
    }
  }
  lower_.transpose().triangularView<Eigen::UnitUpper>().solveInPlace(x);
  MatrixXd out(n_, rhs.cols());
  for (Eigen::Index i = 0; i < n_; ++i) {
    out.row(perm_[static_cast<std::size_t>(i)]) = x.row(i);
  }
  return out;
}

}  // namespace alprox::kkt
