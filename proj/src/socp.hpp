#pragma once

// Second-order cone programs in standard form
//
//   min c^T x  s.t. A x = b, x in L        max b^T y  s.t. A^T y + s = c, s in L
//
// plus the duality-gap / central-path measurements the interior-point method
// and its invariant checks are built on.

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "jordan.hpp"

namespace qipm {

/// Coordinate layout of an SOCP produced by the SVM reduction.
struct SvmLayout {
  Index features = 0;
  Index points = 0;
  bool folded_bias = true;
  /// Margin rows carry an extra surplus column per point (see svm.hpp).
  bool margin_surplus = false;
};

class SocpInstance {
 public:
  /// Validates dimensions and full row rank of A (rank-revealing SVD).
  SocpInstance(Eigen::MatrixXd A, Eigen::VectorXd b, BlockVector c,
               std::optional<SvmLayout> svm = std::nullopt);

  const Eigen::MatrixXd& A() const noexcept { return A_; }
  const Eigen::VectorXd& b() const noexcept { return b_; }
  const BlockVector& c() const noexcept { return c_; }
  const ConePtr& cones() const noexcept { return c_.cones_ptr(); }
  Index m() const noexcept { return A_.rows(); }
  Index n() const noexcept { return A_.cols(); }
  Index rank() const noexcept { return c_.rank(); }
  const std::optional<SvmLayout>& svm_layout() const noexcept { return svm_; }

  /// Spectral norm ||A||_2.
  double a_norm() const noexcept { return a_norm_; }

  /// Row indices of the nonzero entries of column j.
  const std::vector<Index>& column_nonzeros(Index j) const {
    return col_nz_[static_cast<size_t>(j)];
  }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  BlockVector c_;
  std::optional<SvmLayout> svm_;
  double a_norm_ = 0.0;
  std::vector<std::vector<Index>> col_nz_;
};

/// Primal-dual point with the duality gap and the central-path distance at
/// nu = mu recomputed from (x, s).
struct Iterate {
  BlockVector x;
  Eigen::VectorXd y;
  BlockVector s;
  double mu = 0.0;
  double d = 0.0;

  static Iterate make(BlockVector x, Eigen::VectorXd y, BlockVector s);
};

/// mu = x^T s / r.
double duality_gap(const BlockVector& x, const BlockVector& s);

/// d(x, s, nu) = ||T_x s - nu e||_F.
double central_path_distance(const BlockVector& x, const BlockVector& s,
                             double nu);

/// Strictly interior on both sides and d(x, s, mu) <= eta mu.
bool in_neighborhood(const Iterate& iter, double eta);

struct LinearResiduals {
  double primal;  // ||A x - b||
  double dual;    // ||A^T y + s - c||
};

LinearResiduals linear_residuals(const SocpInstance& inst, const Iterate& iter);

struct ScaledPair {
  BlockVector x_hat;  // always e
  BlockVector s_hat;  // mu^{-1} T_x s
};

ScaledPair scale_to_frame(const BlockVector& x, const BlockVector& s,
                          double mu);

}  // namespace qipm
