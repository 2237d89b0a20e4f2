#pragma once

// Euclidean Jordan algebra over a product of Lorentz cones
// L^{n_1} x ... x L^{n_r}. A block (x0; xbar) is in L^k iff ||xbar|| <= x0.
//
// Matrix representations (Arw, Q, T) are applied blockwise in O(n_i) per
// block; the *_dense variants materialize the full block-diagonal n x n
// matrix and exist for diagnostics and tests.

#include <Eigen/Core>

#include <memory>
#include <span>
#include <vector>

namespace qipm {

using Index = Eigen::Index;

class ConeStructure {
 public:
  explicit ConeStructure(std::vector<Index> block_sizes);

  Index n() const noexcept { return n_; }
  Index rank() const noexcept { return static_cast<Index>(sizes_.size()); }
  Index size(Index block) const { return sizes_[static_cast<size_t>(block)]; }
  Index offset(Index block) const {
    return offsets_[static_cast<size_t>(block)];
  }
  std::span<const Index> sizes() const noexcept { return sizes_; }

  bool operator==(const ConeStructure& other) const {
    return sizes_ == other.sizes_;
  }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
  Index n_ = 0;
};

using ConePtr = std::shared_ptr<const ConeStructure>;

ConePtr make_cones(std::vector<Index> block_sizes);

/// An element of R^n partitioned into the blocks of a ConeStructure.
/// Immutable after construction; arithmetic returns new vectors.
class BlockVector {
 public:
  BlockVector(ConePtr cones, Eigen::VectorXd values);

  static BlockVector identity(const ConePtr& cones);
  static BlockVector zeros(const ConePtr& cones);

  const ConeStructure& cones() const noexcept { return *cones_; }
  const ConePtr& cones_ptr() const noexcept { return cones_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }

  Index n() const noexcept { return values_.size(); }
  Index rank() const noexcept { return cones_->rank(); }
  Eigen::VectorXd::ConstSegmentReturnType block(Index i) const {
    return values_.segment(cones_->offset(i), cones_->size(i));
  }

  double dot(const BlockVector& other) const;
  double norm() const noexcept { return values_.norm(); }

  BlockVector operator+(const BlockVector& other) const;
  BlockVector operator-(const BlockVector& other) const;
  BlockVector operator*(double scale) const;
  BlockVector operator-() const { return *this * -1.0; }

  bool same_structure(const BlockVector& other) const noexcept;

 private:
  ConePtr cones_;
  Eigen::VectorXd values_;
};

inline BlockVector operator*(double scale, const BlockVector& v) {
  return v * scale;
}

struct BlockEigenvalues {
  double lambda1;  // x0 + ||xbar||
  double lambda2;  // x0 - ||xbar||
};

struct JordanFrame {
  double lambda1;
  double lambda2;
  Eigen::VectorXd c1;
  Eigen::VectorXd c2;
};

struct SpectralDecomposition {
  std::vector<JordanFrame> blocks;
};

/// Eigenvalues of every block, without building the frames.
std::vector<BlockEigenvalues> eigenvalues(const BlockVector& x);

/// Per block: lambda_{1,2} = x0 +- ||xbar||, c_{1,2} = (1/2)(1; +-xbar/||xbar||).
/// When xbar = 0 the frame direction is the first tail coordinate; for
/// one-dimensional blocks both idempotents are the scalar 1/2.
SpectralDecomposition spectral_decompose(const BlockVector& x);

/// Blockwise x o y = (x^T y; x0 ybar + y0 xbar).
BlockVector jordan_product(const BlockVector& x, const BlockVector& y);

BlockVector arw_apply(const BlockVector& x, const BlockVector& y);
/// Solves Arw(x) z = y blockwise; requires x0 != 0 and lambda1*lambda2 != 0
/// in every block.
BlockVector arw_inverse_apply(const BlockVector& x, const BlockVector& y);
Eigen::MatrixXd arw_dense(const BlockVector& x);

/// Q_x y through the closed form
///   [ ||x||^2      2 x0 xbar^T                    ]
///   [ 2 x0 xbar    lambda1 lambda2 I + 2 xbar xbar^T ].
BlockVector quad_apply(const BlockVector& x, const BlockVector& y);
/// Q_x materialized as 2 Arw(x)^2 - Arw(x o x).
Eigen::MatrixXd quad_dense(const BlockVector& x);

/// T_x = Q_{x^{1/2}}; x must lie in the cone interior.
BlockVector t_apply(const BlockVector& x, const BlockVector& y);
Eigen::MatrixXd t_dense(const BlockVector& x);

/// Spectral power lambda1^p c1 + lambda2^p c2 per block.
BlockVector power(const BlockVector& x, double p);
BlockVector inverse(const BlockVector& x);
BlockVector sqrt(const BlockVector& x);

struct JordanNorms {
  double frobenius;   // sqrt(sum lambda^2) = sqrt(2) ||x||
  double spectral;    // max |lambda|
  double lambda_min;  // min over all 2r eigenvalues
};

JordanNorms norms_and_extremes(const BlockVector& x);
double frobenius_norm(const BlockVector& x);
double spectral_norm(const BlockVector& x);
double lambda_min(const BlockVector& x);

enum class ConeRegion { interior, boundary, outside };

inline constexpr double kDefaultConeTolerance = 1e-12;

ConeRegion cone_membership(const BlockVector& x,
                           double tol = kDefaultConeTolerance);
inline bool is_interior(const BlockVector& x,
                        double tol = kDefaultConeTolerance) {
  return cone_membership(x, tol) == ConeRegion::interior;
}

}  // namespace qipm
