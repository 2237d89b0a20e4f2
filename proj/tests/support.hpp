#pragma once

// Random inputs shared by the unit tests and the acceptance binary.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "jordan.hpp"
#include "socp.hpp"

namespace qipm::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  Index integer(Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(gen_);
  }
  Eigen::VectorXd normal_vector(Index n) {
    Eigen::VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }
  Eigen::MatrixXd normal_matrix(Index rows, Index cols) {
    Eigen::MatrixXd M(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) M(i, j) = normal();
    return M;
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline ConePtr random_cones(Rng& rng, Index max_blocks = 8,
                            Index max_size = 32) {
  const Index r = rng.integer(1, max_blocks);
  std::vector<Index> sizes;
  for (Index i = 0; i < r; ++i) sizes.push_back(rng.integer(1, max_size));
  return make_cones(sizes);
}

inline BlockVector random_vector(Rng& rng, const ConePtr& cones) {
  return BlockVector(cones, rng.normal_vector(cones->n()));
}

/// Every block has lambda_2 in [lo, lo + 1] and a normal tail.
inline BlockVector random_interior(Rng& rng, const ConePtr& cones,
                                   double lo = 0.05) {
  Eigen::VectorXd v = rng.normal_vector(cones->n());
  for (Index i = 0; i < cones->rank(); ++i) {
    const Index off = cones->offset(i);
    const Index k = cones->size(i);
    const double tail = k > 1 ? v.segment(off + 1, k - 1).norm() : 0.0;
    v[off] = tail + rng.uniform(lo, lo + 1.0);
  }
  return BlockVector(cones, std::move(v));
}

/// A point on the cone boundary in every block of size >= 2.
inline BlockVector random_boundary(Rng& rng, const ConePtr& cones) {
  Eigen::VectorXd v = rng.normal_vector(cones->n());
  for (Index i = 0; i < cones->rank(); ++i) {
    const Index off = cones->offset(i);
    const Index k = cones->size(i);
    v[off] = k > 1 ? v.segment(off + 1, k - 1).norm() : 0.0;
  }
  return BlockVector(cones, std::move(v));
}

inline double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

inline double spectral(const Eigen::MatrixXd& M) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
}

/// Symmetric matrix function through its eigendecomposition.
template <typename F>
Eigen::MatrixXd sym_function(const Eigen::MatrixXd& M, F f) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const Eigen::VectorXd d = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

/// Random instance with a known strictly feasible primal point x0:
/// A is m x n Gaussian and b = A x0.
struct RandomSocp {
  SocpInstance inst;
  BlockVector x0;
};

inline RandomSocp random_socp(Rng& rng, const ConePtr& cones, Index m) {
  const BlockVector x0 = random_interior(rng, cones, 0.5);
  Eigen::MatrixXd A = rng.normal_matrix(m, cones->n());
  Eigen::VectorXd b = A * x0.values();
  BlockVector c = random_vector(rng, cones);
  return {SocpInstance(std::move(A), std::move(b), std::move(c)), x0};
}

}  // namespace qipm::testing
