#pragma once

// Soft-margin l1-SVM
//
//   min ||w||^2 / 2 + C sum xi_i  s.t.  y_i (w^T x_i + b) >= 1 - xi_i, xi >= 0
//
// as an SOCP over (t + 1; t; w; b) in L^{n+3} and xi in (L^1)^m. The cone
// constraint is equivalent to 2t + 1 >= ||w||^2 + b^2, and the objective is
// t + C sum xi_i. By default the margin rows are equalities
// w^T x_i + b + y_i xi_i = y_i, which is what makes (2; 1; 0; 0; 1...1) an
// exactly feasible start. Note that the equality form caps every margin at 1.
// With margin_surplus each row gets a surplus z_i in L^1 (z_i >= 0),
// w^T x_i + b + y_i (xi_i - z_i) = y_i, which restores the inequality.

#include <Eigen/Core>

#include <cstdint>

#include "socp.hpp"

namespace qipm {

struct SvmDataset {
  Eigen::MatrixXd X;  // n x m, one column per point
  Eigen::VectorXd y;  // labels in {-1, +1}
  double p = 0.0;
  std::uint64_t seed = 0;

  Index features() const noexcept { return X.rows(); }
  Index points() const noexcept { return X.cols(); }

  /// Throws unless labels are +-1, X is finite and the sizes agree.
  void validate() const;
};

struct Classifier {
  Eigen::VectorXd w;
  double b = 0.0;
};

struct GeneratedSvm {
  SvmDataset train;
  SvmDataset test;  // floor(m / 3) points
  Classifier planted;
};

/// Planted unit normal w* (uniform on the sphere) with zero bias; points are
/// standard normal, all scaled by one factor so the smallest training margin
/// |w*^T x_i| is 1; labels sign(w*^T x_i), each flipped with probability p.
/// The test set reuses w* and the training scale factor.
GeneratedSvm generate_svm(Index n, Index m, double p, std::uint64_t seed);

inline constexpr double kDefaultPenalty = 1.0;

struct SvmReduction {
  bool fold_bias = true;        // (t; b) in one cone instead of b in L^1
  bool margin_surplus = false;  // inequality margin rows
};

/// Columns: t + 1, t, w, b, xi, then z when margin_surplus is set. Rows: one
/// per point, then (t + 1) - t = 1.
SocpInstance to_socp(const SvmDataset& data, double C = kDefaultPenalty,
                     SvmReduction form = {});

/// Reads (w, b) from the fixed coordinate layout of to_socp.
Classifier extract_classifier(const SocpInstance& inst, const BlockVector& x);
Classifier extract_classifier(const SocpInstance& inst, const Iterate& solution);

/// Fraction of points with y_i (w^T x_i + b) > 0; a zero score is an error.
double accuracy(const Classifier& clf, const SvmDataset& data);

}  // namespace qipm
