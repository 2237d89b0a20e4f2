#pragma once

// Extremal eigenvalues of symmetric positive semidefinite operators by
// Lanczos with full reorthogonalization and explicit restarts.

#include <Eigen/Core>

#include <functional>

namespace qipm {

using LinearOperator =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& v)>;

struct RitzPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  int steps = 0;
  bool converged = false;
};

/// Largest eigenvalue of the operator. `start` may be empty, in which case a
/// fixed deterministic start vector is used.
RitzPair lanczos_largest(const LinearOperator& op, Eigen::Index dim,
                         const Eigen::VectorXd& start, double rel_tol = 1e-10,
                         int krylov_dim = 40, int max_restarts = 20);

}  // namespace qipm
