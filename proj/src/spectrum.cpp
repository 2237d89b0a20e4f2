#include "spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace qipm {

namespace {

Eigen::VectorXd default_start(Eigen::Index dim) {
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = unif(rng);
  return v;
}

}  // namespace

RitzPair lanczos_largest(const LinearOperator& op, Eigen::Index dim,
                         const Eigen::VectorXd& start, double rel_tol,
                         int krylov_dim, int max_restarts) {
  RitzPair out;
  Eigen::VectorXd v =
      (start.size() == dim && start.norm() > 0.0) ? start : default_start(dim);
  v.normalize();

  const int k_max = static_cast<int>(std::min<Eigen::Index>(krylov_dim, dim));
  Eigen::MatrixXd Q(dim, k_max);
  Eigen::VectorXd alpha(k_max);
  Eigen::VectorXd beta(k_max);

  for (int restart = 0; restart <= max_restarts; ++restart) {
    Q.col(0) = v;
    for (int j = 0; j < k_max; ++j) {
      Eigen::VectorXd w = op(Q.col(j));
      ++out.steps;
      alpha[j] = Q.col(j).dot(w);
      w -= alpha[j] * Q.col(j);
      if (j > 0) w -= beta[j - 1] * Q.col(j - 1);
      for (int pass = 0; pass < 2; ++pass) {
        w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
      }
      beta[j] = w.norm();

      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(j + 1, j + 1);
      T.diagonal() = alpha.head(j + 1);
      if (j > 0) {
        T.diagonal(1) = beta.head(j);
        T.diagonal(-1) = beta.head(j);
      }
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      const double theta = es.eigenvalues()[j];
      const Eigen::VectorXd s = es.eigenvectors().col(j);
      const double residual = beta[j] * std::abs(s[j]);

      out.value = theta;
      const bool invariant = beta[j] <= 1e-14 * std::max(1.0, std::abs(theta));
      if (residual <= rel_tol * std::abs(theta) || invariant ||
          j + 1 == dim) {
        out.vector = Q.leftCols(j + 1) * s;
        out.converged = true;
        return out;
      }
      if (j + 1 < k_max) {
        Q.col(j + 1) = w / beta[j];
      } else {
        v = Q * s;
        v.normalize();
      }
    }
  }
  out.vector = v;
  return out;
}

}  // namespace qipm
