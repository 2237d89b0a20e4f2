#include "socp.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace qipm {

SocpInstance::SocpInstance(Eigen::MatrixXd A, Eigen::VectorXd b, BlockVector c,
                           std::optional<SvmLayout> svm)
    : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)), svm_(svm) {
  if (A_.cols() != c_.n()) {
    throw Error(Errc::structure_mismatch,
                "A has " + std::to_string(A_.cols()) +
                    " columns but the cone dimension is " +
                    std::to_string(c_.n()));
  }
  if (b_.size() != A_.rows()) {
    throw Error(Errc::structure_mismatch, "b length does not match rows of A");
  }
  if (A_.rows() < 1 || A_.rows() > A_.cols()) {
    throw Error(Errc::rank_deficient,
                "A must have 1 <= m <= n rows (m=" + std::to_string(A_.rows()) +
                    ", n=" + std::to_string(A_.cols()) + ")");
  }
  if (!A_.allFinite() || !b_.allFinite() || !c_.values().allFinite()) {
    throw Error(Errc::invalid_argument, "instance data must be finite");
  }

  const Eigen::BDCSVD<Eigen::MatrixXd> svd(A_);
  const auto& sv = svd.singularValues();
  a_norm_ = sv.size() > 0 ? sv[0] : 0.0;
  const double threshold = std::numeric_limits<double>::epsilon() *
                           static_cast<double>(A_.cols()) * a_norm_;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > threshold) ++rank;
  }
  if (rank < A_.rows()) {
    throw Error(Errc::rank_deficient,
                "A is rank deficient: numerical rank " + std::to_string(rank) +
                    " < m = " + std::to_string(A_.rows()) +
                    " (smallest singular value " +
                    std::to_string(sv[sv.size() - 1]) + ")");
  }

  col_nz_.resize(static_cast<size_t>(A_.cols()));
  for (Index j = 0; j < A_.cols(); ++j) {
    auto& nz = col_nz_[static_cast<size_t>(j)];
    for (Index i = 0; i < A_.rows(); ++i) {
      if (A_(i, j) != 0.0) nz.push_back(i);
    }
  }
}

Iterate Iterate::make(BlockVector x, Eigen::VectorXd y, BlockVector s) {
  const double mu = duality_gap(x, s);
  double d = std::numeric_limits<double>::infinity();
  if (mu > 0.0 && is_interior(x, 0.0)) d = central_path_distance(x, s, mu);
  return Iterate{std::move(x), std::move(y), std::move(s), mu, d};
}

double duality_gap(const BlockVector& x, const BlockVector& s) {
  return x.dot(s) / static_cast<double>(x.rank());
}

double central_path_distance(const BlockVector& x, const BlockVector& s,
                             double nu) {
  if (!(nu > 0.0)) {
    throw Error(Errc::invalid_argument, "central path parameter must be > 0");
  }
  const BlockVector ts = t_apply(x, s);
  return frobenius_norm(ts - BlockVector::identity(x.cones_ptr()) * nu);
}

bool in_neighborhood(const Iterate& iter, double eta) {
  if (!(eta > 0.0)) {
    throw Error(Errc::invalid_argument, "neighborhood radius must be > 0");
  }
  if (!is_interior(iter.x) || !is_interior(iter.s)) return false;
  const double mu = duality_gap(iter.x, iter.s);
  if (!(mu > 0.0)) return false;
  return central_path_distance(iter.x, iter.s, mu) <= eta * mu;
}

LinearResiduals linear_residuals(const SocpInstance& inst,
                                 const Iterate& iter) {
  const double primal = (inst.A() * iter.x.values() - inst.b()).norm();
  const double dual = (inst.A().transpose() * iter.y + iter.s.values() -
                       inst.c().values())
                          .norm();
  return {primal, dual};
}

ScaledPair scale_to_frame(const BlockVector& x, const BlockVector& s,
                          double mu) {
  if (!(mu > 0.0)) {
    throw Error(Errc::invalid_argument, "scaling requires mu > 0");
  }
  return {BlockVector::identity(x.cones_ptr()), t_apply(x, s) * (1.0 / mu)};
}

}  // namespace qipm
