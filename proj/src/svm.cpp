#include "svm.hpp"

#include <cmath>
#include <random>
#include <string>

#include "error.hpp"

namespace qipm {

void SvmDataset::validate() const {
  if (y.size() != X.cols()) {
    throw Error(Errc::structure_mismatch,
                "label count " + std::to_string(y.size()) +
                    " does not match point count " + std::to_string(X.cols()));
  }
  if (!X.allFinite()) {
    throw Error(Errc::invalid_argument, "data matrix has non-finite entries");
  }
  for (Index i = 0; i < y.size(); ++i) {
    if (y[i] != 1.0 && y[i] != -1.0) {
      throw Error(Errc::invalid_argument,
                  "label " + std::to_string(i) + " is not +-1");
    }
  }
}

GeneratedSvm generate_svm(Index n, Index m, double p, std::uint64_t seed) {
  if (n < 2 || m < 2) {
    throw Error(Errc::invalid_argument, "generator needs n >= 2 and m >= 2");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(Errc::invalid_argument, "flip probability must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution flip(p);

  Eigen::VectorXd w(n);
  do {
    for (Index j = 0; j < n; ++j) w[j] = normal(rng);
  } while (w.norm() == 0.0);
  w.normalize();

  const Index m_test = m / 3;
  Eigen::MatrixXd X(n, m);
  Eigen::MatrixXd Xt(n, m_test);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) X(j, i) = normal(rng);
  for (Index i = 0; i < m_test; ++i)
    for (Index j = 0; j < n; ++j) Xt(j, i) = normal(rng);

  const Eigen::VectorXd margins = (w.transpose() * X).transpose();
  const double min_margin = margins.cwiseAbs().minCoeff();
  if (!(min_margin > 0.0)) {
    throw Error(Errc::domain_error, "a training point lies on the hyperplane");
  }
  X /= min_margin;
  Xt /= min_margin;

  auto labels = [&](const Eigen::MatrixXd& pts) {
    Eigen::VectorXd y(pts.cols());
    for (Index i = 0; i < pts.cols(); ++i) {
      const double score = w.dot(pts.col(i));
      y[i] = score >= 0.0 ? 1.0 : -1.0;
      if (flip(rng)) y[i] = -y[i];
    }
    return y;
  };

  GeneratedSvm out;
  out.train.X = std::move(X);
  out.train.y = labels(out.train.X);
  out.train.p = p;
  out.train.seed = seed;
  out.test.X = std::move(Xt);
  out.test.y = labels(out.test.X);
  out.test.p = p;
  out.test.seed = seed;
  out.planted.w = w;
  out.planted.b = 0.0;
  return out;
}

SocpInstance to_socp(const SvmDataset& data, double C, SvmReduction form) {
  if (!(C > 0.0)) throw Error(Errc::invalid_argument, "C must be > 0");
  data.validate();
  const Index n = data.features();
  const Index m = data.points();
  const Index xi_at = n + 3;
  const Index z_at = xi_at + m;
  const Index dim = form.margin_surplus ? z_at + m : z_at;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, dim);
  Eigen::VectorXd b(m + 1);
  for (Index i = 0; i < m; ++i) {
    A.block(i, 2, 1, n) = data.X.col(i).transpose();
    A(i, n + 2) = 1.0;
    A(i, xi_at + i) = data.y[i];
    if (form.margin_surplus) A(i, z_at + i) = -data.y[i];
    b[i] = data.y[i];
  }
  A(m, 0) = 1.0;
  A(m, 1) = -1.0;
  b[m] = 1.0;

  std::vector<Index> sizes;
  sizes.reserve(static_cast<size_t>(dim - n));
  if (form.fold_bias) {
    sizes.push_back(n + 3);
  } else {
    sizes.push_back(n + 2);
    sizes.push_back(1);
  }
  for (Index j = xi_at; j < dim; ++j) sizes.push_back(1);

  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
  c[1] = 1.0;
  c.segment(xi_at, m).setConstant(C);

  return SocpInstance(
      std::move(A), std::move(b),
      BlockVector(make_cones(std::move(sizes)), std::move(c)),
      SvmLayout{n, m, form.fold_bias, form.margin_surplus});
}

Classifier extract_classifier(const SocpInstance& inst, const BlockVector& x) {
  const auto& layout = inst.svm_layout();
  if (!layout) {
    throw Error(Errc::structure_mismatch, "instance is not an SVM reduction");
  }
  const Index expected = layout->features + 3 +
                         layout->points * (layout->margin_surplus ? 2 : 1);
  if (x.n() != inst.n() || x.n() != expected) {
    throw Error(Errc::structure_mismatch,
                "solution does not match the SVM layout");
  }
  return {x.values().segment(2, layout->features),
          x.values()[layout->features + 2]};
}

Classifier extract_classifier(const SocpInstance& inst,
                              const Iterate& solution) {
  return extract_classifier(inst, solution.x);
}

double accuracy(const Classifier& clf, const SvmDataset& data) {
  if (data.points() == 0) {
    throw Error(Errc::invalid_argument, "accuracy of an empty dataset");
  }
  if (clf.w.size() != data.features()) {
    throw Error(Errc::structure_mismatch,
                "classifier dimension does not match the data");
  }
  const Eigen::VectorXd scores =
      (clf.w.transpose() * data.X).transpose().array() + clf.b;
  Index correct = 0;
  for (Index i = 0; i < data.points(); ++i) {
    if (scores[i] == 0.0) {
      throw Error(Errc::domain_error,
                  "point " + std::to_string(i) + " lies on the decision boundary");
    }
    if (data.y[i] * scores[i] > 0.0) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.points());
}

}  // namespace qipm
