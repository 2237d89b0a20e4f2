#include "jordan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace qipm {

namespace {

void require_same(const BlockVector& a, const BlockVector& b,
                  const char* what) {
  if (!a.same_structure(b)) {
    throw Error(Errc::structure_mismatch,
                std::string(what) + ": block structures differ");
  }
}

BlockEigenvalues block_eigenvalues(Eigen::Ref<const Eigen::VectorXd> blk) {
  const double tail = blk.size() > 1 ? blk.tail(blk.size() - 1).norm() : 0.0;
  return {blk[0] + tail, blk[0] - tail};
}

// Unit direction of xbar, or the first tail axis when xbar vanishes.
Eigen::VectorXd frame_direction(Eigen::Ref<const Eigen::VectorXd> blk) {
  const Index k = blk.size() - 1;
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(k);
  if (k == 0) return dir;
  const double nrm = blk.tail(k).norm();
  if (nrm > 0.0) {
    dir = blk.tail(k) / nrm;
  } else {
    dir[0] = 1.0;
  }
  return dir;
}

double checked_power(double lambda, double p) {
  if (p < 0.0 && lambda == 0.0) {
    throw Error(Errc::domain_error,
                "power: zero eigenvalue with negative exponent");
  }
  if (lambda < 0.0 && p != std::floor(p)) {
    throw Error(Errc::domain_error,
                "power: negative eigenvalue with fractional exponent");
  }
  return std::pow(lambda, p);
}

}  // namespace

ConeStructure::ConeStructure(std::vector<Index> block_sizes)
    : sizes_(std::move(block_sizes)) {
  if (sizes_.empty()) {
    throw Error(Errc::invalid_argument, "cone structure needs >= 1 block");
  }
  offsets_.reserve(sizes_.size());
  for (Index s : sizes_) {
    if (s < 1) {
      throw Error(Errc::invalid_argument, "cone block sizes must be >= 1");
    }
    offsets_.push_back(n_);
    n_ += s;
  }
}

ConePtr make_cones(std::vector<Index> block_sizes) {
  return std::make_shared<const ConeStructure>(std::move(block_sizes));
}

BlockVector::BlockVector(ConePtr cones, Eigen::VectorXd values)
    : cones_(std::move(cones)), values_(std::move(values)) {
  if (!cones_) {
    throw Error(Errc::invalid_argument, "block vector without cone structure");
  }
  if (values_.size() != cones_->n()) {
    throw Error(Errc::structure_mismatch,
                "block vector length " + std::to_string(values_.size()) +
                    " does not match cone dimension " +
                    std::to_string(cones_->n()));
  }
}

BlockVector BlockVector::identity(const ConePtr& cones) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(cones->n());
  for (Index i = 0; i < cones->rank(); ++i) e[cones->offset(i)] = 1.0;
  return BlockVector(cones, std::move(e));
}

BlockVector BlockVector::zeros(const ConePtr& cones) {
  return BlockVector(cones, Eigen::VectorXd::Zero(cones->n()));
}

bool BlockVector::same_structure(const BlockVector& other) const noexcept {
  return cones_ == other.cones_ || *cones_ == *other.cones_;
}

double BlockVector::dot(const BlockVector& other) const {
  require_same(*this, other, "dot");
  return values_.dot(other.values_);
}

BlockVector BlockVector::operator+(const BlockVector& other) const {
  require_same(*this, other, "add");
  return BlockVector(cones_, values_ + other.values_);
}

BlockVector BlockVector::operator-(const BlockVector& other) const {
  require_same(*this, other, "subtract");
  return BlockVector(cones_, values_ - other.values_);
}

BlockVector BlockVector::operator*(double scale) const {
  return BlockVector(cones_, values_ * scale);
}

std::vector<BlockEigenvalues> eigenvalues(const BlockVector& x) {
  std::vector<BlockEigenvalues> out;
  out.reserve(static_cast<size_t>(x.rank()));
  for (Index i = 0; i < x.rank(); ++i) out.push_back(block_eigenvalues(x.block(i)));
  return out;
}

SpectralDecomposition spectral_decompose(const BlockVector& x) {
  SpectralDecomposition dec;
  dec.blocks.reserve(static_cast<size_t>(x.rank()));
  for (Index i = 0; i < x.rank(); ++i) {
    const auto blk = x.block(i);
    const auto ev = block_eigenvalues(blk);
    const Eigen::VectorXd dir = frame_direction(blk);
    JordanFrame f{ev.lambda1, ev.lambda2, Eigen::VectorXd(blk.size()),
                  Eigen::VectorXd(blk.size())};
    f.c1[0] = 0.5;
    f.c2[0] = 0.5;
    if (blk.size() > 1) {
      f.c1.tail(blk.size() - 1) = 0.5 * dir;
      f.c2.tail(blk.size() - 1) = -0.5 * dir;
    }
    dec.blocks.push_back(std::move(f));
  }
  return dec;
}

BlockVector jordan_product(const BlockVector& x, const BlockVector& y) {
  require_same(x, y, "jordan_product");
  Eigen::VectorXd out(x.n());
  const auto& cones = x.cones();
  for (Index i = 0; i < cones.rank(); ++i) {
    const Index off = cones.offset(i);
    const Index k = cones.size(i);
    const auto xb = x.block(i);
    const auto yb = y.block(i);
    out[off] = xb.dot(yb);
    if (k > 1) {
      out.segment(off + 1, k - 1) =
          xb[0] * yb.tail(k - 1) + yb[0] * xb.tail(k - 1);
    }
  }
  return BlockVector(x.cones_ptr(), std::move(out));
}

BlockVector arw_apply(const BlockVector& x, const BlockVector& y) {
  return jordan_product(x, y);
}

BlockVector arw_inverse_apply(const BlockVector& x, const BlockVector& y) {
  require_same(x, y, "arw_inverse_apply");
  Eigen::VectorXd out(x.n());
  const auto& cones = x.cones();
  for (Index i = 0; i < cones.rank(); ++i) {
    const Index off = cones.offset(i);
    const Index k = cones.size(i);
    const auto xb = x.block(i);
    const auto yb = y.block(i);
    const double x0 = xb[0];
    const double tail_sq = k > 1 ? xb.tail(k - 1).squaredNorm() : 0.0;
    const double det = x0 * x0 - tail_sq;
    if (x0 == 0.0 || det == 0.0) {
      throw Error(Errc::singular_system, "Arw(x) is singular");
    }
    if (k == 1) {
      out[off] = yb[0] / x0;
      continue;
    }
    const double cross = xb.tail(k - 1).dot(yb.tail(k - 1));
    const double z0 = (x0 * yb[0] - cross) / det;
    out[off] = z0;
    out.segment(off + 1, k - 1) = (yb.tail(k - 1) - z0 * xb.tail(k - 1)) / x0;
  }
  return BlockVector(x.cones_ptr(), std::move(out));
}

Eigen::MatrixXd arw_dense(const BlockVector& x) {
  const auto& cones = x.cones();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(x.n(), x.n());
  for (Index i = 0; i < cones.rank(); ++i) {
    const Index off = cones.offset(i);
    const Index k = cones.size(i);
    const auto xb = x.block(i);
    auto blk = m.block(off, off, k, k);
    blk.diagonal().setConstant(xb[0]);
    if (k > 1) {
      blk.row(0).tail(k - 1) = xb.tail(k - 1).transpose();
      blk.col(0).tail(k - 1) = xb.tail(k - 1);
    }
  }
  return m;
}

BlockVector quad_apply(const BlockVector& x, const BlockVector& y) {
  require_same(x, y, "quad_apply");
  Eigen::VectorXd out(x.n());
  const auto& cones = x.cones();
  for (Index i = 0; i < cones.rank(); ++i) {
    const Index off = cones.offset(i);
    const Index k = cones.size(i);
    const auto xb = x.block(i);
    const auto yb = y.block(i);
    const double x0 = xb[0];
    if (k == 1) {
      out[off] = x0 * x0 * yb[0];
      continue;
    }
    const auto xt = xb.tail(k - 1);
    const auto yt = yb.tail(k - 1);
    const double tail_sq = xt.squaredNorm();
    const double cross = xt.dot(yt);
    out[off] = (x0 * x0 + tail_sq) * yb[0] + 2.0 * x0 * cross;
    out.segment(off + 1, k - 1) = 2.0 * x0 * yb[0] * xt +
                                  (x0 * x0 - tail_sq) * yt + 2.0 * cross * xt;
  }
  return BlockVector(x.cones_ptr(), std::move(out));
}

Eigen::MatrixXd quad_dense(const BlockVector& x) {
  const Eigen::MatrixXd arw = arw_dense(x);
  return 2.0 * arw * arw - arw_dense(jordan_product(x, x));
}

BlockVector t_apply(const BlockVector& x, const BlockVector& y) {
  if (!is_interior(x, 0.0)) {
    throw Error(Errc::not_interior, "T_x requires x in the cone interior");
  }
  return quad_apply(power(x, 0.5), y);
}

Eigen::MatrixXd t_dense(const BlockVector& x) {
  if (!is_interior(x, 0.0)) {
    throw Error(Errc::not_interior, "T_x requires x in the cone interior");
  }
  return quad_dense(power(x, 0.5));
}

BlockVector power(const BlockVector& x, double p) {
  Eigen::VectorXd out(x.n());
  const auto& cones = x.cones();
  for (Index i = 0; i < cones.rank(); ++i) {
    const Index off = cones.offset(i);
    const Index k = cones.size(i);
    const auto xb = x.block(i);
    const auto ev = block_eigenvalues(xb);
    const double p1 = checked_power(ev.lambda1, p);
    const double p2 = checked_power(ev.lambda2, p);
    out[off] = 0.5 * (p1 + p2);
    if (k > 1) {
      out.segment(off + 1, k - 1) = 0.5 * (p1 - p2) * frame_direction(xb);
    }
  }
  return BlockVector(x.cones_ptr(), std::move(out));
}

BlockVector inverse(const BlockVector& x) { return power(x, -1.0); }

BlockVector sqrt(const BlockVector& x) { return power(x, 0.5); }

JordanNorms norms_and_extremes(const BlockVector& x) {
  JordanNorms out{0.0, 0.0, std::numeric_limits<double>::infinity()};
  double fro_sq = 0.0;
  for (const auto& ev : eigenvalues(x)) {
    fro_sq += ev.lambda1 * ev.lambda1 + ev.lambda2 * ev.lambda2;
    out.spectral = std::max({out.spectral, std::abs(ev.lambda1),
                             std::abs(ev.lambda2)});
    out.lambda_min = std::min(out.lambda_min, ev.lambda2);
  }
  out.frobenius = std::sqrt(fro_sq);
  return out;
}

double frobenius_norm(const BlockVector& x) {
  return norms_and_extremes(x).frobenius;
}

double spectral_norm(const BlockVector& x) {
  return norms_and_extremes(x).spectral;
}

double lambda_min(const BlockVector& x) {
  double lo = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < x.rank(); ++i) {
    lo = std::min(lo, block_eigenvalues(x.block(i)).lambda2);
  }
  return lo;
}

ConeRegion cone_membership(const BlockVector& x, double tol) {
  if (tol < 0.0) {
    throw Error(Errc::invalid_argument, "cone tolerance must be >= 0");
  }
  const double lo = lambda_min(x);
  if (lo > tol) return ConeRegion::interior;
  if (lo < -tol) return ConeRegion::outside;
  return ConeRegion::boundary;
}

}  // namespace qipm
