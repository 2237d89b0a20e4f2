#include "newton.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "error.hpp"
#include "spectrum.hpp"

namespace qipm {

namespace {

// Row-wise G = A_b Arw(s_b)^{-1} Arw(x_b) for one cone block (k > 1).
Eigen::MatrixXd scaled_block_columns(
    const Eigen::Ref<const Eigen::MatrixXd>& Ab,
    Eigen::Ref<const Eigen::VectorXd> xb, Eigen::Ref<const Eigen::VectorXd> sb) {
  const Index k = sb.size();
  const Index rows = Ab.rows();
  const double s0 = sb[0];
  const auto st = sb.tail(k - 1);
  const double det = s0 * s0 - st.squaredNorm();

  // Z = Arw(s)^{-1} A_b^T, held transposed (rows x k).
  Eigen::MatrixXd Z(rows, k);
  Z.col(0) = (s0 * Ab.col(0) - Ab.rightCols(k - 1) * st) / det;
  Z.rightCols(k - 1) =
      (Ab.rightCols(k - 1) - Z.col(0) * st.transpose()) / s0;

  // G = (Arw(x) Z^T)^T.
  const double x0 = xb[0];
  const auto xt = xb.tail(k - 1);
  Eigen::MatrixXd G(rows, k);
  G.col(0) = x0 * Z.col(0) + Z.rightCols(k - 1) * xt;
  G.rightCols(k - 1) = Z.col(0) * xt.transpose() + x0 * Z.rightCols(k - 1);
  return G;
}

double arw_abs_line_sum(Eigen::Ref<const Eigen::VectorXd> blk, Index t) {
  // Row t of Arw(blk); Arw is symmetric so this is also column t.
  const Index k = blk.size();
  if (k == 1) return std::abs(blk[0]);
  if (t == 0) return std::abs(blk[0]) + blk.tail(k - 1).lpNorm<1>();
  return std::abs(blk[t]) + std::abs(blk[0]);
}

}  // namespace

Eigen::VectorXd NewtonStep::stacked() const {
  Eigen::VectorXd v(dx.n() + dy.size() + ds.n());
  v << dx.values(), dy, ds.values();
  return v;
}

NewtonStep NewtonStep::unstack(const ConePtr& cones, Index m,
                               const Eigen::VectorXd& v) {
  const Index n = cones->n();
  if (v.size() != m + 2 * n) {
    throw Error(Errc::structure_mismatch, "stacked Newton vector has wrong size");
  }
  return {BlockVector(cones, v.head(n)), v.segment(n, m),
          BlockVector(cones, v.tail(n))};
}

NewtonSystem::NewtonSystem(const SocpInstance& inst, BlockVector x,
                           BlockVector s, double sigma)
    : inst_(&inst),
      x_(std::move(x)),
      s_(std::move(s)),
      m_(inst.m()),
      n_(inst.n()),
      sigma_(sigma) {}

NewtonSystem NewtonSystem::assemble(const SocpInstance& inst,
                                    const Iterate& iter, double sigma,
                                    SpectrumMethod method,
                                    SpectrumHint* hint) {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw Error(Errc::invalid_argument, "centering parameter must lie in (0, 1)");
  }
  if (!iter.x.same_structure(inst.c()) || !iter.s.same_structure(inst.c()) ||
      iter.y.size() != inst.m()) {
    throw Error(Errc::structure_mismatch, "iterate does not match the instance");
  }
  if (!is_interior(iter.x) || !is_interior(iter.s)) {
    throw Error(Errc::not_interior,
                "Newton system needs x and s in the cone interior");
  }

  NewtonSystem sys(inst, iter.x, iter.s, sigma);
  sys.mu_ = duality_gap(iter.x, iter.s);

  const auto& A = inst.A();
  const BlockVector e = BlockVector::identity(inst.cones());
  sys.rhs_.resize(sys.dim());
  sys.rhs_.head(sys.m_) = inst.b() - A * iter.x.values();
  sys.rhs_.segment(sys.m_, sys.n_) =
      inst.c().values() - iter.s.values() - A.transpose() * iter.y;
  sys.rhs_.tail(sys.n_) =
      (e * (sigma * sys.mu_) - jordan_product(iter.x, iter.s)).values();

  sys.factorize();
  sys.measure(method, hint);
  return sys;
}

void NewtonSystem::factorize() {
  const auto& A = inst_->A();
  const auto& cones = x_.cones();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m_, m_);

  for (Index i = 0; i < cones.rank(); ++i) {
    const Index off = cones.offset(i);
    const Index k = cones.size(i);
    if (k == 1) {
      const double d = x_.values()[off] / s_.values()[off];
      const auto& nz = inst_->column_nonzeros(off);
      for (Index q : nz) {
        const double aq = d * A(q, off);
        for (Index p : nz) S(p, q) += aq * A(p, off);
      }
      continue;
    }
    const auto Ab = A.middleCols(off, k);
    const Eigen::MatrixXd G = scaled_block_columns(Ab, x_.block(i), s_.block(i));
    S.noalias() += G * Ab.transpose();
  }

  // Symmetric diagonal equilibration, so that the pivot test below does not
  // depend on how unevenly x / s is spread across the blocks.
  const Eigen::VectorXd diag = S.diagonal();
  if ((diag.array() > 0.0).all() && diag.allFinite()) {
    equil_ = diag.cwiseSqrt().cwiseInverse();
  } else {
    equil_ = Eigen::VectorXd::Ones(m_);
  }
  S = equil_.asDiagonal() * S * equil_.asDiagonal();

  const double s_norm = S.norm();
  schur_lu_.compute(S);
  const double min_pivot =
      schur_lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
  pivot_ratio_ = s_norm > 0.0 ? min_pivot / s_norm : 0.0;
  singular_ = !(pivot_ratio_ >= kPivotThreshold);
}

Eigen::VectorXd NewtonSystem::apply(const Eigen::VectorXd& v) const {
  const auto& A = inst_->A();
  const auto& cones = x_.cones_ptr();
  const BlockVector dx(cones, v.head(n_));
  const BlockVector ds(cones, v.tail(n_));
  Eigen::VectorXd out(dim());
  out.head(m_) = A * dx.values();
  out.segment(m_, n_) = A.transpose() * v.segment(n_, m_) + ds.values();
  out.tail(n_) = (jordan_product(s_, dx) + jordan_product(x_, ds)).values();
  return out;
}

Eigen::VectorXd NewtonSystem::apply_transpose(const Eigen::VectorXd& v) const {
  const auto& A = inst_->A();
  const auto& cones = x_.cones_ptr();
  const BlockVector w(cones, v.tail(n_));
  Eigen::VectorXd out(dim());
  out.head(n_) = A.transpose() * v.head(m_) + jordan_product(s_, w).values();
  out.segment(n_, m_) = A * v.segment(m_, n_);
  out.tail(n_) = v.segment(m_, n_) + jordan_product(x_, w).values();
  return out;
}

Eigen::MatrixXd NewtonSystem::dense() const {
  const auto& A = inst_->A();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim(), dim());
  M.block(0, 0, m_, n_) = A;
  M.block(m_, n_, n_, m_) = A.transpose();
  M.block(m_, n_ + m_, n_, n_).setIdentity();
  M.block(m_ + n_, 0, n_, n_) = arw_dense(s_);
  M.block(m_ + n_, n_ + m_, n_, n_) = arw_dense(x_);
  return M;
}

Eigen::VectorXd NewtonSystem::solve(const Eigen::VectorXd& v) const {
  if (singular_) {
    throw Error(Errc::singular_system,
                "Newton system is numerically singular (pivot ratio " +
                    std::to_string(pivot_ratio_) + ")");
  }
  const auto& A = inst_->A();
  const auto& cones = x_.cones_ptr();
  const Eigen::VectorXd r1 = v.head(m_);
  const BlockVector r2(cones, v.segment(m_, n_));
  const BlockVector r3(cones, v.tail(n_));

  // S dy = r1 - A Arw(s)^{-1} (r3 - Arw(x) r2)
  const BlockVector t = arw_inverse_apply(s_, r3 - jordan_product(x_, r2));
  const Eigen::VectorXd rhs_y = equil_.cwiseProduct(r1 - A * t.values());
  const Eigen::VectorXd dy =
      equil_.cwiseProduct(Eigen::VectorXd(schur_lu_.solve(rhs_y)));
  const BlockVector ds(cones, r2.values() - A.transpose() * dy);
  const BlockVector dx = arw_inverse_apply(s_, r3 - jordan_product(x_, ds));

  Eigen::VectorXd out(dim());
  out << dx.values(), dy, ds.values();
  return out;
}

Eigen::VectorXd NewtonSystem::solve_transpose(const Eigen::VectorXd& v) const {
  if (singular_) {
    throw Error(Errc::singular_system, "Newton system is numerically singular");
  }
  const auto& A = inst_->A();
  const auto& cones = x_.cones_ptr();
  const BlockVector f(cones, v.head(n_));
  const Eigen::VectorXd g = v.segment(n_, m_);
  const BlockVector h(cones, v.tail(n_));

  // S^T u = g - A h + A Arw(x) Arw(s)^{-1} f
  const BlockVector dtf = jordan_product(x_, arw_inverse_apply(s_, f));
  const Eigen::VectorXd rhs_u =
      equil_.cwiseProduct(g - A * h.values() + A * dtf.values());
  const Eigen::VectorXd u =
      equil_.cwiseProduct(Eigen::VectorXd(schur_lu_.transpose().solve(rhs_u)));
  const BlockVector w =
      arw_inverse_apply(s_, BlockVector(cones, f.values() - A.transpose() * u));
  const BlockVector vv = h - jordan_product(x_, w);

  Eigen::VectorXd out(dim());
  out << u, vv.values(), w.values();
  return out;
}

double NewtonSystem::frobenius_norm() const {
  double sq = 2.0 * inst_->A().squaredNorm() + static_cast<double>(n_);
  const auto& cones = x_.cones();
  for (Index i = 0; i < cones.rank(); ++i) {
    for (const auto& blk : {x_.block(i), s_.block(i)}) {
      const Index k = blk.size();
      sq += static_cast<double>(k) * blk[0] * blk[0];
      if (k > 1) sq += 2.0 * blk.tail(k - 1).squaredNorm();
    }
  }
  return std::sqrt(sq);
}

double NewtonSystem::max_abs_row_sum() const {
  const auto& A = inst_->A();
  const Eigen::VectorXd a_rows = A.cwiseAbs().rowwise().sum();
  const Eigen::VectorXd a_cols = A.cwiseAbs().colwise().sum().transpose();
  double best = a_rows.maxCoeff();
  best = std::max(best, a_cols.maxCoeff() + 1.0);
  const auto& cones = x_.cones();
  for (Index i = 0; i < cones.rank(); ++i) {
    for (Index t = 0; t < cones.size(i); ++t) {
      best = std::max(best, arw_abs_line_sum(s_.block(i), t) +
                                arw_abs_line_sum(x_.block(i), t));
    }
  }
  return best;
}

double NewtonSystem::max_abs_col_sum() const {
  const auto& A = inst_->A();
  const Eigen::VectorXd a_rows = A.cwiseAbs().rowwise().sum();
  const Eigen::VectorXd a_cols = A.cwiseAbs().colwise().sum().transpose();
  double best = a_rows.maxCoeff();
  const auto& cones = x_.cones();
  for (Index i = 0; i < cones.rank(); ++i) {
    const Index off = cones.offset(i);
    for (Index t = 0; t < cones.size(i); ++t) {
      best = std::max(best, a_cols[off + t] + arw_abs_line_sum(s_.block(i), t));
      best = std::max(best, 1.0 + arw_abs_line_sum(x_.block(i), t));
    }
  }
  return best;
}

// Relative Ritz residual at which the extremal estimates stop. The eigenvalue
// error is of the order of the squared residual.
constexpr double kLanczosTolerance = 1e-7;

void NewtonSystem::measure(SpectrumMethod method, SpectrumHint* hint) {
  if (method == SpectrumMethod::none) return;
  if (method == SpectrumMethod::automatic) {
    method = dim() <= kDenseSpectrumLimit ? SpectrumMethod::dense
                                          : SpectrumMethod::iterative;
  }

  if (method == SpectrumMethod::dense) {
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(dense());
    const auto& sv = svd.singularValues();
    sigma_max_ = sv[0];
    sigma_min_ = sv[sv.size() - 1];
  } else {
    const Index N = dim();
    static const Eigen::VectorXd kNoStart;
    const RitzPair top = lanczos_largest(
        [this](const Eigen::VectorXd& v) { return apply_transpose(apply(v)); },
        N, hint ? hint->top : kNoStart, kLanczosTolerance);
    sigma_max_ = std::sqrt(std::max(top.value, 0.0));
    if (hint) hint->top = top.vector;
    if (singular_) {
      sigma_min_ = 0.0;
    } else {
      const RitzPair bottom = lanczos_largest(
          [this](const Eigen::VectorXd& v) {
            return solve(solve_transpose(v));
          },
          N, hint ? hint->bottom : kNoStart, kLanczosTolerance);
      sigma_min_ = bottom.value > 0.0 ? 1.0 / std::sqrt(bottom.value) : 0.0;
      if (hint) hint->bottom = bottom.vector;
    }
  }

  kappa_ = sigma_min_ > 0.0 ? sigma_max_ / sigma_min_
                            : std::numeric_limits<double>::infinity();
  const double sym_fro = std::sqrt(2.0) * frobenius_norm();
  const double sym_s1 = std::max(max_abs_row_sum(), max_abs_col_sum());
  zeta_ = std::min(sym_fro, sym_s1) / sigma_max_;
}

SolveReport solve_exact(const NewtonSystem& sys) {
  const Eigen::VectorXd& rhs = sys.rhs();
  Eigen::VectorXd sol = sys.solve(rhs);
  // One step of iterative refinement against the unreduced system.
  sol += sys.solve(rhs - sys.apply(sol));
  const double residual = (sys.apply(sol) - rhs).norm();

  SolveReport report{NewtonStep::unstack(sys.x().cones_ptr(), sys.m(), sol),
                     residual, true, 0.0};
  return report;
}

Eigen::VectorXd tomography_noise(Index dim, double norm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd noise(dim);
  for (Index i = 0; i < dim; ++i) noise[i] = unif(rng);
  return noise * (norm / noise.norm());
}

SolveReport solve_inexact(const NewtonSystem& sys, double target_error,
                          std::uint64_t seed) {
  if (!(target_error >= 0.0)) {
    throw Error(Errc::invalid_argument, "target error must be >= 0");
  }
  SolveReport report = solve_exact(sys);
  if (target_error == 0.0) return report;

  const double injected = kNoiseFraction * target_error;
  const Eigen::VectorXd noise = tomography_noise(sys.dim(), injected, seed);

  const Eigen::VectorXd noisy = report.solution.stacked() + noise;
  report.solution = NewtonStep::unstack(sys.x().cones_ptr(), sys.m(), noisy);
  report.residual_norm = (sys.apply(noisy) - sys.rhs()).norm();
  report.exact = false;
  report.injected_error = injected;
  return report;
}

double measure_kappa(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw Error(Errc::invalid_argument, "kappa needs a nonempty square matrix");
  }
  constexpr Index kFullSvdLimit = 2000;
  double smax = 0.0;
  double smin = 0.0;
  if (M.rows() <= kFullSvdLimit) {
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    smax = sv[0];
    smin = sv[sv.size() - 1];
  } else {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const Eigen::VectorXd none;
    smax = std::sqrt(lanczos_largest(
                         [&](const Eigen::VectorXd& v) {
                           return Eigen::VectorXd(M.transpose() * (M * v));
                         },
                         M.rows(), none)
                         .value);
    const double inv = lanczos_largest(
                           [&](const Eigen::VectorXd& v) {
                             return Eigen::VectorXd(
                                 lu.solve(lu.transpose().solve(v)));
                           },
                           M.rows(), none)
                           .value;
    smin = std::isfinite(inv) && inv > 0.0 ? 1.0 / std::sqrt(inv) : 0.0;
  }
  if (!(smin > smax * std::numeric_limits<double>::epsilon())) {
    return std::numeric_limits<double>::infinity();
  }
  return smax / smin;
}

double measure_zeta(const Eigen::MatrixXd& M) {
  if (M.size() == 0 || M.cwiseAbs().maxCoeff() == 0.0) {
    throw Error(Errc::invalid_argument, "zeta is undefined for the zero matrix");
  }
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
  const double spectral = svd.singularValues()[0];
  const double fro = std::sqrt(2.0) * M.norm();
  const double s1 = std::max(M.cwiseAbs().rowwise().sum().maxCoeff(),
                             M.cwiseAbs().colwise().sum().maxCoeff());
  return std::min(fro, s1) / spectral;
}

}  // namespace qipm
