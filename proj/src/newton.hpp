#pragma once

// The Newton system of the primal-dual interior-point method:
//
//   [ A       0    0      ] [dx]   [ b - A x              ]
//   [ 0       A^T  I      ] [dy] = [ c - s - A^T y        ]
//   [ Arw(s)  0    Arw(x) ] [ds]   [ sigma mu e - x o s   ]
//
// The system is never stored densely. It is solved by eliminating ds and dx,
// which leaves the m x m system  A Arw(s)^{-1} Arw(x) A^T dy = r, factorized
// with partial pivoting. The same factorization serves M^{-1} and M^{-T}
// applications for the condition-number estimate.

#include <Eigen/Core>
#include <Eigen/LU>

#include <cstdint>
#include <limits>

#include "socp.hpp"

namespace qipm {

struct NewtonStep {
  BlockVector dx;
  Eigen::VectorXd dy;
  BlockVector ds;

  /// (dx; dy; ds) as one vector.
  Eigen::VectorXd stacked() const;
  static NewtonStep unstack(const ConePtr& cones, Index m,
                            const Eigen::VectorXd& v);
};

enum class SpectrumMethod {
  automatic,  // dense SVD for small systems, Lanczos otherwise
  dense,
  iterative,
  none,
};

/// Largest systems (in M's dimension) measured by a dense SVD under
/// SpectrumMethod::automatic.
inline constexpr Index kDenseSpectrumLimit = 96;

/// Warm-start vectors for the iterative singular-value estimates; carried
/// from one interior-point iteration to the next.
struct SpectrumHint {
  Eigen::VectorXd top;
  Eigen::VectorXd bottom;
};

class NewtonSystem {
 public:
  /// Requires x, s in the cone interior and 0 < sigma < 1. The instance must
  /// outlive the system.
  static NewtonSystem assemble(const SocpInstance& inst, const Iterate& iter,
                               double sigma,
                               SpectrumMethod method = SpectrumMethod::automatic,
                               SpectrumHint* hint = nullptr);

  Index dim() const noexcept { return m_ + 2 * n_; }
  Index m() const noexcept { return m_; }
  Index n() const noexcept { return n_; }
  double sigma() const noexcept { return sigma_; }
  double mu() const noexcept { return mu_; }
  const Eigen::VectorXd& rhs() const noexcept { return rhs_; }
  const SocpInstance& instance() const noexcept { return *inst_; }
  const BlockVector& x() const noexcept { return x_; }
  const BlockVector& s() const noexcept { return s_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd dense() const;

  /// M^{-1} v and M^{-T} v through the reduced factorization.
  Eigen::VectorXd solve(const Eigen::VectorXd& v) const;
  Eigen::VectorXd solve_transpose(const Eigen::VectorXd& v) const;

  bool singular() const noexcept { return singular_; }
  /// Smallest |pivot| of the equilibrated reduced matrix over its Frobenius
  /// norm.
  double pivot_ratio() const noexcept { return pivot_ratio_; }

  double frobenius_norm() const;
  double max_abs_row_sum() const;
  double max_abs_col_sum() const;

  /// Extremal singular values of M; NaN when not measured.
  double sigma_max() const noexcept { return sigma_max_; }
  double sigma_min() const noexcept { return sigma_min_; }
  /// Condition number of sym(M) (= that of M); +inf when singular.
  double kappa() const noexcept { return kappa_; }
  /// min(||sym M||_F, s1(sym M)) / ||sym M||_2.
  double zeta() const noexcept { return zeta_; }

 private:
  NewtonSystem(const SocpInstance& inst, BlockVector x, BlockVector s,
               double sigma);
  void factorize();
  void measure(SpectrumMethod method, SpectrumHint* hint);

  const SocpInstance* inst_ = nullptr;
  BlockVector x_;
  BlockVector s_;
  Index m_ = 0;
  Index n_ = 0;
  double sigma_ = 0.0;
  double mu_ = 0.0;
  Eigen::VectorXd rhs_;

  Eigen::PartialPivLU<Eigen::MatrixXd> schur_lu_;  // of R S R
  Eigen::VectorXd equil_;                           // diagonal of R
  bool singular_ = false;
  double pivot_ratio_ = 0.0;

  double sigma_max_ = std::numeric_limits<double>::quiet_NaN();
  double sigma_min_ = std::numeric_limits<double>::quiet_NaN();
  double kappa_ = std::numeric_limits<double>::quiet_NaN();
  double zeta_ = std::numeric_limits<double>::quiet_NaN();
};

/// Pivots below this fraction of the reduced matrix's Frobenius norm declare
/// the system singular.
inline constexpr double kPivotThreshold = 1e-13;

/// Fraction of the allowed error injected by the tomography simulation.
inline constexpr double kNoiseFraction = 0.9;

struct SolveReport {
  NewtonStep solution;
  double residual_norm = 0.0;  // ||M solution - rhs||
  bool exact = true;
  double injected_error = 0.0;  // ||solution - exact solution||
};

SolveReport solve_exact(const NewtonSystem& sys);

/// i.i.d. U[-1, 1] coordinates rescaled to the given l2 norm.
Eigen::VectorXd tomography_noise(Index dim, double norm, std::uint64_t seed);

/// Exact solve plus a seeded noise vector: i.i.d. U[-1, 1] coordinates over
/// (dx; dy; ds), rescaled to l2 norm kNoiseFraction * target_error.
SolveReport solve_inexact(const NewtonSystem& sys, double target_error,
                          std::uint64_t seed);

/// sigma_max / sigma_min of a dense matrix (full SVD up to dimension 2000,
/// Lanczos above). +inf for a singular matrix.
double measure_kappa(const Eigen::MatrixXd& M);

/// min(||sym M||_F, max_i sum_j |sym(M)_ij|) / ||sym M||_2 with
/// sym(M) = [0 M; M^T 0]. Throws for the zero matrix.
double measure_zeta(const Eigen::MatrixXd& M);

}  // namespace qipm
