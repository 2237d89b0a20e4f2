#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>

#include "error.hpp"
#include "newton.hpp"
#include "properties.hpp"

using namespace qipm;
using namespace qipm::testing;

namespace {

// n = 2, m = 1: one L^2 block, A = [1 2], b = 3.
SocpInstance toy_instance() {
  const auto c = make_cones({2});
  Eigen::MatrixXd A(1, 2);
  A << 1, 2;
  return SocpInstance(A, Eigen::VectorXd::Constant(1, 3.0),
                      BlockVector(c, Eigen::Vector2d(1, 0.5)));
}

Eigen::MatrixXd sym(const Eigen::MatrixXd& M) {
  const Index r = M.rows(), c = M.cols();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(r + c, r + c);
  S.topRightCorner(r, c) = M;
  S.bottomLeftCorner(c, r) = M.transpose();
  return S;
}

}  // namespace

TEST_CASE("toy system entries by hand") {
  const SocpInstance inst = toy_instance();
  const auto c = inst.cones();
  const BlockVector x(c, Eigen::Vector2d(2, 1));
  const BlockVector s(c, Eigen::Vector2d(3, -1));
  Eigen::VectorXd y(1);
  y << 0.25;
  const Iterate it = Iterate::make(x, y, s);
  const double sigma = 0.5;
  const auto sys = NewtonSystem::assemble(inst, it, sigma, SpectrumMethod::dense);

  // Rows: [A 0 0; 0 A^T I; Arw(s) 0 Arw(x)], unknowns (dx, dy, ds).
  Eigen::MatrixXd M(5, 5);
  M << 1, 2, 0, 0, 0,
       0, 0, 1, 1, 0,
       0, 0, 2, 0, 1,
       3, -1, 0, 2, 1,
       -1, 3, 0, 1, 2;
  CHECK((sys.dense() - M).norm() == 0.0);

  const double mu = (2 * 3 + 1 * -1) / 1.0;
  Eigen::VectorXd rhs(5);
  rhs << 3 - 4,                      // b - A x
      1 - 3 - 0.25, 0.5 + 1 - 0.5,   // c - s - A^T y
      sigma * mu - 5, -(2 * -1 + 3 * 1);  // sigma mu e - x o s
  CHECK((sys.rhs() - rhs).norm() < 1e-15);

  const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
  CHECK(sys.kappa() == doctest::Approx(sv(0) / sv(4)).epsilon(1e-10));
  CHECK(sys.zeta() == doctest::Approx(measure_zeta(M)).epsilon(1e-12));
  CHECK(sys.frobenius_norm() == doctest::Approx(M.norm()));
  CHECK(sys.max_abs_row_sum() == doctest::Approx(M.cwiseAbs().rowwise().sum().maxCoeff()));
  CHECK(sys.max_abs_col_sum() == doctest::Approx(M.cwiseAbs().colwise().sum().maxCoeff()));
}

TEST_CASE("rhs blocks vanish where expected") {
  Rng rng(1);
  const auto c = random_cones(rng, 3, 5);
  const auto rs = random_socp(rng, c, std::max<Index>(1, c->n() / 2));
  const Index m = rs.inst.m(), n = rs.inst.n();
  const auto y = rng.normal_vector(m);
  // Dual feasible by construction; x0 primal feasible.
  const BlockVector s = t_apply(inverse(rs.x0), BlockVector::identity(c)) * 0.7;
  Eigen::VectorXd cvec = rs.inst.A().transpose() * y + s.values();
  const SocpInstance inst(rs.inst.A(), rs.inst.b(), BlockVector(c, cvec));
  const Iterate it = Iterate::make(rs.x0, y, s);
  // On the central path (T_x s = 0.7 e), so sigma -> 1 zeroes the last block.
  const auto sys = NewtonSystem::assemble(inst, it, 1.0 - 1e-15, SpectrumMethod::none);
  CHECK(sys.rhs().head(m).norm() < 1e-10 * (1 + inst.b().norm()));
  CHECK(sys.rhs().segment(m, n).norm() < 1e-10 * (1 + cvec.norm()));
  CHECK(sys.rhs().tail(n).norm() < 1e-10);
  CHECK_THROWS_AS(NewtonSystem::assemble(inst, it, 1.0), Error);
  CHECK_THROWS_AS(NewtonSystem::assemble(inst, it, 0.0), Error);
}

TEST_CASE("exact solves") {
  const auto st = newton_oracle(30, 12);
  INFO((st.checks.first_failures.empty() ? "" : st.checks.first_failures.front()));
  CHECK(st.checks.failures == 0);

  Rng rng(2);
  const auto c = random_cones(rng, 3, 6);
  const auto rs = random_socp(rng, c, std::max<Index>(1, c->n() / 3));
  const Iterate it = Iterate::make(random_interior(rng, c), rng.normal_vector(rs.inst.m()),
                                   random_interior(rng, c));
  const auto sys = NewtonSystem::assemble(rs.inst, it, 0.9, SpectrumMethod::none);
  const auto rep = solve_exact(sys);
  CHECK(rep.exact);
  CHECK(rep.injected_error == 0.0);
  const Eigen::MatrixXd M = sys.dense();
  const auto sol = rep.solution.stacked();
  CHECK(rep.residual_norm <= 1e-8 * (M.norm() * sol.norm() + sys.rhs().norm()));
  CHECK((M * sol - sys.rhs()).norm() == doctest::Approx(rep.residual_norm).epsilon(1e-3));
  // M^{-1} and M^{-T} through the reduced factorization.
  const auto v = rng.normal_vector(sys.dim());
  CHECK(rel_diff(M * sys.solve(v), v) < 1e-10);
  CHECK(rel_diff(M.transpose() * sys.solve_transpose(v), v) < 1e-10);
  CHECK(rel_diff(sys.apply(v), M * v) < 1e-14);
  CHECK(rel_diff(sys.apply_transpose(v), M.transpose() * v) < 1e-14);
}

TEST_CASE("zero right-hand side gives the zero step") {
  // A feasible central point with sigma -> 1 has rhs ~ 0; scale instead:
  // the solve is linear, so M^{-1} 0 = 0 exactly.
  Rng rng(4);
  const auto c = random_cones(rng, 3, 4);
  const auto rs = random_socp(rng, c, 1);
  const Iterate it = Iterate::make(random_interior(rng, c), Eigen::VectorXd::Zero(1),
                                   random_interior(rng, c));
  const auto sys = NewtonSystem::assemble(rs.inst, it, 0.5, SpectrumMethod::none);
  CHECK(sys.solve(Eigen::VectorXd::Zero(sys.dim())).norm() == 0.0);
}

TEST_CASE("noise injection") {
  Rng rng(9);
  const auto c = random_cones(rng, 3, 5);
  const auto rs = random_socp(rng, c, 2);
  const Iterate it = Iterate::make(random_interior(rng, c), rng.normal_vector(2),
                                   random_interior(rng, c));
  const auto sys = NewtonSystem::assemble(rs.inst, it, 0.8, SpectrumMethod::none);
  const auto exact = solve_exact(sys).solution.stacked();

  SUBCASE("zero target is the exact solve") {
    const auto rep = solve_inexact(sys, 0.0, 5);
    CHECK((rep.solution.stacked() - exact).norm() == 0.0);
    CHECK(rep.injected_error == 0.0);
  }
  SUBCASE("norm and determinism") {
    const auto a = solve_inexact(sys, 1e-3, 77).solution.stacked();
    const auto b = solve_inexact(sys, 1e-3, 77).solution.stacked();
    const auto d = solve_inexact(sys, 1e-3, 78).solution.stacked();
    CHECK((a - b).norm() == 0.0);
    CHECK((a - d).norm() > 0.0);
    CHECK(std::abs((a - exact).norm() - 0.9e-3) < 1e-12);
  }
  SUBCASE("isotropy over 1000 draws") {
    const Index dim = 12;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    double worst_norm_err = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const auto v = tomography_noise(dim, 2.0, static_cast<std::uint64_t>(k));
      worst_norm_err = std::max(worst_norm_err, std::abs(v.norm() - 2.0));
      mean += v;
    }
    mean /= 1000.0;
    CHECK(worst_norm_err < 1e-14);
    // Each coordinate has variance 4 / dim; the mean over 1000 draws has
    // standard error sqrt(4 / dim / 1000).
    const double se = std::sqrt(4.0 / dim / 1000.0);
    CHECK(mean.cwiseAbs().maxCoeff() <= 3.5 * se);
  }
  CHECK_THROWS_AS(solve_inexact(sys, -1.0, 0), Error);
}

TEST_CASE("kappa and zeta on plain matrices") {
  CHECK(measure_kappa(Eigen::MatrixXd::Identity(4, 4)) == doctest::Approx(1.0));
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 10;
  D(1, 1) = 1;
  CHECK(measure_kappa(D) == doctest::Approx(10.0));
  CHECK(std::isinf(measure_kappa(Eigen::MatrixXd::Zero(3, 3))));
  CHECK(measure_zeta(Eigen::MatrixXd::Identity(5, 5)) == doctest::Approx(1.0));
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(3, 3);
  U(0, 0) = 1;  // u u^T, u = e_1
  CHECK(measure_zeta(U) == doctest::Approx(1.0));
  CHECK_THROWS_AS(measure_zeta(Eigen::MatrixXd::Zero(2, 2)), Error);

  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    const Index n = rng.integer(2, 12);
    const Eigen::MatrixXd M = rng.normal_matrix(n, n);
    const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(sym(M)).singularValues();
    CHECK(measure_kappa(M) == doctest::Approx(sv(0) / sv(2 * n - 1)).epsilon(1e-8));
    const double z = measure_zeta(M);
    const Eigen::MatrixXd S = sym(M);
    const double s1 = S.cwiseAbs().rowwise().sum().maxCoeff();
    CHECK(z == doctest::Approx(std::min(S.norm(), s1) / sv(0)).epsilon(1e-10));
    CHECK(z <= std::sqrt(2.0 * n) + 1e-12);
  }
}

TEST_CASE("spectrum of Newton matrices against a dense SVD") {
  Rng rng(8);
  for (int k = 0; k < 10; ++k) {
    const auto c = random_cones(rng, 4, 10);
    const auto rs = random_socp(rng, c, std::max<Index>(1, c->n() / 2));
    const Iterate it = Iterate::make(random_interior(rng, c, 0.3),
                                     rng.normal_vector(rs.inst.m()),
                                     random_interior(rng, c, 0.3));
    const auto dense = NewtonSystem::assemble(rs.inst, it, 0.9, SpectrumMethod::dense);
    const auto iter = NewtonSystem::assemble(rs.inst, it, 0.9, SpectrumMethod::iterative);
    const Eigen::MatrixXd M = dense.dense();
    const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
    const double kappa = sv(0) / sv(sv.size() - 1);
    CHECK(dense.kappa() == doctest::Approx(kappa).epsilon(1e-8));
    CHECK(iter.kappa() == doctest::Approx(kappa).epsilon(1e-5));
    CHECK(dense.zeta() == doctest::Approx(measure_zeta(M)).epsilon(1e-10));
    CHECK(iter.zeta() == doctest::Approx(measure_zeta(M)).epsilon(1e-5));
    CHECK(dense.zeta() <= std::sqrt(2.0 * M.rows()));
    CHECK_FALSE(dense.singular());
  }
}
