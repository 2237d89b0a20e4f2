#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "properties.hpp"
#include "socp.hpp"

using namespace qipm;
using namespace qipm::testing;

TEST_CASE("duality gap") {
  const auto c = make_cones({3, 1, 2});
  const auto e = BlockVector::identity(c);
  CHECK(duality_gap(e, e) == doctest::Approx(1.0));
  CHECK(duality_gap(e * 2.0, e * 3.0) == doctest::Approx(6.0));
  CHECK_THROWS_AS(duality_gap(e, BlockVector::identity(make_cones({3, 3}))), Error);
}

TEST_CASE("central path distance") {
  const auto c = make_cones({2});
  const auto e = BlockVector::identity(c);
  CHECK(central_path_distance(e, e * 0.7, 0.7) == doctest::Approx(0.0));
  CHECK_THROWS_AS(central_path_distance(BlockVector(c, Eigen::Vector2d(1, 2)), e, 1.0),
                  Error);
  CHECK_THROWS_AS(central_path_distance(e, e, 0.0), Error);
}

TEST_CASE("neighborhood membership") {
  const double eta = 0.1;
  const auto c = make_cones({2});
  const auto e = BlockVector::identity(c);
  SUBCASE("central path point") {
    const auto it = Iterate::make(e * 3.0, Eigen::VectorXd(), e);
    CHECK(in_neighborhood(it, 1e-9));
  }
  SUBCASE("s = (1 + 2 eta) e") {
    // T_e s = s = mu e exactly, so the distance is zero.
    const auto it = Iterate::make(e, Eigen::VectorXd(), e * (1 + 2 * eta));
    CHECK(it.mu == doctest::Approx(1 + 2 * eta));
    CHECK(it.d == doctest::Approx(0.0));
    CHECK(in_neighborhood(it, eta));
  }
  SUBCASE("off-center dual") {
    // s = (1; 0.1): mu = 1, T_e s - e = (0; 0.1), ||.||_F = sqrt(2) 0.1.
    const auto it = Iterate::make(e, Eigen::VectorXd(),
                                  BlockVector(c, Eigen::Vector2d(1, 0.1)));
    CHECK(it.d == doctest::Approx(std::sqrt(2.0) * 0.1));
    CHECK(in_neighborhood(it, 0.15));
    CHECK_FALSE(in_neighborhood(it, 0.14));
  }
  SUBCASE("s outside the cone") {
    const auto it = Iterate::make(e, Eigen::VectorXd(),
                                  BlockVector(c, Eigen::Vector2d(0, 1)));
    CHECK_FALSE(in_neighborhood(it, 1e6));
  }
}

TEST_CASE("instance validation") {
  const auto c = make_cones({3});
  const BlockVector cost(c, Eigen::Vector3d(1, 0, 0));
  Eigen::MatrixXd A(2, 3);
  A << 1, 0, 0, 2, 0, 0;
  CHECK_THROWS_AS(SocpInstance(A, Eigen::Vector2d(1, 2), cost), Error);
  try {
    SocpInstance(A, Eigen::Vector2d(1, 2), cost);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::rank_deficient);
  }
  CHECK_THROWS_AS(SocpInstance(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 2), cost),
                  Error);
  CHECK_THROWS_AS(SocpInstance(Eigen::MatrixXd::Identity(2, 3), Eigen::Vector3d(1, 2, 3), cost),
                  Error);
  const SocpInstance ok(Eigen::MatrixXd::Identity(2, 3), Eigen::Vector2d(1, 2), cost);
  CHECK(ok.a_norm() == doctest::Approx(1.0));
}

TEST_CASE("linear residuals are linear") {
  Rng rng(5);
  const auto c = random_cones(rng, 4, 6);
  const auto rs = random_socp(rng, c, std::max<Index>(1, c->n() / 2));
  const Index m = rs.inst.m();
  const auto y = rng.normal_vector(m);
  const BlockVector s = rs.inst.c() - BlockVector(c, rs.inst.A().transpose() * y);
  const auto base = linear_residuals(rs.inst, Iterate::make(rs.x0, y, s));
  CHECK(base.primal < 1e-12 * (1 + rs.inst.b().norm()));
  CHECK(base.dual < 1e-12 * (1 + rs.inst.c().norm()));
  const auto v = random_vector(rng, c);
  const auto pert = linear_residuals(rs.inst, Iterate::make(rs.x0 + v, y, s));
  CHECK(pert.primal == doctest::Approx((rs.inst.A() * v.values()).norm()).epsilon(1e-10));
  const auto w = rng.normal_vector(m);
  const auto dual = linear_residuals(rs.inst, Iterate::make(rs.x0, y + w, s));
  CHECK(dual.dual ==
        doctest::Approx((rs.inst.A().transpose() * w).norm()).epsilon(1e-10));
}

TEST_CASE("scaling to the frame") {
  const auto c = make_cones({3, 1});
  const auto e = BlockVector::identity(c);
  const auto sp = scale_to_frame(e, e, 1.0);
  CHECK(rel_diff(sp.s_hat.values(), e.values()) < 1e-15);
  CHECK(rel_diff(sp.x_hat.values(), e.values()) < 1e-15);
}

TEST_CASE("central path properties on random pairs") {
  const auto r = central_path_properties(21, 200);
  INFO((r.first_failures.empty() ? "" : r.first_failures.front()));
  CHECK(r.failures == 0);
}
