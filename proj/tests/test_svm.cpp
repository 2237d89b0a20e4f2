#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "ipm.hpp"
#include "support.hpp"
#include "svm.hpp"

using namespace qipm;
using namespace qipm::testing;

namespace {

Eigen::VectorXd planted_scores(const GeneratedSvm& g, const SvmDataset& d) {
  return d.X.transpose() * g.planted.w;
}

}  // namespace

TEST_CASE("generator: labels, margins, sizes") {
  const auto g = generate_svm(5, 30, 0.0, 7);
  CHECK(g.train.features() == 5);
  CHECK(g.train.points() == 30);
  CHECK(g.test.points() == 10);
  CHECK(g.planted.w.norm() == doctest::Approx(1.0));
  CHECK(g.planted.b == 0.0);
  const Eigen::VectorXd sc = planted_scores(g, g.train);
  CHECK(sc.cwiseAbs().minCoeff() == doctest::Approx(1.0));
  for (Index i = 0; i < 30; ++i) CHECK(g.train.y[i] == (sc[i] > 0 ? 1.0 : -1.0));
  CHECK(accuracy(g.planted, g.train) == 1.0);
  CHECK(accuracy(g.planted, g.test) == 1.0);

  SUBCASE("p = 1 flips every label") {
    const auto f = generate_svm(5, 30, 1.0, 7);
    CHECK((f.train.X - g.train.X).norm() == 0.0);
    CHECK((f.train.y + g.train.y).norm() == 0.0);
    CHECK(accuracy(f.planted, f.train) == 0.0);
  }
  SUBCASE("deterministic in the seed") {
    const auto h = generate_svm(5, 30, 0.0, 7);
    CHECK((h.train.X - g.train.X).norm() == 0.0);
    CHECK((h.test.X - g.test.X).norm() == 0.0);
    CHECK((generate_svm(5, 30, 0.0, 8).train.X - g.train.X).norm() > 0.0);
  }
  CHECK_THROWS_AS(generate_svm(0, 4, 0.0, 1), Error);
  CHECK_THROWS_AS(generate_svm(3, 4, 1.5, 1), Error);
}

TEST_CASE("generator: flip rate") {
  // 4000 labels at p = 0.3; the flip count is Binomial(4000, 0.3).
  const auto g = generate_svm(3, 4000, 0.3, 19);
  const Eigen::VectorXd sc = planted_scores(g, g.train);
  double flips = 0;
  for (Index i = 0; i < 4000; ++i) flips += (sc[i] > 0) != (g.train.y[i] > 0) ? 1 : 0;
  const double sd = std::sqrt(4000 * 0.3 * 0.7);
  CHECK(std::abs(flips - 1200.0) <= 4 * sd);
}

TEST_CASE("reduction layout") {
  const auto g = generate_svm(3, 6, 0.2, 2);
  const SocpInstance inst = to_socp(g.train, 2.0);
  CHECK(inst.n() == 3 + 6 + 3);
  CHECK(inst.m() == 7);
  CHECK(inst.rank() == 7);
  CHECK(inst.cones()->size(0) == 6);
  // Last row: (t + 1) - t = 1.
  Eigen::VectorXd last = Eigen::VectorXd::Zero(inst.n());
  last[0] = 1;
  last[1] = -1;
  CHECK((inst.A().row(6).transpose() - last).norm() == 0.0);
  CHECK(inst.b()[6] == 1.0);
  // Objective t + C sum xi.
  CHECK(inst.c().values()[1] == 1.0);
  CHECK((inst.c().values().tail(6).array() == 2.0).all());
  CHECK(inst.c().values().head(1).norm() + inst.c().values().segment(2, 4).norm() == 0.0);
  // Margin rows.
  for (Index i = 0; i < 6; ++i) {
    CHECK((inst.A().row(i).segment(2, 3).transpose() - g.train.X.col(i)).norm() == 0.0);
    CHECK(inst.A()(i, 5) == 1.0);
    CHECK(inst.A()(i, 6 + i) == g.train.y[i]);
    CHECK(inst.b()[i] == g.train.y[i]);
  }

  SUBCASE("variants") {
    const SocpInstance nf = to_socp(g.train, 1.0, {false, false});
    CHECK(nf.n() == 12);
    CHECK(nf.rank() == 8);
    CHECK(nf.cones()->size(0) == 5);
    const SocpInstance sur = to_socp(g.train, 1.0, {true, true});
    CHECK(sur.n() == 18);
    CHECK(sur.rank() == 13);
    CHECK(sur.A()(0, 12) == -g.train.y[0]);
  }
}

TEST_CASE("the quadratic cone encodes 2t + 1 >= ||w||^2 + b^2") {
  Rng rng(4);
  const auto c = make_cones({5});
  int agree = 0, tried = 0;
  for (int k = 0; k < 2000; ++k) {
    const double t = rng.uniform(-1.0, 3.0);
    const Eigen::VectorXd wb = rng.normal_vector(3);
    const double slack = 2 * t + 1 - wb.squaredNorm();
    if (std::abs(slack) < 1e-6) continue;
    Eigen::VectorXd v(5);
    v << t + 1, t, wb;
    const bool inside = cone_membership(BlockVector(c, v)) == ConeRegion::interior;
    ++tried;
    agree += inside == (slack > 0 && t + 1 > 0) ? 1 : 0;
  }
  CHECK(agree == tried);
}

TEST_CASE("classifier extraction") {
  const auto g = generate_svm(4, 8, 0.0, 1);
  const SocpInstance inst = to_socp(g.train);
  const Iterate it = initial_point(inst);
  const Classifier clf = extract_classifier(inst, it);
  CHECK(clf.w.size() == 4);
  CHECK(clf.w.norm() == 0.0);
  CHECK(clf.b == 0.0);
  Eigen::VectorXd x = it.x.values();
  x.segment(2, 4) << 1, 2, 3, 4;
  x[6] = -0.5;
  const Classifier c2 = extract_classifier(inst, BlockVector(inst.cones(), x));
  CHECK(c2.w == Eigen::Vector4d(1, 2, 3, 4));
  CHECK(c2.b == -0.5);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(1, 2);
  const SocpInstance plain(A, Eigen::VectorXd::Ones(1),
                           BlockVector::identity(make_cones({2})));
  CHECK_THROWS_AS(extract_classifier(plain, BlockVector::identity(make_cones({2}))), Error);
}

TEST_CASE("accuracy") {
  Rng rng(12);
  for (int k = 0; k < 20; ++k) {
    const auto g = generate_svm(3, 17, 0.4, rng.integer(0, 1 << 30));
    Classifier clf{rng.normal_vector(3), rng.normal()};
    int correct = 0;
    for (Index i = 0; i < 17; ++i) {
      correct += g.train.y[i] * (clf.w.dot(g.train.X.col(i)) + clf.b) > 0 ? 1 : 0;
    }
    CHECK(accuracy(clf, g.train) == doctest::Approx(correct / 17.0));
    // Negating the classifier and the labels changes nothing.
    SvmDataset flipped = g.train;
    flipped.y = -flipped.y;
    CHECK(accuracy({-clf.w, -clf.b}, flipped) == accuracy(clf, g.train));
  }
  const auto g = generate_svm(2, 4, 0.0, 3);
  CHECK_THROWS_AS(accuracy({Eigen::Vector2d::Zero(), 0.0}, g.train), Error);
  CHECK_THROWS_AS(accuracy({Eigen::Vector3d::Ones(), 0.0}, g.train), Error);
}

TEST_CASE("solving separable data") {
  const auto g = generate_svm(8, 16, 0.0, 21);
  IpmConfig cfg;
  cfg.epsilon = 1e-3;
  SUBCASE("surplus variant separates the training set") {
    const SocpInstance inst = to_socp(g.train, 1.0, {true, true});
    const SolveTrace tr = run(inst, cfg);
    REQUIRE(tr.converged);
    CHECK(accuracy(extract_classifier(inst, tr.final_iterate), g.train) >= 0.99);
  }
  SUBCASE("equality form still classifies well") {
    const SocpInstance inst = to_socp(g.train);
    const SolveTrace tr = run(inst, cfg);
    REQUIRE(tr.converged);
    CHECK(accuracy(extract_classifier(inst, tr.final_iterate), g.train) >= 0.75);
  }
  SUBCASE("non-folded variant converges") {
    const SocpInstance inst = to_socp(g.train, 1.0, {false, false});
    const SolveTrace tr = run(inst, cfg);
    CHECK(tr.converged);
  }
}
