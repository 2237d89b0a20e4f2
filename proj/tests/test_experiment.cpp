#include <doctest.h>

#include <cmath>
#include <sstream>
#include <tuple>

#include "error.hpp"
#include "experiment.hpp"
#include "support.hpp"

using namespace qipm;
using namespace qipm::testing;

namespace {

SweepConfig tiny_sweep() {
  SweepConfig cfg;
  cfg.n_min = 4;
  cfg.n_max = 8;
  cfg.per_cell = 2;
  cfg.p_grid = {0.0, 0.5};
  cfg.seed = 3;
  cfg.workers = 1;
  cfg.record_wall_time = false;
  return cfg;
}

RunRecord record(Index n, double cost, double dtrain, double dtest) {
  RunRecord r;
  r.n = n;
  r.m = 2 * n;
  r.converged = true;
  r.cost_metric = cost;
  r.acc_train_exact = 0.9;
  r.acc_train_noisy = 0.9 + dtrain;
  r.acc_test_exact = 0.8;
  r.acc_test_noisy = 0.8 + dtest;
  return r;
}

}  // namespace

TEST_CASE("p grid") {
  const auto g = default_p_grid();
  REQUIRE(g.size() == 11);
  CHECK(g.front() == 0.0);
  CHECK(g[3] == doctest::Approx(0.3));
  CHECK(g.back() == 1.0);
}

TEST_CASE("single run") {
  SweepConfig cfg = tiny_sweep();
  const RunRecord r = run_instance(4, 0.2, 11, cfg);
  CHECK(r.n == 4);
  CHECK(r.m == 8);
  CHECK(r.seed == 11);
  CHECK(r.converged);
  CHECK(r.iterations > 0);
  CHECK(r.kappa_max >= 1.0);
  CHECK(r.zeta_max >= 1.0 - 1e-12);
  CHECK(r.delta_min > 0.0);
  // The metric is recomputed from its parts with the SOCP dimension 3n + 3.
  const double n = 3 * 4 + 3;
  CHECK(r.cost_metric == doctest::Approx(std::pow(n, 1.5) * r.kappa_max * r.zeta_max /
                                         (r.delta_min * r.delta_min)));
  for (double a : {r.acc_train_exact, r.acc_train_noisy, r.acc_test_exact, r.acc_test_noisy}) {
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
  }
  CHECK(r.wall_time_s == 0.0);
}

TEST_CASE("sweep is deterministic and round-trips through CSV") {
  const SweepConfig cfg = tiny_sweep();
  std::size_t calls = 0;
  SweepConfig counted = cfg;
  counted.progress = [&](std::size_t done, std::size_t total) {
    ++calls;
    CHECK(done <= total);
  };
  const auto a = sweep(counted);
  CHECK(calls == 8);
  REQUIRE(a.size() == 8);
  for (std::size_t i = 1; i < a.size(); ++i) {
    CHECK(std::tie(a[i - 1].n, a[i - 1].p, a[i - 1].seed) <= std::tie(a[i].n, a[i].p, a[i].seed));
  }
  std::ostringstream first, second;
  write_csv(a, first);
  SweepConfig two = cfg;
  two.workers = 2;
  write_csv(sweep(two), second);
  CHECK(first.str() == second.str());
  CHECK(first.str().rfind(std::string(kCsvHeader) + "\n", 0) == 0);

  std::istringstream in(first.str());
  const auto back = read_csv(in);
  std::ostringstream again;
  write_csv(back, again);
  CHECK(again.str() == first.str());
}

TEST_CASE("CSV errors") {
  std::istringstream wrong_header("n,m\n1,2\n");
  CHECK_THROWS_AS(read_csv(wrong_header), Error);
  std::istringstream short_row(std::string(kCsvHeader) + "\n4,8,0\n");
  CHECK_THROWS_AS(read_csv(short_row), Error);
  std::istringstream bad_number(std::string(kCsvHeader) +
                                "\n4,8,x,1,1,1,1,1,1,1,1,1,1,1,0\n");
  CHECK_THROWS_AS(read_csv(bad_number), Error);
  std::istringstream empty(std::string(kCsvHeader) + "\n");
  CHECK(read_csv(empty).empty());
  CHECK_THROWS_AS(column_value(RunRecord{}, "nope"), Error);
  CHECK(column_value(record(8, 2.0, 0, 0), "cost_metric") == 2.0);
  CHECK(column_value(record(8, 2.0, 0, 0), "n") == 8.0);
}

TEST_CASE("power-law fit") {
  SUBCASE("exact power law") {
    std::vector<std::pair<double, double>> pts;
    for (double x : {4.0, 8.0, 16.0, 32.0, 64.0}) pts.emplace_back(x, 3.0 * std::pow(x, 2.5));
    const auto f = fit_power_law(pts);
    CHECK(f.b == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(f.a == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(f.ci_high - f.ci_low < 1e-9);
    CHECK(f.n_points == 5);
  }
  SUBCASE("interval against a hand computation") {
    // ln-space points (0,0), (1,1), (2,3): slope 1.5, residual sd 1/sqrt(6),
    // slope se = sqrt((1/6) / 2) / 1, t(0.975, 1) = 12.7062.
    const double e = std::exp(1.0);
    const auto f = fit_power_law({{1.0, 1.0}, {e, e}, {e * e, std::exp(3.0)}});
    CHECK(f.b == doctest::Approx(1.5));
    const double se = std::sqrt(1.0 / 12.0);
    CHECK(f.ci_high - f.b == doctest::Approx(12.7062047 * se).epsilon(1e-6));
  }
  CHECK_THROWS_AS(fit_power_law({{1, 1}, {2, 2}}), Error);
  CHECK_THROWS_AS(fit_power_law({{1, 1}, {1, 2}, {1, 3}}), Error);
  CHECK_THROWS_AS(fit_power_law({{1, 1}, {2, -2}, {3, 3}}), Error);
  CHECK(format_fit(fit_power_law({{1, 1}, {2, 4}, {4, 16}})) ==
        "exponent b=2.000 ci95=[2.000,2.000] n=3");

  std::vector<RunRecord> recs = {record(4, 16, 0, 0), record(8, 64, 0, 0),
                                 record(16, 256, 0, 0), record(32, -1, 0, 0)};
  recs.push_back(record(64, 1e9, 0, 0));
  recs.back().converged = false;
  const auto f = fit_records(recs, "n", "cost_metric");
  CHECK(f.n_points == 3);
  CHECK(f.b == doctest::Approx(2.0));
}

TEST_CASE("accuracy CDF and agreement") {
  std::vector<RunRecord> recs = {record(4, 1, 0.0, 0.0), record(4, 1, -0.02, 0.01),
                                 record(8, 1, 0.03, -0.1), record(8, 1, 0.0, 0.0)};
  recs.push_back(record(8, 1, 0, 0));
  recs.back().acc_test_noisy = std::nan("");
  const auto cdf = accuracy_cdf(recs);
  REQUIRE(!cdf.empty());
  CHECK(cdf.front().threshold == doctest::Approx(-0.11));
  CHECK(cdf.front().train == 0.0);
  CHECK(cdf.front().test == 0.0);
  CHECK(cdf.back().train == 1.0);
  CHECK(cdf.back().test == 1.0);
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    CHECK(cdf[i].threshold > cdf[i - 1].threshold);
    CHECK(cdf[i].train >= cdf[i - 1].train);
    CHECK(cdf[i].test >= cdf[i - 1].test);
  }
  // Step at zero: two of four runs have both differences exactly zero.
  for (const auto& row : cdf) {
    if (std::abs(row.threshold) < 1e-9) {
      CHECK(row.train == doctest::Approx(0.75));
      CHECK(row.test == doctest::Approx(0.75));
    }
  }
  CHECK(agreement_fraction(recs, 0.05) == doctest::Approx(0.75));
  CHECK(agreement_fraction(recs, 0.2) == 1.0);
  CHECK(agreement_fraction(recs, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("report") {
  const std::string none = report({});
  CHECK(none.find("no data") != std::string::npos);
  std::vector<RunRecord> recs;
  for (Index n : {4, 8, 16, 32}) {
    for (int k = 0; k < 3; ++k) {
      RunRecord r = record(n, std::pow(n, 2.5) * (1 + 0.1 * k), 0, 0);
      r.kappa_max = n;
      r.zeta_max = 1.5;
      r.delta_min = 1.0 / n;
      r.iterations = 10 * n;
      recs.push_back(r);
    }
  }
  const std::string text = report(recs);
  CHECK(text == report(recs));
  CHECK(text.find("exponent b=2.500") != std::string::npos);
  CHECK(text.find("2.591") != std::string::npos);
  CHECK(text.find("3.314") != std::string::npos);
  CHECK(text.find("3.112") != std::string::npos);
}
