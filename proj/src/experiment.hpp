#pragma once

// Scaling experiment: sweeps over random SVM instances, a CSV log with one
// row per run, power-law fits and a plain-text report.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "socp.hpp"

namespace qipm {

struct RunRecord {
  Index n = 0;
  Index m = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  bool converged = false;
  long long iterations = 0;  // of the tomography-mode run
  double kappa_max = 0.0;
  double zeta_max = 0.0;
  double delta_min = 0.0;
  double cost_metric = 0.0;
  double acc_train_exact = 0.0;
  double acc_train_noisy = 0.0;
  double acc_test_exact = 0.0;
  double acc_test_noisy = 0.0;
  double wall_time_s = 0.0;
};

inline constexpr const char* kCsvHeader =
    "n,m,p,seed,converged,iterations,kappa_max,zeta_max,delta_min,cost_metric,"
    "acc_train_exact,acc_train_noisy,acc_test_exact,acc_test_noisy,wall_time_s";

/// {0, 0.1, ..., 1}.
std::vector<double> default_p_grid();

struct SweepConfig {
  Index n_min = 4;  // n runs over the powers of two in [n_min, n_max]
  Index n_max = 128;
  int per_cell = 10;
  std::vector<double> p_grid = default_p_grid();
  double epsilon = 0.1;
  double C = 1.0;
  std::uint64_t seed = 0;
  /// 0: QIPM_WORKERS if set, else the hardware concurrency.
  int workers = 0;
  /// Off gives byte-identical CSVs across repeats (wall_time_s is then 0).
  bool record_wall_time = true;
  /// Called after each finished run with (done, total); serialized.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// One SVM(n, 2n, p) instance, solved in tomography and in exact mode.
/// Failures are recorded as converged = false, never thrown.
RunRecord run_instance(Index n, double p, std::uint64_t seed,
                       const SweepConfig& cfg);

/// Seeds are derive_seed({master, n, p index, instance}). The result is
/// ordered by (n, p, seed).
std::vector<RunRecord> sweep(const SweepConfig& cfg);

int resolve_workers(int requested);

void write_csv(const std::vector<RunRecord>& records, std::ostream& out);
std::vector<RunRecord> read_csv(std::istream& in);

/// Numeric CSV column by name; throws invalid_argument for unknown names.
double column_value(const RunRecord& r, const std::string& column);

struct PowerLawFit {
  double a = 0.0;
  double b = 0.0;
  double ci_low = 0.0;  // 95% interval for b
  double ci_high = 0.0;
  Index n_points = 0;
};

/// Least squares on (ln x, ln y) with a Student-t interval on the slope.
/// Needs >= 3 positive points and at least two distinct x.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& pts);

/// Converged runs with finite positive x and y.
PowerLawFit fit_records(const std::vector<RunRecord>& records,
                        const std::string& x_column,
                        const std::string& y_column);

/// "exponent b=<val> ci95=[<lo>,<hi>] n=<points>"
std::string format_fit(const PowerLawFit& fit);

struct CdfRow {
  double threshold = 0.0;
  double train = 0.0;  // fraction of runs with noisy - exact <= threshold
  double test = 0.0;
};

/// Empirical CDF of the noisy minus exact accuracy over runs with finite
/// accuracies, at every multiple of 0.01 from one step below the smallest
/// difference up to the largest.
std::vector<CdfRow> accuracy_cdf(const std::vector<RunRecord>& records);

/// Fraction of runs with finite accuracies whose noisy and exact accuracies
/// differ by at most `tol` on both the train and the test set.
double agreement_fraction(const std::vector<RunRecord>& records, double tol);

std::string report(const std::vector<RunRecord>& records);

}  // namespace qipm
