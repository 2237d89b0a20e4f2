#include "experiment.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "error.hpp"
#include "io.hpp"
#include "ipm.hpp"
#include "seeds.hpp"
#include "svm.hpp"

namespace qipm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<Index> powers_of_two(Index lo, Index hi) {
  std::vector<Index> out;
  for (Index n = 1; n <= hi; n *= 2) {
    if (n >= lo) out.push_back(n);
  }
  return out;
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return format_double(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  if (!std::isfinite(v)) return format_double(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

bool finite_accuracies(const RunRecord& r) {
  return std::isfinite(r.acc_train_exact) && std::isfinite(r.acc_train_noisy) &&
         std::isfinite(r.acc_test_exact) && std::isfinite(r.acc_test_noisy);
}

// Accuracy differences are multiples of 1 / points; the slack keeps exact
// hits on a grid value from falling either side by rounding.
constexpr double kGridSlack = 1e-12;

}  // namespace

std::vector<double> default_p_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
  return g;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QIPM_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunRecord run_instance(Index n, double p, std::uint64_t seed,
                       const SweepConfig& cfg) {
  RunRecord r;
  r.n = n;
  r.m = 2 * n;
  r.p = p;
  r.seed = seed;
  r.kappa_max = r.zeta_max = r.delta_min = r.cost_metric = kNaN;
  r.acc_train_exact = r.acc_train_noisy = kNaN;
  r.acc_test_exact = r.acc_test_noisy = kNaN;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const GeneratedSvm data = generate_svm(n, 2 * n, p, seed);
    const SocpInstance inst = to_socp(data.train, cfg.C);

    IpmConfig noisy;
    noisy.epsilon = cfg.epsilon;
    noisy.noise_mode = NoiseMode::tomography;
    noisy.seed = derive_seed({seed, 1});
    const SolveTrace tn = run(inst, noisy);

    IpmConfig exact;
    exact.epsilon = cfg.epsilon;
    const SolveTrace te = run(inst, exact);

    r.iterations = static_cast<long long>(tn.records.size());
    double kappa = -1.0, zeta = -1.0;
    double delta = std::numeric_limits<double>::infinity();
    for (const auto& rec : tn.records) {
      if (!std::isnan(rec.kappa_i)) kappa = std::max(kappa, rec.kappa_i);
      if (!std::isnan(rec.zeta_i)) zeta = std::max(zeta, rec.zeta_i);
      delta = std::min(delta, rec.delta_i);
    }
    if (kappa >= 0.0) r.kappa_max = kappa;
    if (zeta >= 0.0) r.zeta_max = zeta;
    if (!tn.records.empty()) {
      r.delta_min = delta;
      r.cost_metric = cost_metric(tn, inst);
    }

    const Classifier ce = extract_classifier(inst, te.final_iterate);
    const Classifier cn = extract_classifier(inst, tn.final_iterate);
    r.acc_train_exact = accuracy(ce, data.train);
    r.acc_train_noisy = accuracy(cn, data.train);
    if (data.test.points() > 0) {
      r.acc_test_exact = accuracy(ce, data.test);
      r.acc_test_noisy = accuracy(cn, data.test);
    }
    r.converged = tn.converged && te.converged && std::isfinite(r.cost_metric) &&
                  r.cost_metric > 0.0;
  } catch (const std::exception&) {
    r.converged = false;
  }
  if (cfg.record_wall_time) {
    r.wall_time_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  }
  return r;
}

std::vector<RunRecord> sweep(const SweepConfig& cfg) {
  if (cfg.n_min < 2 || cfg.n_max < cfg.n_min) {
    throw Error(Errc::invalid_argument, "need 2 <= n_min <= n_max");
  }
  if (cfg.per_cell < 1) throw Error(Errc::invalid_argument, "per_cell must be >= 1");
  if (!(cfg.epsilon > 0.0)) throw Error(Errc::invalid_argument, "epsilon must be > 0");
  if (!(cfg.C > 0.0)) throw Error(Errc::invalid_argument, "C must be > 0");
  if (cfg.p_grid.empty()) throw Error(Errc::invalid_argument, "empty p grid");
  for (double p : cfg.p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(Errc::invalid_argument, "p values must lie in [0, 1]");
    }
  }
  const auto sizes = powers_of_two(cfg.n_min, cfg.n_max);
  if (sizes.empty()) {
    throw Error(Errc::invalid_argument, "no power of two in [n_min, n_max]");
  }

  struct Job {
    Index n;
    double p;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Index n : sizes) {
    for (size_t pi = 0; pi < cfg.p_grid.size(); ++pi) {
      for (int k = 0; k < cfg.per_cell; ++k) {
        jobs.push_back({n, cfg.p_grid[pi],
                        derive_seed({cfg.seed, static_cast<std::uint64_t>(n),
                                     pi, static_cast<std::uint64_t>(k)})});
      }
    }
  }

  std::vector<RunRecord> out(jobs.size());
  std::atomic<size_t> next{0};
  size_t done = 0;
  std::mutex progress_mutex;
  auto worker = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      out[i] = run_instance(jobs[i].n, jobs[i].p, jobs[i].seed, cfg);
      if (cfg.progress) {
        std::lock_guard lock(progress_mutex);
        cfg.progress(++done, jobs.size());
      }
    }
  };
  const int workers =
      std::min<int>(resolve_workers(cfg.workers), static_cast<int>(jobs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::stable_sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.p != b.p) return a.p < b.p;
    return a.seed < b.seed;
  });
  return out;
}

void write_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.n << ',' << r.m << ',' << format_double(r.p) << ',' << r.seed << ','
        << (r.converged ? 1 : 0) << ',' << r.iterations;
    for (double v : {r.kappa_max, r.zeta_max, r.delta_min, r.cost_metric,
                     r.acc_train_exact, r.acc_train_noisy, r.acc_test_exact,
                     r.acc_test_noisy, r.wall_time_s}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
}

namespace {

template <typename T>
T parse_field(const std::string& s, int line) {
  T v{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  // from_chars rejects a leading '+', and parses "nan"/"inf" for doubles.
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw Error(Errc::parse_error, "line " + std::to_string(line) +
                                       ": bad value '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<RunRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::parse_error, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw Error(Errc::parse_error, "unexpected CSV header");
  std::vector<RunRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 15) {
      throw Error(Errc::parse_error,
                  "line " + std::to_string(lineno) + ": expected 15 fields");
    }
    RunRecord r;
    r.n = parse_field<Index>(f[0], lineno);
    r.m = parse_field<Index>(f[1], lineno);
    r.p = parse_field<double>(f[2], lineno);
    r.seed = parse_field<std::uint64_t>(f[3], lineno);
    const int conv = parse_field<int>(f[4], lineno);
    if (conv != 0 && conv != 1) {
      throw Error(Errc::parse_error,
                  "line " + std::to_string(lineno) + ": converged must be 0 or 1");
    }
    r.converged = conv == 1;
    r.iterations = parse_field<long long>(f[5], lineno);
    double* dst[] = {&r.kappa_max,       &r.zeta_max,        &r.delta_min,
                     &r.cost_metric,     &r.acc_train_exact, &r.acc_train_noisy,
                     &r.acc_test_exact,  &r.acc_test_noisy,  &r.wall_time_s};
    for (int k = 0; k < 9; ++k) *dst[k] = parse_field<double>(f[6 + k], lineno);
    out.push_back(r);
  }
  return out;
}

double column_value(const RunRecord& r, const std::string& c) {
  if (c == "n") return static_cast<double>(r.n);
  if (c == "m") return static_cast<double>(r.m);
  if (c == "p") return r.p;
  if (c == "iterations") return static_cast<double>(r.iterations);
  if (c == "kappa_max") return r.kappa_max;
  if (c == "zeta_max") return r.zeta_max;
  if (c == "delta_min") return r.delta_min;
  if (c == "cost_metric") return r.cost_metric;
  if (c == "acc_train_exact") return r.acc_train_exact;
  if (c == "acc_train_noisy") return r.acc_train_noisy;
  if (c == "acc_test_exact") return r.acc_test_exact;
  if (c == "acc_test_noisy") return r.acc_test_noisy;
  if (c == "wall_time_s") return r.wall_time_s;
  throw Error(Errc::invalid_argument, "unknown numeric column " + c);
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 3) {
    throw Error(Errc::invalid_argument, "power-law fit needs at least 3 points");
  }
  const double N = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    if (!(x > 0.0 && y > 0.0 && std::isfinite(x) && std::isfinite(y))) {
      throw Error(Errc::domain_error, "power-law fit needs finite positive points");
    }
    mx += std::log(x);
    my += std::log(y);
  }
  mx /= N;
  my /= N;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (!(sxx > 0.0)) {
    throw Error(Errc::domain_error, "power-law fit needs distinct x values");
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (const auto& [x, y] : pts) {
    const double e = std::log(y) - (intercept + slope * std::log(x));
    ssr += e * e;
  }
  const double dof = N - 2.0;
  const double se = std::sqrt(ssr / dof / sxx);
  const boost::math::students_t dist(dof);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  PowerLawFit fit;
  fit.a = std::exp(intercept);
  fit.b = slope;
  fit.ci_low = slope - t * se;
  fit.ci_high = slope + t * se;
  fit.n_points = static_cast<Index>(pts.size());
  return fit;
}

PowerLawFit fit_records(const std::vector<RunRecord>& records,
                        const std::string& x_column,
                        const std::string& y_column) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records) {
    const double x = column_value(r, x_column);
    const double y = column_value(r, y_column);
    if (r.converged && std::isfinite(x) && std::isfinite(y) && x > 0.0 && y > 0.0) {
      pts.emplace_back(x, y);
    }
  }
  return fit_power_law(pts);
}

std::string format_fit(const PowerLawFit& fit) {
  return "exponent b=" + fixed(fit.b, 3) + " ci95=[" + fixed(fit.ci_low, 3) +
         "," + fixed(fit.ci_high, 3) + "] n=" + std::to_string(fit.n_points);
}

std::vector<CdfRow> accuracy_cdf(const std::vector<RunRecord>& records) {
  std::vector<double> dtrain, dtest;
  for (const auto& r : records) {
    if (!finite_accuracies(r)) continue;
    dtrain.push_back(r.acc_train_noisy - r.acc_train_exact);
    dtest.push_back(r.acc_test_noisy - r.acc_test_exact);
  }
  if (dtrain.empty()) return {};
  double lo = 0.0, hi = 0.0;
  for (const auto* v : {&dtrain, &dtest}) {
    lo = std::min(lo, *std::min_element(v->begin(), v->end()));
    hi = std::max(hi, *std::max_element(v->begin(), v->end()));
  }
  const long k_lo = std::lround(std::floor(lo * 100.0 + kGridSlack)) - 1;
  const long k_hi = std::lround(std::ceil(hi * 100.0 - kGridSlack));
  auto fraction = [](const std::vector<double>& v, double t) {
    const auto count = std::count_if(v.begin(), v.end(), [&](double d) {
      return d <= t + kGridSlack;
    });
    return static_cast<double>(count) / static_cast<double>(v.size());
  };
  std::vector<CdfRow> rows;
  for (long k = k_lo; k <= k_hi; ++k) {
    const double t = static_cast<double>(k) / 100.0;
    rows.push_back({t, fraction(dtrain, t), fraction(dtest, t)});
  }
  return rows;
}

double agreement_fraction(const std::vector<RunRecord>& records, double tol) {
  std::size_t total = 0, within = 0;
  for (const auto& r : records) {
    if (!finite_accuracies(r)) continue;
    ++total;
    if (std::abs(r.acc_train_noisy - r.acc_train_exact) <= tol + kGridSlack &&
        std::abs(r.acc_test_noisy - r.acc_test_exact) <= tol + kGridSlack) {
      ++within;
    }
  }
  if (total == 0) return kNaN;
  return static_cast<double>(within) / static_cast<double>(total);
}

std::string report(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  std::size_t converged = 0;
  for (const auto& r : records) converged += r.converged ? 1 : 0;

  out << "# Scaling report\n\n";
  out << "runs: " << records.size() << ", converged: " << converged << "\n\n";

  out << "## Fitted exponents (y = a n^b, least squares on logs)\n\n";
  if (records.empty()) {
    out << "no data\n";
  } else {
    for (const char* y : {"cost_metric", "kappa_max", "zeta_max", "delta_min",
                          "iterations"}) {
      out << y << " vs n: ";
      try {
        out << format_fit(fit_records(records, "n", y)) << '\n';
      } catch (const Error& e) {
        out << "no data (" << e.what() << ")\n";
      }
    }
  }
  out << "\nReference exponents of cost vs n from the full-scale study"
         " (context only, not expected at this scale):\n";
  out << "  this algorithm: exponent b=2.591 ci95=[2.564,2.619]\n";
  out << "  ECOS:           exponent b=3.314 ci95=[3.297,3.330]\n";
  out << "  LIBSVM:         exponent b=3.112 ci95=[2.799,3.425]\n";

  out << "\n## Accuracy difference CDF (noisy - exact)\n\n";
  const auto cdf = accuracy_cdf(records);
  if (cdf.empty()) {
    out << "no data\n";
  } else {
    out << "runs with |difference| <= 0.05 on train and test: "
        << fixed(100.0 * agreement_fraction(records, 0.05), 1) << "%\n\n";
    out << "threshold,train,test\n";
    for (const auto& row : cdf) {
      out << fixed(row.threshold, 2) << ',' << fixed(row.train, 4) << ','
          << fixed(row.test, 4) << '\n';
    }
  }

  out << "\n## Per-n medians over converged runs\n\n";
  std::map<Index, std::vector<const RunRecord*>> by_n;
  for (const auto& r : records) {
    if (r.converged) by_n[r.n].push_back(&r);
  }
  if (by_n.empty()) {
    out << "no data\n";
  } else {
    out << "n,runs,kappa_max,zeta_max,delta_min,iterations,cost_metric\n";
    for (const auto& [n, rs] : by_n) {
      auto med = [&](auto get) {
        std::vector<double> v;
        for (const RunRecord* r : rs) v.push_back(get(*r));
        return median(std::move(v));
      };
      out << n << ',' << rs.size() << ','
          << general(med([](const RunRecord& r) { return r.kappa_max; })) << ','
          << general(med([](const RunRecord& r) { return r.zeta_max; })) << ','
          << general(med([](const RunRecord& r) { return r.delta_min; })) << ','
          << general(med([](const RunRecord& r) {
               return static_cast<double>(r.iterations);
             })) << ','
          << general(med([](const RunRecord& r) { return r.cost_metric; }))
          << '\n';
    }
  }
  return out.str();
}

}  // namespace qipm
