// qipm command line: gen, solve, sweep, fit, report.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qipm/qipm.h"

namespace {

int report_error(qipm_status s) {
  std::fprintf(stderr, "error (%s): %s\n", qipm_status_name(s), qipm_last_error());
  return 1;
}

void print_progress(size_t done, size_t total, void*) {
  std::fprintf(stderr, "\r%zu/%zu runs", done, total);
  if (done == total) std::fputc('\n', stderr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interior-point SOCP solver with simulated tomography noise"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qipm_version());

  auto* gen = app.add_subcommand("gen", "Write a random SVM dataset");
  int64_t gen_n = 0, gen_m = 0;
  double gen_p = 0.0;
  uint64_t gen_seed = 0;
  std::string gen_out, gen_test_out;
  gen->add_option("--n", gen_n, "Features")->required()->check(CLI::Range(2, 1 << 20));
  gen->add_option("--m", gen_m, "Training points")->required()->check(CLI::Range(2, 1 << 24));
  gen->add_option("--p", gen_p, "Label flip probability")->required()->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", gen_seed, "Seed")->required();
  gen->add_option("--out", gen_out, "Training set file")->required();
  gen->add_option("--test-out", gen_test_out, "Also write the test set here");

  auto* solve = app.add_subcommand("solve", "Solve an SOCP instance or SVM dataset");
  std::string solve_in, solve_mode = "exact", solve_trace;
  qipm_solve_options sopts;
  qipm_solve_options_default(&sopts);
  bool solve_verify = false;
  solve->add_option("--instance", solve_in, "Instance or dataset file")->required();
  solve->add_option("--mode", solve_mode, "exact or tomography")
      ->check(CLI::IsMember({"exact", "tomography"}));
  solve->add_option("--epsilon", sopts.epsilon, "Target duality gap")
      ->check(CLI::PositiveNumber);
  solve->add_option("--seed", sopts.seed, "Noise seed");
  solve->add_option("--max-iterations", sopts.max_iterations,
                    "Iteration cap (0: from the iteration bound)")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--trace", solve_trace, "Per-iteration CSV");
  solve->add_flag("--verify", solve_verify, "Fail on the first broken invariant");

  auto* sw = app.add_subcommand("sweep", "Run the scaling experiment");
  qipm_sweep_options wopts;
  qipm_sweep_options_default(&wopts);
  std::string sweep_out;
  std::vector<double> p_grid;
  bool no_timing = false, quiet = false;
  sw->add_option("--n-min", wopts.n_min, "Smallest n")->required();
  sw->add_option("--n-max", wopts.n_max, "Largest n")->required();
  sw->add_option("--per-cell", wopts.per_cell, "Instances per (n, p)")->required();
  sw->add_option("--epsilon", wopts.epsilon, "Target duality gap")
      ->check(CLI::PositiveNumber);
  sw->add_option("--C", wopts.C, "SVM penalty")->check(CLI::PositiveNumber);
  sw->add_option("--seed", wopts.seed, "Master seed")->required();
  sw->add_option("--workers", wopts.workers, "Worker threads (default QIPM_WORKERS)")
      ->check(CLI::NonNegativeNumber);
  sw->add_option("--p", p_grid, "Flip probabilities (default 0, 0.1, ..., 1)")
      ->check(CLI::Range(0.0, 1.0));
  sw->add_option("--out", sweep_out, "CSV output")->required();
  sw->add_flag("--no-timing", no_timing, "Write 0 wall times for reproducible CSVs");
  sw->add_flag("--quiet", quiet, "No progress output");

  auto* fit = app.add_subcommand("fit", "Fit y = a x^b to sweep results");
  std::string fit_in, fit_x = "n", fit_y = "cost_metric";
  fit->add_option("--in", fit_in, "Sweep CSV")->required();
  fit->add_option("--x", fit_x, "x column");
  fit->add_option("--y", fit_y, "y column");

  auto* rep = app.add_subcommand("report", "Write a summary of sweep results");
  std::string rep_in, rep_out;
  rep->add_option("--in", rep_in, "Sweep CSV")->required();
  rep->add_option("--out", rep_out, "Report file")->required();

  CLI11_PARSE(app, argc, argv);

  if (*gen) {
    qipm_dataset* train = nullptr;
    qipm_dataset* test = nullptr;
    qipm_status s = qipm_dataset_generate(gen_n, gen_m, gen_p, gen_seed, &train,
                                          gen_test_out.empty() ? nullptr : &test);
    if (s == QIPM_OK) s = qipm_dataset_save(train, gen_out.c_str());
    if (s == QIPM_OK && test) s = qipm_dataset_save(test, gen_test_out.c_str());
    qipm_dataset_free(train);
    qipm_dataset_free(test);
    return s == QIPM_OK ? 0 : report_error(s);
  }

  if (*solve) {
    qipm_instance* inst = nullptr;
    qipm_status s = qipm_instance_load(solve_in.c_str(), &inst);
    if (s != QIPM_OK) return report_error(s);
    sopts.tomography = solve_mode == "tomography" ? 1 : 0;
    sopts.verification = solve_verify ? 1 : 0;
    qipm_trace* trace = nullptr;
    s = qipm_solve(inst, &sopts, &trace);
    if (s != QIPM_OK) {
      qipm_instance_free(inst);
      return report_error(s);
    }
    qipm_trace_summary sum;
    s = qipm_trace_summary_get(trace, &sum);
    if (s == QIPM_OK && !solve_trace.empty()) {
      s = qipm_trace_write_csv(trace, solve_trace.c_str());
    }
    double train_acc = NAN;
    if (s == QIPM_OK && qipm_instance_is_svm(inst)) {
      qipm_dataset* data = nullptr;
      if (qipm_dataset_load(solve_in.c_str(), &data) == QIPM_OK) {
        s = qipm_trace_accuracy(trace, data, &train_acc);
        qipm_dataset_free(data);
      }
    }
    if (s != QIPM_OK) {
      qipm_trace_free(trace);
      qipm_instance_free(inst);
      return report_error(s);
    }
    std::printf("status: %s\n", sum.termination);
    std::printf("iterations: %lld (bound %lld)\n",
                static_cast<long long>(sum.iterations),
                static_cast<long long>(sum.iteration_bound));
    std::printf("mu: %.6g (start %.6g)\n", sum.final_mu, sum.mu0);
    std::printf("primal residual: %.6g\n", sum.primal_residual);
    std::printf("dual residual: %.6g\n", sum.dual_residual);
    if (sopts.tomography) {
      std::printf("kappa max: %.6g\nzeta max: %.6g\ndelta min: %.6g\n"
                  "cost metric: %.6g\n",
                  sum.kappa_max, sum.zeta_max, sum.delta_min, sum.cost_metric);
    }
    if (!std::isnan(train_acc)) std::printf("train accuracy: %.4f\n", train_acc);
    if (sum.violation_count > 0) {
      std::printf("invariant violations: %lld\n",
                  static_cast<long long>(sum.violation_count));
    }
    qipm_trace_free(trace);
    qipm_instance_free(inst);
    return sum.converged ? 0 : 2;
  }

  if (*sw) {
    wopts.record_wall_time = no_timing ? 0 : 1;
    if (!p_grid.empty()) {
      wopts.p_grid = p_grid.data();
      wopts.p_count = p_grid.size();
    }
    const qipm_status s = qipm_sweep_run(&wopts, sweep_out.c_str(),
                                         quiet ? nullptr : print_progress, nullptr);
    return s == QIPM_OK ? 0 : report_error(s);
  }

  if (*fit) {
    qipm_power_law f;
    qipm_status s = qipm_fit_csv(fit_in.c_str(), fit_x.c_str(), fit_y.c_str(), &f);
    char line[256];
    if (s == QIPM_OK) s = qipm_format_fit(&f, line, sizeof line);
    if (s != QIPM_OK) return report_error(s);
    std::printf("%s\n", line);
    return 0;
  }

  if (*rep) {
    const qipm_status s = qipm_report_csv(rep_in.c_str(), rep_out.c_str());
    return s == QIPM_OK ? 0 : report_error(s);
  }
  return 1;
}
