#include "qipm/qipm.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "error.hpp"
#include "experiment.hpp"
#include "io.hpp"
#include "ipm.hpp"
#include "svm.hpp"

struct qipm_dataset {
  qipm::SvmDataset data;
};

struct qipm_instance {
  std::shared_ptr<const qipm::SocpInstance> inst;
  std::optional<qipm::BlockVector> hint;
};

struct qipm_trace {
  std::shared_ptr<const qipm::SocpInstance> inst;
  qipm::SolveTrace trace;
};

namespace {

thread_local std::string last_error;

qipm_status to_status(qipm::Errc c) {
  switch (c) {
    case qipm::Errc::invalid_argument: return QIPM_ERR_INVALID_ARGUMENT;
    case qipm::Errc::structure_mismatch: return QIPM_ERR_STRUCTURE_MISMATCH;
    case qipm::Errc::not_interior: return QIPM_ERR_NOT_INTERIOR;
    case qipm::Errc::domain_error: return QIPM_ERR_DOMAIN;
    case qipm::Errc::rank_deficient: return QIPM_ERR_RANK_DEFICIENT;
    case qipm::Errc::singular_system: return QIPM_ERR_SINGULAR_SYSTEM;
    case qipm::Errc::no_initial_point: return QIPM_ERR_NO_INITIAL_POINT;
    case qipm::Errc::io_error: return QIPM_ERR_IO;
    case qipm::Errc::parse_error: return QIPM_ERR_PARSE;
    case qipm::Errc::invariant_violation: return QIPM_ERR_INVARIANT_VIOLATION;
  }
  return QIPM_ERR_INTERNAL;
}

qipm_status fail(qipm_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <typename F>
qipm_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return QIPM_OK;
  } catch (const qipm::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QIPM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QIPM_ERR_INTERNAL, e.what());
  }
}

qipm_status null_arg(const char* what) {
  return fail(QIPM_ERR_INVALID_ARGUMENT, std::string(what) + " is NULL");
}

}  // namespace

extern "C" {

const char* qipm_version(void) { return "1.0.0"; }

const char* qipm_last_error(void) { return last_error.c_str(); }

const char* qipm_status_name(qipm_status s) {
  switch (s) {
    case QIPM_OK: return "ok";
    case QIPM_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case QIPM_ERR_STRUCTURE_MISMATCH: return "structure_mismatch";
    case QIPM_ERR_NOT_INTERIOR: return "not_interior";
    case QIPM_ERR_DOMAIN: return "domain_error";
    case QIPM_ERR_RANK_DEFICIENT: return "rank_deficient";
    case QIPM_ERR_SINGULAR_SYSTEM: return "singular_system";
    case QIPM_ERR_NO_INITIAL_POINT: return "no_initial_point";
    case QIPM_ERR_IO: return "io_error";
    case QIPM_ERR_PARSE: return "parse_error";
    case QIPM_ERR_INVARIANT_VIOLATION: return "invariant_violation";
    case QIPM_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

qipm_status qipm_dataset_generate(int64_t n, int64_t m, double p, uint64_t seed,
                                  qipm_dataset** train, qipm_dataset** test) {
  if (!train) return null_arg("train");
  return guarded([&] {
    auto g = qipm::generate_svm(n, m, p, seed);
    auto tr = std::make_unique<qipm_dataset>(qipm_dataset{std::move(g.train)});
    if (test) {
      *test = new qipm_dataset{std::move(g.test)};
    }
    *train = tr.release();
  });
}

qipm_status qipm_dataset_load(const char* path, qipm_dataset** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new qipm_dataset{qipm::load_dataset(path)}; });
}

qipm_status qipm_dataset_save(const qipm_dataset* data, const char* path) {
  if (!data) return null_arg("data");
  if (!path) return null_arg("path");
  return guarded([&] { qipm::save_dataset(data->data, path); });
}

qipm_status qipm_dataset_dims(const qipm_dataset* data, int64_t* features,
                              int64_t* points) {
  if (!data) return null_arg("data");
  if (features) *features = data->data.features();
  if (points) *points = data->data.points();
  last_error.clear();
  return QIPM_OK;
}

void qipm_dataset_free(qipm_dataset* data) { delete data; }

qipm_status qipm_instance_from_dataset(const qipm_dataset* data, double C,
                                       int fold_bias, int margin_surplus,
                                       qipm_instance** out) {
  if (!data) return null_arg("data");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto inst = std::make_shared<const qipm::SocpInstance>(qipm::to_socp(
        data->data, C, qipm::SvmReduction{fold_bias != 0, margin_surplus != 0}));
    *out = new qipm_instance{std::move(inst), std::nullopt};
  });
}

qipm_status qipm_instance_load(const char* path, qipm_instance** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    if (qipm::file_format(path) == "qipm-svm-dataset") {
      auto inst = std::make_shared<const qipm::SocpInstance>(
          qipm::to_socp(qipm::load_dataset(path)));
      *out = new qipm_instance{std::move(inst), std::nullopt};
    } else {
      auto loaded = qipm::load_instance(path);
      auto inst =
          std::make_shared<const qipm::SocpInstance>(std::move(loaded.instance));
      *out = new qipm_instance{std::move(inst), std::move(loaded.primal_hint)};
    }
  });
}

qipm_status qipm_instance_save(const qipm_instance* inst, const char* path) {
  if (!inst) return null_arg("inst");
  if (!path) return null_arg("path");
  return guarded([&] { qipm::save_instance(*inst->inst, path, inst->hint); });
}

qipm_status qipm_instance_dims(const qipm_instance* inst, int64_t* rows,
                               int64_t* dim, int64_t* blocks) {
  if (!inst) return null_arg("inst");
  if (rows) *rows = inst->inst->m();
  if (dim) *dim = inst->inst->n();
  if (blocks) *blocks = inst->inst->rank();
  last_error.clear();
  return QIPM_OK;
}

int qipm_instance_is_svm(const qipm_instance* inst) {
  return inst && inst->inst->svm_layout().has_value() ? 1 : 0;
}

void qipm_instance_free(qipm_instance* inst) { delete inst; }

void qipm_solve_options_default(qipm_solve_options* opts) {
  if (!opts) return;
  const qipm::IpmConfig d;
  opts->eta = d.eta;
  opts->chi = d.chi;
  opts->xi = d.xi;
  opts->epsilon = d.epsilon;
  opts->max_iterations = 0;
  opts->tomography = 0;
  opts->verification = 0;
  opts->measure_spectrum = 1;
  opts->seed = 0;
}

qipm_status qipm_solve(const qipm_instance* inst, const qipm_solve_options* opts,
                       qipm_trace** out) {
  if (!inst) return null_arg("inst");
  if (!out) return null_arg("out");
  qipm_solve_options o;
  qipm_solve_options_default(&o);
  if (opts) o = *opts;
  if (o.max_iterations < 0 ||
      o.max_iterations > std::numeric_limits<int>::max()) {
    return fail(QIPM_ERR_INVALID_ARGUMENT, "max_iterations out of range");
  }
  return guarded([&] {
    qipm::IpmConfig cfg;
    cfg.eta = o.eta;
    cfg.chi = o.chi;
    cfg.xi = o.xi;
    cfg.epsilon = o.epsilon;
    cfg.max_iterations = static_cast<int>(o.max_iterations);
    cfg.noise_mode = o.tomography ? qipm::NoiseMode::tomography
                                  : qipm::NoiseMode::exact;
    cfg.check_mode = o.verification ? qipm::CheckMode::verification
                                    : qipm::CheckMode::production;
    cfg.spectrum = o.measure_spectrum ? qipm::SpectrumMethod::automatic
                                      : qipm::SpectrumMethod::none;
    cfg.seed = o.seed;
    const qipm::Iterate start = qipm::initial_point(*inst->inst, inst->hint);
    auto trace = qipm::run(*inst->inst, cfg, start);
    *out = new qipm_trace{inst->inst, std::move(trace)};
  });
}

qipm_status qipm_trace_summary_get(const qipm_trace* t, qipm_trace_summary* out) {
  if (!t) return null_arg("trace");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto& tr = t->trace;
    const auto& it = tr.final_iterate;
    const auto& inst = *t->inst;
    qipm_trace_summary s{};
    s.converged = tr.converged ? 1 : 0;
    s.iterations = static_cast<int64_t>(tr.records.size());
    s.iteration_bound = tr.iteration_bound;
    s.mu0 = tr.mu0;
    s.final_mu = it.mu;
    const auto res = qipm::linear_residuals(inst, it);
    s.primal_residual = res.primal;
    s.dual_residual = res.dual;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.kappa_max = s.zeta_max = s.delta_min = s.cost_metric = nan;
    double kappa = -1.0, zeta = -1.0, delta = std::numeric_limits<double>::infinity();
    for (const auto& r : tr.records) {
      if (!std::isnan(r.kappa_i)) kappa = std::max(kappa, r.kappa_i);
      if (!std::isnan(r.zeta_i)) zeta = std::max(zeta, r.zeta_i);
      delta = std::min(delta, r.delta_i);
    }
    if (kappa >= 0.0) s.kappa_max = kappa;
    if (zeta >= 0.0) s.zeta_max = zeta;
    if (!tr.records.empty()) {
      s.delta_min = delta;
      s.cost_metric = qipm::cost_metric(tr, inst);
    }
    s.violation_count = tr.violation_count;
    std::strncpy(s.termination, tr.termination.c_str(), sizeof s.termination - 1);
    *out = s;
  });
}

qipm_status qipm_trace_write_csv(const qipm_trace* t, const char* path) {
  if (!t) return null_arg("trace");
  if (!path) return null_arg("path");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) throw qipm::Error(qipm::Errc::io_error, std::string("cannot write ") + path);
    qipm::write_trace_csv(t->trace, out);
    if (!out) throw qipm::Error(qipm::Errc::io_error, std::string("write failed: ") + path);
  });
}

qipm_status qipm_trace_accuracy(const qipm_trace* t, const qipm_dataset* data,
                                double* acc) {
  if (!t) return null_arg("trace");
  if (!data) return null_arg("data");
  if (!acc) return null_arg("accuracy");
  return guarded([&] {
    const auto clf = qipm::extract_classifier(*t->inst, t->trace.final_iterate);
    *acc = qipm::accuracy(clf, data->data);
  });
}

void qipm_trace_free(qipm_trace* t) { delete t; }

void qipm_sweep_options_default(qipm_sweep_options* opts) {
  if (!opts) return;
  const qipm::SweepConfig d;
  opts->n_min = d.n_min;
  opts->n_max = d.n_max;
  opts->per_cell = d.per_cell;
  opts->epsilon = d.epsilon;
  opts->C = d.C;
  opts->seed = d.seed;
  opts->workers = d.workers;
  opts->record_wall_time = d.record_wall_time ? 1 : 0;
  opts->p_grid = nullptr;
  opts->p_count = 0;
}

qipm_status qipm_sweep_run(const qipm_sweep_options* opts, const char* csv_path,
                           qipm_progress_fn progress, void* user) {
  if (!opts) return null_arg("opts");
  if (!csv_path) return null_arg("csv_path");
  if (opts->per_cell < 1 || opts->per_cell > std::numeric_limits<int>::max()) {
    return fail(QIPM_ERR_INVALID_ARGUMENT, "per_cell out of range");
  }
  if (opts->p_grid == nullptr && opts->p_count != 0) return null_arg("p_grid");
  return guarded([&] {
    qipm::SweepConfig cfg;
    cfg.n_min = opts->n_min;
    cfg.n_max = opts->n_max;
    cfg.per_cell = static_cast<int>(opts->per_cell);
    cfg.epsilon = opts->epsilon;
    cfg.C = opts->C;
    cfg.seed = opts->seed;
    cfg.workers = opts->workers;
    cfg.record_wall_time = opts->record_wall_time != 0;
    if (opts->p_grid) cfg.p_grid.assign(opts->p_grid, opts->p_grid + opts->p_count);
    if (progress) {
      cfg.progress = [progress, user](std::size_t done, std::size_t total) {
        progress(done, total, user);
      };
    }
    // Open first so a bad path fails before hours of work.
    std::ofstream out(csv_path);
    if (!out) {
      throw qipm::Error(qipm::Errc::io_error, std::string("cannot write ") + csv_path);
    }
    const auto records = qipm::sweep(cfg);
    qipm::write_csv(records, out);
    if (!out) {
      throw qipm::Error(qipm::Errc::io_error, std::string("write failed: ") + csv_path);
    }
  });
}

namespace {

void copy_fit(const qipm::PowerLawFit& f, qipm_power_law* out) {
  out->a = f.a;
  out->b = f.b;
  out->ci_low = f.ci_low;
  out->ci_high = f.ci_high;
  out->n_points = f.n_points;
}

std::vector<qipm::RunRecord> read_records(const char* path) {
  std::ifstream in(path);
  if (!in) throw qipm::Error(qipm::Errc::io_error, std::string("cannot open ") + path);
  return qipm::read_csv(in);
}

}  // namespace

qipm_status qipm_fit_points(const double* x, const double* y, size_t count,
                            qipm_power_law* out) {
  if ((!x || !y) && count > 0) return null_arg("x or y");
  if (!out) return null_arg("out");
  return guarded([&] {
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < count; ++i) pts.emplace_back(x[i], y[i]);
    copy_fit(qipm::fit_power_law(pts), out);
  });
}

qipm_status qipm_fit_csv(const char* csv_path, const char* x_column,
                         const char* y_column, qipm_power_law* out) {
  if (!csv_path) return null_arg("csv_path");
  if (!x_column || !y_column) return null_arg("column");
  if (!out) return null_arg("out");
  return guarded([&] {
    copy_fit(qipm::fit_records(read_records(csv_path), x_column, y_column), out);
  });
}

qipm_status qipm_format_fit(const qipm_power_law* fit, char* buf, size_t size) {
  if (!fit) return null_arg("fit");
  if (!buf) return null_arg("buf");
  return guarded([&] {
    const std::string s = qipm::format_fit(
        qipm::PowerLawFit{fit->a, fit->b, fit->ci_low, fit->ci_high, fit->n_points});
    if (s.size() + 1 > size) {
      throw qipm::Error(qipm::Errc::invalid_argument, "buffer too small");
    }
    std::memcpy(buf, s.c_str(), s.size() + 1);
  });
}

qipm_status qipm_report_csv(const char* csv_path, const char* out_path) {
  if (!csv_path) return null_arg("csv_path");
  if (!out_path) return null_arg("out_path");
  return guarded([&] {
    const std::string text = qipm::report(read_records(csv_path));
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw qipm::Error(qipm::Errc::io_error, std::string("cannot write ") + out_path);
    out << text;
    if (!out) throw qipm::Error(qipm::Errc::io_error, std::string("write failed: ") + out_path);
  });
}

}  // extern "C"
