#ifndef QIPM_QIPM_H
#define QIPM_QIPM_H

/* C interface to the qipm solver and experiment harness.
 *
 * Objects are opaque handles released with their *_free function. Every
 * fallible call returns a qipm_status; on failure qipm_last_error() gives a
 * message for the calling thread, valid until that thread's next call. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(QIPM_BUILDING)
#    define QIPM_API __declspec(dllexport)
#  else
#    define QIPM_API __declspec(dllimport)
#  endif
#else
#  define QIPM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qipm_status {
  QIPM_OK = 0,
  QIPM_ERR_INVALID_ARGUMENT = 1,
  QIPM_ERR_STRUCTURE_MISMATCH = 2,
  QIPM_ERR_NOT_INTERIOR = 3,
  QIPM_ERR_DOMAIN = 4,
  QIPM_ERR_RANK_DEFICIENT = 5,
  QIPM_ERR_SINGULAR_SYSTEM = 6,
  QIPM_ERR_NO_INITIAL_POINT = 7,
  QIPM_ERR_IO = 8,
  QIPM_ERR_PARSE = 9,
  QIPM_ERR_INVARIANT_VIOLATION = 10,
  QIPM_ERR_INTERNAL = 11
} qipm_status;

typedef struct qipm_dataset qipm_dataset;
typedef struct qipm_instance qipm_instance;
typedef struct qipm_trace qipm_trace;

QIPM_API const char* qipm_version(void);
QIPM_API const char* qipm_last_error(void);
QIPM_API const char* qipm_status_name(qipm_status status);

/* Datasets */

/* SVM(n, m, p): training set of m points and a test set of m / 3 points. */
QIPM_API qipm_status qipm_dataset_generate(int64_t n, int64_t m, double p,
                                           uint64_t seed, qipm_dataset** train,
                                           qipm_dataset** test);
QIPM_API qipm_status qipm_dataset_load(const char* path, qipm_dataset** out);
QIPM_API qipm_status qipm_dataset_save(const qipm_dataset* data,
                                       const char* path);
QIPM_API qipm_status qipm_dataset_dims(const qipm_dataset* data,
                                       int64_t* features, int64_t* points);
QIPM_API void qipm_dataset_free(qipm_dataset* data);

/* Instances */

QIPM_API qipm_status qipm_instance_from_dataset(const qipm_dataset* data,
                                                double C, int fold_bias,
                                                int margin_surplus,
                                                qipm_instance** out);
/* Reads an SOCP instance file, or a dataset file reduced with C = 1. */
QIPM_API qipm_status qipm_instance_load(const char* path, qipm_instance** out);
QIPM_API qipm_status qipm_instance_save(const qipm_instance* inst,
                                        const char* path);
/* rows of A, SOCP dimension, number of cone blocks */
QIPM_API qipm_status qipm_instance_dims(const qipm_instance* inst,
                                        int64_t* rows, int64_t* dim,
                                        int64_t* blocks);
QIPM_API int qipm_instance_is_svm(const qipm_instance* inst);
QIPM_API void qipm_instance_free(qipm_instance* inst);

/* Solving */

typedef struct qipm_solve_options {
  double eta;
  double chi;
  double xi;
  double epsilon;
  int64_t max_iterations; /* 0: twice the iteration bound plus 100 */
  int tomography;         /* nonzero: noisy Newton solves */
  int verification;       /* nonzero: a failed invariant is an error */
  int measure_spectrum;   /* nonzero: record kappa and zeta per iteration */
  uint64_t seed;
} qipm_solve_options;

QIPM_API void qipm_solve_options_default(qipm_solve_options* opts);

/* A NULL opts uses the defaults. */
QIPM_API qipm_status qipm_solve(const qipm_instance* inst,
                                const qipm_solve_options* opts,
                                qipm_trace** out);

typedef struct qipm_trace_summary {
  int converged;
  int64_t iterations;
  int64_t iteration_bound;
  double mu0;
  double final_mu;
  double primal_residual; /* ||A x - b|| */
  double dual_residual;   /* ||A^T y + s - c|| */
  double kappa_max;       /* NaN when not measured */
  double zeta_max;
  double delta_min;
  double cost_metric;
  int64_t violation_count;
  char termination[32];
} qipm_trace_summary;

QIPM_API qipm_status qipm_trace_summary_get(const qipm_trace* trace,
                                            qipm_trace_summary* out);
QIPM_API qipm_status qipm_trace_write_csv(const qipm_trace* trace,
                                          const char* path);
/* Accuracy of the classifier read from an SVM solution on `data`. */
QIPM_API qipm_status qipm_trace_accuracy(const qipm_trace* trace,
                                         const qipm_dataset* data,
                                         double* accuracy);
QIPM_API void qipm_trace_free(qipm_trace* trace);

/* Experiment */

typedef struct qipm_sweep_options {
  int64_t n_min;
  int64_t n_max;
  int64_t per_cell;
  double epsilon;
  double C;
  uint64_t seed;
  int workers; /* 0: QIPM_WORKERS or the hardware concurrency */
  int record_wall_time;
  const double* p_grid; /* NULL: 0, 0.1, ..., 1 */
  size_t p_count;
} qipm_sweep_options;

typedef void (*qipm_progress_fn)(size_t done, size_t total, void* user);

QIPM_API void qipm_sweep_options_default(qipm_sweep_options* opts);
QIPM_API qipm_status qipm_sweep_run(const qipm_sweep_options* opts,
                                    const char* csv_path,
                                    qipm_progress_fn progress, void* user);

typedef struct qipm_power_law {
  double a;
  double b;
  double ci_low;
  double ci_high;
  int64_t n_points;
} qipm_power_law;

QIPM_API qipm_status qipm_fit_points(const double* x, const double* y,
                                     size_t count, qipm_power_law* out);
QIPM_API qipm_status qipm_fit_csv(const char* csv_path, const char* x_column,
                                  const char* y_column, qipm_power_law* out);
/* Writes "exponent b=... ci95=[...,...] n=..." including the terminator;
 * fails with QIPM_ERR_INVALID_ARGUMENT when it does not fit in `size`. */
QIPM_API qipm_status qipm_format_fit(const qipm_power_law* fit, char* buf,
                                     size_t size);
QIPM_API qipm_status qipm_report_csv(const char* csv_path,
                                     const char* out_path);

#ifdef __cplusplus
}
#endif

#endif
