#pragma once

// Short-step primal-dual interior-point method with an optionally inexact
// Newton solve. In tomography mode every Newton solution is perturbed by a
// seeded noise vector whose norm matches the precision a tomography readout
// would be asked for, and the per-iteration condition number and
// block-encoding parameter of the Newton matrix are recorded.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "newton.hpp"
#include "socp.hpp"

namespace qipm {

enum class NoiseMode { exact, tomography };

/// verification: a failed invariant check throws Errc::invariant_violation.
/// production: it is recorded in SolveTrace::violations and the run goes on.
enum class CheckMode { production, verification };

struct IpmConfig {
  double eta = 0.01;
  double chi = 0.01;
  double xi = 0.001;
  double epsilon = 0.1;
  /// 0 picks twice the theoretical iteration bound plus 100.
  int max_iterations = 0;
  NoiseMode noise_mode = NoiseMode::exact;
  CheckMode check_mode = CheckMode::production;
  std::uint64_t seed = 0;
  /// How kappa and zeta are measured; `none` skips them. Only consulted in
  /// tomography mode unless measure_in_exact_mode is set.
  SpectrumMethod spectrum = SpectrumMethod::automatic;
  bool measure_in_exact_mode = false;
};

/// Guaranteed per-iteration gap reduction constant.
inline constexpr double kGapAlpha = 0.005;

struct IterationRecord {
  int index = 0;
  double sigma = 0.0;
  double mu_before = 0.0;
  double mu_after = 0.0;
  double d_before = 0.0;
  double d_after = 0.0;
  double lambda_min_x = 0.0;  // of the iterate the step started from
  double lambda_min_s = 0.0;
  double delta_i = 0.0;
  double injected_error = 0.0;
  double kappa_i = 0.0;  // NaN when not measured
  double zeta_i = 0.0;
  double dx_norm = 0.0;  // ||dx||_F of the applied (possibly noisy) step
  double ds_norm = 0.0;
  double dx_hat_norm = 0.0;  // ||T_x^{-1} dx||_F of the exact solution
  double ds_hat_norm = 0.0;  // ||mu^{-1} T_x ds||_F of the exact solution
  double dx_hat_error = 0.0;  // scaled noise on dx
  double ds_hat_error = 0.0;
  // Full (undamped) step in the scaled frame.
  double lambda_min_x_hat_next = 0.0;  // lambda_min(e + dx_hat)
  double lambda_min_s_hat_next = 0.0;  // lambda_min(s_hat + ds_hat)
  double primal_residual = 0.0;  // after the step
  double dual_residual = 0.0;
  double theta_bound = 0.0;
  double step_length = 1.0;
  bool damped = false;
  /// The step started inside the neighborhood from a near-feasible point,
  /// so the per-iteration guarantees are checked for it.
  bool premises_held = false;
};

struct SolveTrace {
  explicit SolveTrace(Iterate start) : final_iterate(std::move(start)) {}

  std::vector<IterationRecord> records;
  Iterate final_iterate;
  bool converged = false;
  double mu0 = 0.0;
  /// ceil((sqrt(r) / kGapAlpha) ln(mu0 / epsilon)); 0 when mu0 <= epsilon.
  long long iteration_bound = 0;
  std::string termination;  // "converged", "max_iterations", "stalled"
  std::vector<std::string> violations;  // first 100 failed checks
  long long violation_count = 0;
  long long outside_premise_steps = 0;
};

/// Constructive start for bias-folded SVM instances; for anything else the
/// caller supplies a strictly feasible primal point (A x = b, x interior).
/// Dual start: y = 0, s = 2 (1 + ||c||) e.
Iterate initial_point(const SocpInstance& inst,
                      const std::optional<BlockVector>& primal_hint = {});

/// xi / 4 * min(lambda_min(x), lambda_min(s)).
double tomography_precision(const Iterate& iter, double xi);

/// sqrt(2 eta^2 + 4 chi^2) / (1 - 3 eta); independent of r.
double theta_bound(const IpmConfig& cfg, Index r);

/// T_x Arw(x)^{-1} Arw(s) T_x, dense.
Eigen::MatrixXd rxs_matrix(const Iterate& iter);

struct StepResult {
  Iterate next;
  IterationRecord record;
};

/// One interior-point iteration. `hint` carries warm starts for the spectral
/// estimates between calls. `prior_injected_error` is the noise norm of the
/// previous step; it widens the near-feasibility test that decides
/// IterationRecord::premises_held.
StepResult step(const SocpInstance& inst, const Iterate& iter,
                const IpmConfig& cfg, int index = 0,
                SpectrumHint* hint = nullptr,
                double prior_injected_error = 0.0);

/// Iterates from `start` until mu <= epsilon, the iteration cap, or a stall
/// (no new smallest gap within 10 sqrt(r) iterations).
SolveTrace run(const SocpInstance& inst, const IpmConfig& cfg,
               const Iterate& start);
SolveTrace run(const SocpInstance& inst, const IpmConfig& cfg);

/// n^{1.5} kappa zeta / delta^2 with kappa, zeta maximized and delta
/// minimized over the trace; n is the SOCP dimension.
double cost_metric(const SolveTrace& trace, const SocpInstance& inst);
double cost_metric(const SolveTrace& trace, Index n);

}  // namespace qipm
