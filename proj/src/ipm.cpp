#include "ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "seeds.hpp"

namespace qipm {

namespace {

constexpr int kMaxHalvings = 30;
constexpr double kGapSlack = 1e-9;
constexpr double kScaledLambdaFloor = 0.8;
constexpr std::size_t kMaxStoredViolations = 100;

double dual_scale(const SocpInstance& inst) {
  return 2.0 * (1.0 + inst.c().norm());
}

// Absolute part of the near-feasibility test.
double feasibility_floor(const SocpInstance& inst) {
  return 1e-8 * (1.0 + inst.b().norm() + inst.c().norm());
}

Iterate svm_start(const SocpInstance& inst, const SvmLayout& layout) {
  const Index n = layout.features;
  const Index m = layout.points;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(inst.n());
  x[0] = 2.0;  // t + 1
  x[1] = 1.0;  // t
  // w = 0 and t = 1. Each margin row then reads y_i (xi_i - z_i) = y_i - b.
  const Index xi_at = n + 3;
  double bias = 0.0;
  if (!layout.folded_bias) {
    // b lives in its own nonnegative block, so it must be positive.
    bias = 0.5;
    x[n + 2] = bias;
  }
  for (Index i = 0; i < m; ++i) {
    const double need = 1.0 - bias * inst.b()[i];  // xi_i - z_i
    if (layout.margin_surplus) {
      x[xi_at + i] = need + 1.0;
      x[xi_at + m + i] = 1.0;
    } else {
      x[xi_at + i] = need;
    }
  }
  return Iterate::make(BlockVector(inst.cones(), std::move(x)),
                       Eigen::VectorXd::Zero(inst.m()),
                       BlockVector::identity(inst.cones()) * dual_scale(inst));
}

std::string describe(const char* what, int index, double value, double bound) {
  std::ostringstream os;
  os.precision(10);
  os << "iteration " << index << ": " << what << " " << value
     << " exceeds bound " << bound;
  return os.str();
}

}  // namespace

Iterate initial_point(const SocpInstance& inst,
                      const std::optional<BlockVector>& primal_hint) {
  if (primal_hint) {
    const BlockVector& x = *primal_hint;
    if (!x.same_structure(inst.c())) {
      throw Error(Errc::structure_mismatch,
                  "primal hint does not match the cone structure");
    }
    if (!is_interior(x)) {
      throw Error(Errc::not_interior, "primal hint is not in the cone interior");
    }
    const double res = (inst.A() * x.values() - inst.b()).norm();
    if (res > feasibility_floor(inst) * (1.0 + inst.a_norm() * x.norm())) {
      throw Error(Errc::no_initial_point,
                  "primal hint violates A x = b (residual " +
                      std::to_string(res) + ")");
    }
    return Iterate::make(x, Eigen::VectorXd::Zero(inst.m()),
                         BlockVector::identity(inst.cones()) * dual_scale(inst));
  }
  if (inst.svm_layout()) return svm_start(inst, *inst.svm_layout());
  throw Error(Errc::no_initial_point,
              "no constructive start for a general instance; supply a strictly "
              "feasible primal point");
}

double tomography_precision(const Iterate& iter, double xi) {
  const double lx = lambda_min(iter.x);
  const double ls = lambda_min(iter.s);
  if (!(lx > 0.0) || !(ls > 0.0)) {
    throw Error(Errc::not_interior,
                "tomography precision needs a strictly feasible iterate");
  }
  return xi / 4.0 * std::min(lx, ls);
}

double theta_bound(const IpmConfig& cfg, Index r) {
  if (!(cfg.eta < 1.0 / 3.0) || !(cfg.eta > 0.0)) {
    throw Error(Errc::invalid_argument, "theta bound needs 0 < eta < 1/3");
  }
  if (r < 1) throw Error(Errc::invalid_argument, "rank must be >= 1");
  const double one_minus_sigma = cfg.chi / std::sqrt(static_cast<double>(r));
  return 2.0 *
         std::sqrt(cfg.eta * cfg.eta / 2.0 +
                   one_minus_sigma * one_minus_sigma * static_cast<double>(r)) /
         (1.0 - 3.0 * cfg.eta);
}

Eigen::MatrixXd rxs_matrix(const Iterate& iter) {
  const Eigen::MatrixXd T = t_dense(iter.x);
  const Eigen::MatrixXd arw_x = arw_dense(iter.x);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(arw_x);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > kPivotThreshold * arw_x.norm())) {
    throw Error(Errc::singular_system, "Arw(x) is singular");
  }
  return T * lu.solve(arw_dense(iter.s) * T);
}

StepResult step(const SocpInstance& inst, const Iterate& iter,
                const IpmConfig& cfg, int index, SpectrumHint* hint,
                double prior_injected_error) {
  const Index r = inst.rank();
  const double sqrt_r = std::sqrt(static_cast<double>(r));
  const double sigma = 1.0 - cfg.chi / sqrt_r;
  const bool noisy = cfg.noise_mode == NoiseMode::tomography;
  const SpectrumMethod method = (noisy || cfg.measure_in_exact_mode)
                                    ? cfg.spectrum
                                    : SpectrumMethod::none;

  IterationRecord rec;
  rec.index = index;
  rec.sigma = sigma;
  rec.mu_before = iter.mu;
  rec.d_before = iter.d;
  rec.lambda_min_x = lambda_min(iter.x);
  rec.lambda_min_s = lambda_min(iter.s);
  rec.delta_i = tomography_precision(iter, cfg.xi);
  rec.theta_bound = theta_bound(cfg, r);

  const LinearResiduals before = linear_residuals(inst, iter);
  const double floor = feasibility_floor(inst);
  const double allowance = 1.01 * prior_injected_error;
  const bool near_feasible =
      before.primal <= floor + allowance * inst.a_norm() &&
      before.dual <= floor + allowance * (inst.a_norm() + 1.0);
  const bool premises = near_feasible && in_neighborhood(iter, cfg.eta);

  const NewtonSystem sys =
      NewtonSystem::assemble(inst, iter, sigma, method, hint);
  rec.kappa_i = sys.kappa();
  rec.zeta_i = sys.zeta();
  const SolveReport exact = solve_exact(sys);

  Eigen::VectorXd direction = exact.solution.stacked();
  const ConePtr& cones = inst.cones();
  const Index n = inst.n();
  const Index m = inst.m();
  if (noisy) {
    rec.injected_error = kNoiseFraction * rec.delta_i;
    const Eigen::VectorXd noise = tomography_noise(
        sys.dim(), rec.injected_error,
        derive_seed({cfg.seed, static_cast<std::uint64_t>(index)}));
    direction += noise;
    const BlockVector nx(cones, noise.head(n));
    const BlockVector ns(cones, noise.tail(n));
    rec.dx_hat_error = frobenius_norm(t_apply(inverse(iter.x), nx));
    rec.ds_hat_error = frobenius_norm(t_apply(iter.x, ns)) / iter.mu;
  }
  const NewtonStep applied = NewtonStep::unstack(cones, m, direction);

  // Scaled frame: x_hat = e, s_hat = mu^{-1} T_x s.
  const BlockVector x_inv = inverse(iter.x);
  const BlockVector dx_hat_exact = t_apply(x_inv, exact.solution.dx);
  const BlockVector ds_hat_exact =
      t_apply(iter.x, exact.solution.ds) * (1.0 / iter.mu);
  rec.dx_hat_norm = frobenius_norm(dx_hat_exact);
  rec.ds_hat_norm = frobenius_norm(ds_hat_exact);
  const ScaledPair frame = scale_to_frame(iter.x, iter.s, iter.mu);
  rec.lambda_min_x_hat_next =
      lambda_min(frame.x_hat + t_apply(x_inv, applied.dx));
  rec.lambda_min_s_hat_next = lambda_min(
      frame.s_hat + t_apply(iter.x, applied.ds) * (1.0 / iter.mu));
  rec.dx_norm = frobenius_norm(applied.dx);
  rec.ds_norm = frobenius_norm(applied.ds);

  double alpha = 1.0;
  int halvings = 0;
  for (;;) {
    const BlockVector xn = iter.x + applied.dx * alpha;
    const BlockVector sn = iter.s + applied.ds * alpha;
    if (is_interior(xn) && is_interior(sn)) break;
    if (++halvings > kMaxHalvings) {
      throw Error(Errc::not_interior,
                  "iteration " + std::to_string(index) +
                      ": no step length keeps the iterate interior");
    }
    alpha *= 0.5;
  }
  rec.step_length = alpha;
  rec.damped = halvings > 0;

  Iterate next = Iterate::make(iter.x + applied.dx * alpha,
                               iter.y + applied.dy * alpha,
                               iter.s + applied.ds * alpha);
  rec.mu_after = next.mu;
  rec.d_after = next.d;
  const LinearResiduals after = linear_residuals(inst, next);
  rec.primal_residual = after.primal;
  rec.dual_residual = after.dual;
  rec.premises_held = premises;
  return {std::move(next), rec};
}

namespace {

// Checks of the per-iteration guarantees; returns the failed ones.
std::vector<std::string> check_record(const IterationRecord& rec,
                                      const IpmConfig& cfg, Index r,
                                      bool noisy) {
  std::vector<std::string> out;
  if (!rec.premises_held) return out;
  const double sqrt_r = std::sqrt(static_cast<double>(r));
  if (rec.damped) {
    out.push_back("iteration " + std::to_string(rec.index) +
                  ": full step left the cone interior");
    return out;
  }
  const double ratio_bound = 1.0 - kGapAlpha / sqrt_r + kGapSlack;
  const double ratio = rec.mu_after / rec.mu_before;
  if (ratio > ratio_bound) {
    out.push_back(describe("gap ratio", rec.index, ratio, ratio_bound));
  }
  if (rec.d_after > cfg.eta * rec.mu_after) {
    out.push_back(describe("central-path distance", rec.index, rec.d_after,
                           cfg.eta * rec.mu_after));
  }
  if (rec.dx_hat_norm > rec.theta_bound / std::sqrt(2.0)) {
    out.push_back(describe("scaled dx norm", rec.index, rec.dx_hat_norm,
                           rec.theta_bound / std::sqrt(2.0)));
  }
  if (rec.ds_hat_norm > rec.theta_bound * std::sqrt(2.0)) {
    out.push_back(describe("scaled ds norm", rec.index, rec.ds_hat_norm,
                           rec.theta_bound * std::sqrt(2.0)));
  }
  if (rec.lambda_min_x_hat_next < kScaledLambdaFloor) {
    out.push_back(describe("scaled lambda_min(x) below floor", rec.index,
                           rec.lambda_min_x_hat_next, kScaledLambdaFloor));
  }
  if (rec.lambda_min_s_hat_next < kScaledLambdaFloor) {
    out.push_back(describe("scaled lambda_min(s) below floor", rec.index,
                           rec.lambda_min_s_hat_next, kScaledLambdaFloor));
  }
  if (noisy) {
    if (rec.dx_hat_error > cfg.xi) {
      out.push_back(
          describe("scaled dx error", rec.index, rec.dx_hat_error, cfg.xi));
    }
    if (rec.ds_hat_error > cfg.xi) {
      out.push_back(
          describe("scaled ds error", rec.index, rec.ds_hat_error, cfg.xi));
    }
  }
  return out;
}

}  // namespace

SolveTrace run(const SocpInstance& inst, const IpmConfig& cfg,
               const Iterate& start) {
  if (!(cfg.epsilon > 0.0)) {
    throw Error(Errc::invalid_argument, "epsilon must be > 0");
  }
  const Index r = inst.rank();
  const double sqrt_r = std::sqrt(static_cast<double>(r));
  const bool noisy = cfg.noise_mode == NoiseMode::tomography;

  SolveTrace trace(start);
  trace.mu0 = start.mu;
  if (start.mu > cfg.epsilon) {
    trace.iteration_bound = static_cast<long long>(
        std::ceil(sqrt_r / kGapAlpha * std::log(start.mu / cfg.epsilon)));
  }
  const long long cap = cfg.max_iterations > 0
                            ? cfg.max_iterations
                            : 2 * trace.iteration_bound + 100;
  const long long stall_window =
      static_cast<long long>(std::ceil(10.0 * sqrt_r));

  SpectrumHint hint;
  double best_mu = start.mu;
  long long best_at = 0;
  double prior_injected = 0.0;
  trace.termination = "max_iterations";

  for (long long k = 0;; ++k) {
    if (trace.final_iterate.mu <= cfg.epsilon) {
      trace.converged = true;
      trace.termination = "converged";
      break;
    }
    if (k >= cap) break;
    if (k - best_at > stall_window) {
      trace.termination = "stalled";
      break;
    }

    StepResult res = step(inst, trace.final_iterate, cfg, static_cast<int>(k),
                          &hint, prior_injected);
    prior_injected = res.record.injected_error;

    for (auto& v : check_record(res.record, cfg, r, noisy)) {
      if (cfg.check_mode == CheckMode::verification) {
        throw Error(Errc::invariant_violation, v);
      }
      ++trace.violation_count;
      if (trace.violations.size() < kMaxStoredViolations) {
        trace.violations.push_back(std::move(v));
      }
    }
    if (!res.record.premises_held) ++trace.outside_premise_steps;

    trace.records.push_back(res.record);
    trace.final_iterate = std::move(res.next);
    if (trace.final_iterate.mu < best_mu) {
      best_mu = trace.final_iterate.mu;
      best_at = k + 1;
    }
  }
  return trace;
}

SolveTrace run(const SocpInstance& inst, const IpmConfig& cfg) {
  return run(inst, cfg, initial_point(inst));
}

double cost_metric(const SolveTrace& trace, const SocpInstance& inst) {
  return cost_metric(trace, inst.n());
}

double cost_metric(const SolveTrace& trace, Index dim) {
  if (trace.records.empty()) {
    throw Error(Errc::invalid_argument, "cost metric of an empty trace");
  }
  double kappa = -std::numeric_limits<double>::infinity();
  double zeta = -std::numeric_limits<double>::infinity();
  double delta = std::numeric_limits<double>::infinity();
  for (const auto& rec : trace.records) {
    if (!std::isnan(rec.kappa_i)) kappa = std::max(kappa, rec.kappa_i);
    if (!std::isnan(rec.zeta_i)) zeta = std::max(zeta, rec.zeta_i);
    delta = std::min(delta, rec.delta_i);
  }
  if (!std::isfinite(zeta) || kappa < 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::pow(static_cast<double>(dim), 1.5) * kappa * zeta / (delta * delta);
}

}  // namespace qipm
