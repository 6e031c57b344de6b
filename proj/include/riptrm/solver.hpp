#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "riptrm/problem.hpp"
#include "riptrm/trs.hpp"

namespace riptrm {

using ForcingFunction = std::function<double(double)>;

/// Barrier-subproblem tolerances. Defaults: sigma_grad(mu) = mu,
/// sigma_compl(mu) = 1e-3 mu, sigma_sosp(mu) = mu.
struct StoppingConditions {
  ForcingFunction sigma_grad = [](double mu) { return mu; };
  ForcingFunction sigma_compl = [](double mu) { return 1e-3 * mu; };
  ForcingFunction sigma_sosp = [](double mu) { return mu; };
  /// Require lambda_min(H(w)) >= -sigma_sosp(mu) as well.
  bool second_order = false;
};

/// Lower bound applied to sigma_compl so the complementarity test stays
/// attainable in floating point.
inline constexpr double kComplToleranceFloor = 1e-30;

using Clock = std::chrono::steady_clock;

struct InnerConfig {
  double eta = 0.1;
  double contract_coeff = 0.25;
  double delta_max = 10.0;
  double clip_c_lo = 0.5;
  double clip_c_hi = 1e20;
  trs::Subsolver subsolver = trs::Subsolver::kTruncatedCg;
  trs::TcgOptions tcg;
  double exact_tol = trs::kDefaultExactTol;
  int max_inner_iters = 10000;
  /// The inner solve reports a stall once the radius drops below this value.
  double min_radius = 1e-20;
  /// The inner solve also stalls when the predicted decrease falls to
  /// pred_noise * eps * |merit|, below which ared is dominated by rounding.
  double pred_noise = 1.0;
  std::optional<Clock::time_point> deadline;

  /// Throws InvalidInput when a parameter is outside its admissible range.
  void validate() const;
};

struct OuterConfig {
  double mu0 = 0.1;
  std::function<double(double)> mu_update = [](double mu) { return 0.5 * std::pow(mu, 1.01); };
  /// Initial radius; defaults to manifold scale / 8 (capped at delta_max).
  std::optional<double> delta_hat0;
  double delta_bar = 1e-15;
  StoppingConditions stopping;
  InnerConfig inner;
  double budget_s = std::numeric_limits<double>::infinity();
  int max_outer = 1000;
  double target_residual = 1e-9;
  /// The outer loop ends once mu drops below this value.
  double mu_min = 1e-30;

  void validate() const;
};

struct InnerIterationRecord {
  int ell = 0;
  double delta = 0.0;  // radius used for this iteration
  double delta_next = 0.0;
  double d_norm = 0.0;
  double ared = 0.0;
  double pred = 0.0;
  double rho = 0.0;
  bool accepted = false;
  bool feasible_retraction = false;
  /// The unclipped trial point satisfied the stopping conditions and was
  /// returned.
  bool converged = false;
  /// No progress is possible at working precision; the inner solve returns.
  bool stalled = false;
  trs::TrsStatus trs_status = trs::TrsStatus::kInterior;
  Eigen::VectorXd lambda_prev;
  Eigen::VectorXd dual_raw;      // lambda + delta_lambda
  Eigen::VectorXd dual_clipped;  // empty unless accepted
  Eigen::VectorXd g_new;         // g at the retracted point
  double merit_before = 0.0;
  double merit_after = 0.0;  // merit of the iterate carried forward
};

enum class InnerStatus { kConverged, kBudgetExhausted, kTimeLimit, kStalled };
std::string to_string(InnerStatus s);

/// Predicted decreases at or below this value are indistinguishable from
/// rounding in the merit function.
double pred_noise_floor(double merit, double pred_noise);

struct InnerResult {
  PrimalDualPair w;
  double delta_final = 0.0;
  InnerStatus status = InnerStatus::kConverged;
  std::vector<InnerIterationRecord> records;
};

struct StoppingReport {
  bool satisfied = false;
  double grad_norm = 0.0;
  double compl_norm = 0.0;
  double min_g = 0.0;
  double min_lambda = 0.0;
  /// lambda_min(H(w)); NaN when not evaluated.
  double min_eig = std::numeric_limits<double>::quiet_NaN();
};

/// Callbacks fired while solving. `current` and `lambda` describe the iterate
/// carried forward after the iteration.
struct SolverObserver {
  std::function<void(int outer, double mu, const InnerIterationRecord&,
                     const PointEvaluation& current, const Eigen::VectorXd& lambda)>
      on_inner;
  std::function<void(int outer, double mu, InnerStatus, const PointEvaluation& current,
                     const Eigen::VectorXd& lambda)>
      on_outer;
};

struct Reductions {
  double ared = 0.0;
  double pred = 0.0;
};

/// ared = merit(x) - merit(R_x(d)), pred = m(0) - m(d) for the barrier model at w.
///
/// Throws NotStrictlyFeasible if R_x(d) leaves the strict interior.
Reductions reductions(const RicoProblem& p, const PrimalDualPair& w, double mu,
                      const TangentVector& d);

/// Trust-region radius rule driven by ared/pred. pred <= 0 is treated as a
/// failed step.
double tr_radius_update(double delta, double ared, double pred, double d_norm,
                        double delta_max);

/// delta_lambda = -lambda + mu G^-1 1 - Lambda G^-1 A*[d].
Eigen::VectorXd dual_newton_step(const RicoProblem& p, const PointEvaluation& e,
                                 const Eigen::VectorXd& lambda, double mu,
                                 const TangentVector& d);
Eigen::VectorXd dual_newton_step(const RicoProblem& p, const PrimalDualPair& w, double mu,
                                 const TangentVector& d);

struct ClipBounds {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

ClipBounds clip_bounds(const Eigen::VectorXd& lambda_prev, double mu, const Eigen::VectorXd& g_new,
                       double c_lo, double c_hi);

/// Componentwise clamp of raw into [zeta_min, zeta_max].
Eigen::VectorXd clip_duals(const Eigen::VectorXd& raw, const Eigen::VectorXd& lambda_prev,
                           double mu, const Eigen::VectorXd& g_new, double c_lo, double c_hi);

StoppingReport stopping_satisfied(const RicoProblem& p, const PointEvaluation& e,
                                  const Eigen::VectorXd& lambda, double mu,
                                  const StoppingConditions& conds);
StoppingReport stopping_satisfied(const RicoProblem& p, const PrimalDualPair& w, double mu,
                                  const StoppingConditions& conds);

/// lambda_min of the condensed operator H(w) over T_xM.
double condensed_min_eig(const RicoProblem& p, const PointEvaluation& e,
                         const Eigen::VectorXd& lambda);
double condensed_min_eig(const PointEvaluation& e, const Eigen::VectorXd& lambda,
                         const CurvatureMatrices& c);

/// Inner iteration at fixed mu. Requires a strictly feasible w0 with
/// lambda > 0 and delta0 in (0, delta_max].
InnerResult inner_solve(const RicoProblem& p, const PrimalDualPair& w0, double mu, double delta0,
                        const StoppingConditions& conds, const InnerConfig& cfg,
                        const SolverObserver* observer = nullptr, int outer_index = 0);

enum class OuterStatus {
  kTargetReached,
  kMaxOuter,
  kTimeLimit,
  kMuUnderflow,
  kInnerBudget,
  kStalled,
};
std::string to_string(OuterStatus s);

struct OuterRecord {
  int k = 0;
  double mu = 0.0;
  double delta_hat = 0.0;  // initial radius handed to the inner solve
  double delta_final = 0.0;
  InnerStatus inner_status = InnerStatus::kConverged;
  int inner_iterations = 0;
  ResidualBreakdown residual;
};

struct OuterResult {
  PrimalDualPair w;
  OuterStatus status = OuterStatus::kMaxOuter;
  std::vector<OuterRecord> outer;
  /// Every inner record, tagged by outer index through `outer_of_record`.
  std::vector<InnerIterationRecord> inner;
  std::vector<int> outer_of_record;
};

/// Barrier loop: mu_k from the schedule, inner solve to the stopping
/// conditions, delta_hat_{k+1} = max(delta_final_k, delta_bar).
///
/// Throws InvalidInput if w0 is not strictly feasible with positive duals.
OuterResult outer_solve(const RicoProblem& p, const PrimalDualPair& w0, const OuterConfig& cfg,
                        const SolverObserver* observer = nullptr);

/// Default initial radius for a problem: min(scale / 8, delta_max).
double default_initial_radius(const RicoProblem& p, const OuterConfig& cfg);

}  // namespace riptrm
