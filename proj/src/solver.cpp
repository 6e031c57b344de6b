#include "riptrm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "riptrm/error.hpp"
#include "riptrm/linalg.hpp"

namespace riptrm {

namespace {

bool deadline_passed(const std::optional<Clock::time_point>& deadline) {
  return deadline && Clock::now() >= *deadline;
}

trs::TrsInstance barrier_model(const RicoProblem& p, const PointEvaluation& e,
                               const Eigen::VectorXd& lambda, double mu, double radius) {
  return trs::TrsInstance::on_manifold(
      *p.manifold, e.x,
      [&p, &e, &lambda](const TangentVector& v) { return condensed_apply(p, e, lambda, v); },
      barrier_gradient(p, e, mu), radius);
}

}  // namespace

void InnerConfig::validate() const {
  if (!(eta > 0.0 && eta < 0.25)) throw InvalidInput("InnerConfig: eta must lie in (0, 1/4)");
  if (!(contract_coeff > 0.0 && contract_coeff < 1.0)) {
    throw InvalidInput("InnerConfig: contract_coeff must lie in (0, 1)");
  }
  if (!(delta_max > 0.0)) throw InvalidInput("InnerConfig: delta_max must be positive");
  if (!(clip_c_lo > 0.0 && clip_c_lo < 1.0 && clip_c_hi > 1.0)) {
    throw InvalidInput("InnerConfig: need 0 < clip_c_lo < 1 < clip_c_hi");
  }
  if (max_inner_iters < 1) throw InvalidInput("InnerConfig: max_inner_iters must be positive");
  if (!(min_radius > 0.0 && min_radius < delta_max)) {
    throw InvalidInput("InnerConfig: min_radius must lie in (0, delta_max)");
  }
  if (!(pred_noise >= 0.0)) throw InvalidInput("InnerConfig: pred_noise must be nonnegative");
}

void OuterConfig::validate() const {
  inner.validate();
  if (!(mu0 > 0.0)) throw InvalidInput("OuterConfig: mu0 must be positive");
  if (!(delta_bar > 0.0 && delta_bar <= inner.delta_max)) {
    throw InvalidInput("OuterConfig: need 0 < delta_bar <= delta_max");
  }
  if (delta_hat0 && !(*delta_hat0 > 0.0 && *delta_hat0 <= inner.delta_max)) {
    throw InvalidInput("OuterConfig: delta_hat0 must lie in (0, delta_max]");
  }
  if (!mu_update) throw InvalidInput("OuterConfig: missing barrier schedule");
}

std::string to_string(InnerStatus s) {
  switch (s) {
    case InnerStatus::kConverged:
      return "converged";
    case InnerStatus::kBudgetExhausted:
      return "budget-exhausted";
    case InnerStatus::kTimeLimit:
      return "time-limit";
    case InnerStatus::kStalled:
      return "stalled";
  }
  return "unknown";
}

std::string to_string(OuterStatus s) {
  switch (s) {
    case OuterStatus::kTargetReached:
      return "target-reached";
    case OuterStatus::kMaxOuter:
      return "max-outer";
    case OuterStatus::kTimeLimit:
      return "time-limit";
    case OuterStatus::kMuUnderflow:
      return "mu-underflow";
    case OuterStatus::kInnerBudget:
      return "inner-budget";
    case OuterStatus::kStalled:
      return "stalled";
  }
  return "unknown";
}

Reductions reductions(const RicoProblem& p, const PrimalDualPair& w, double mu,
                      const TangentVector& d) {
  const PointEvaluation e = evaluate(p, w.x);
  const trs::TrsInstance inst = barrier_model(p, e, w.lambda, mu, 1.0);
  const ManifoldPoint x_new = p.manifold->retract(w.x, d);
  Reductions r;
  r.ared = merit(e, mu) - merit(p, x_new, mu);
  r.pred = -trs::model_value(inst, d);
  return r;
}

double tr_radius_update(double delta, double ared, double pred, double d_norm,
                        double delta_max) {
  if (!(pred > 0.0) || ared < 0.25 * pred) {
    return 0.25 * delta;
  }
  const bool on_boundary = std::abs(d_norm - delta) <= 1e-12 * delta;
  if (ared >= 0.75 * pred && on_boundary) {
    return std::min(2.0 * delta, delta_max);
  }
  return delta;
}

Eigen::VectorXd dual_newton_step(const RicoProblem& p, const PointEvaluation& e,
                                 const Eigen::VectorXd& lambda, double mu,
                                 const TangentVector& d) {
  const int m = p.num_constraints();
  Eigen::VectorXd step(m);
  for (int i = 0; i < m; ++i) {
    if (!(e.g(i) > 0.0)) {
      throw NotStrictlyFeasible("dual_newton_step: g_" + std::to_string(i) +
                                " is not strictly positive");
    }
    const double slope = p.manifold->inner(e.x, e.rgrad_g[i], d);
    step(i) = -lambda(i) + mu / e.g(i) - lambda(i) / e.g(i) * slope;
  }
  return step;
}

Eigen::VectorXd dual_newton_step(const RicoProblem& p, const PrimalDualPair& w, double mu,
                                 const TangentVector& d) {
  return dual_newton_step(p, evaluate(p, w.x), w.lambda, mu, d);
}

ClipBounds clip_bounds(const Eigen::VectorXd& lambda_prev, double mu, const Eigen::VectorXd& g_new,
                       double c_lo, double c_hi) {
  const Eigen::Index m = lambda_prev.size();
  if (g_new.size() != m) {
    throw InvalidInput("clip_bounds: dimension mismatch");
  }
  ClipBounds b{Eigen::VectorXd(m), Eigen::VectorXd(m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(g_new(i) > 0.0)) {
      throw NotStrictlyFeasible("clip_duals: g_new is not strictly positive");
    }
    b.lo(i) = c_lo * std::min({1.0, lambda_prev(i), mu / g_new(i)});
    b.hi(i) = std::max({c_hi, lambda_prev(i), c_hi / mu, c_hi / g_new(i)});
  }
  return b;
}

Eigen::VectorXd clip_duals(const Eigen::VectorXd& raw, const Eigen::VectorXd& lambda_prev,
                           double mu, const Eigen::VectorXd& g_new, double c_lo, double c_hi) {
  if (raw.size() != lambda_prev.size()) {
    throw InvalidInput("clip_duals: dimension mismatch");
  }
  const ClipBounds b = clip_bounds(lambda_prev, mu, g_new, c_lo, c_hi);
  Eigen::VectorXd out(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    out(i) = std::max(b.lo(i), std::min(b.hi(i), raw(i)));
  }
  return out;
}

double condensed_min_eig(const PointEvaluation& e, const Eigen::VectorXd& lambda,
                         const CurvatureMatrices& c) {
  if ((e.g.array() <= 0.0).any() || (lambda.array() <= 0.0).any()) {
    throw InvalidState("condensed_min_eig: requires g(x) > 0 and lambda > 0");
  }
  const Eigen::VectorXd weights = lambda.array() / e.g.array();
  const Eigen::MatrixXd h =
      c.hess_lagrangian + c.constraint_grads * weights.asDiagonal() * c.constraint_grads.transpose();
  return linalg::min_eigenvalue(0.5 * (h + h.transpose()));
}

double condensed_min_eig(const RicoProblem& p, const PointEvaluation& e,
                         const Eigen::VectorXd& lambda) {
  return condensed_min_eig(e, lambda,
                           curvature_matrices(p, e, lambda, p.manifold->tangent_basis(e.x)));
}

StoppingReport stopping_satisfied(const RicoProblem& p, const PointEvaluation& e,
                                  const Eigen::VectorXd& lambda, double mu,
                                  const StoppingConditions& conds) {
  StoppingReport rep;
  const int m = p.num_constraints();
  rep.min_g = m > 0 ? e.g.minCoeff() : std::numeric_limits<double>::infinity();
  rep.min_lambda = m > 0 ? lambda.minCoeff() : std::numeric_limits<double>::infinity();
  rep.grad_norm = p.manifold->norm(e.x, grad_lagrangian(p, e, lambda));
  rep.compl_norm = (lambda.array() * e.g.array() - mu).matrix().norm();

  const bool interior = !(rep.min_g <= 0.0) && !(rep.min_lambda <= 0.0);
  rep.satisfied = interior && rep.grad_norm <= conds.sigma_grad(mu) &&
                  rep.compl_norm <= std::max(conds.sigma_compl(mu), kComplToleranceFloor);
  if (rep.satisfied && conds.second_order) {
    rep.min_eig = condensed_min_eig(p, e, lambda);
    rep.satisfied = rep.min_eig >= -conds.sigma_sosp(mu);
  }
  return rep;
}

StoppingReport stopping_satisfied(const RicoProblem& p, const PrimalDualPair& w, double mu,
                                  const StoppingConditions& conds) {
  return stopping_satisfied(p, evaluate(p, w.x), w.lambda, mu, conds);
}

InnerResult inner_solve(const RicoProblem& p, const PrimalDualPair& w0, double mu, double delta0,
                        const StoppingConditions& conds, const InnerConfig& cfg,
                        const SolverObserver* observer, int outer_index) {
  cfg.validate();
  if (!(mu > 0.0)) throw InvalidInput("inner_solve: mu must be positive");
  if (!(delta0 > 0.0 && delta0 <= cfg.delta_max)) {
    throw InvalidInput("inner_solve: delta0 must lie in (0, delta_max]");
  }
  const Manifold& manifold = *p.manifold;

  PointEvaluation current = evaluate(p, w0.x);
  Eigen::VectorXd lambda = w0.lambda;
  if (!current.strictly_feasible() || (lambda.array() <= 0.0).any()) {
    throw InvalidInput("inner_solve: initial point must satisfy g(x) > 0 and lambda > 0");
  }
  double merit_current = merit(current, mu);
  double delta = delta0;

  InnerResult result;
  auto notify = [&](const InnerIterationRecord& rec, const PointEvaluation& e,
                    const Eigen::VectorXd& lam) {
    if (observer && observer->on_inner) observer->on_inner(outer_index, mu, rec, e, lam);
  };
  auto finish = [&](InnerStatus status) {
    result.w = {current.x, lambda};
    result.delta_final = delta;
    result.status = status;
    return result;
  };

  for (int ell = 0;; ++ell) {
    if (ell >= cfg.max_inner_iters) return finish(InnerStatus::kBudgetExhausted);
    if (deadline_passed(cfg.deadline)) return finish(InnerStatus::kTimeLimit);
    if (!(delta >= cfg.min_radius)) return finish(InnerStatus::kStalled);

    const trs::TrsInstance inst = barrier_model(p, current, lambda, mu, delta);
    const trs::TrsSolution sol = trs::solve(inst, cfg.subsolver, cfg.tcg, cfg.exact_tol);
    const TangentVector& d = sol.d;
    const double d_norm = manifold.norm(current.x, d);

    InnerIterationRecord rec;
    rec.ell = ell;
    rec.delta = delta;
    rec.d_norm = d_norm;
    rec.trs_status = sol.status;
    rec.lambda_prev = lambda;
    rec.merit_before = merit_current;

    const Eigen::VectorXd dual_step = dual_newton_step(p, current, lambda, mu, d);
    rec.dual_raw = lambda + dual_step;
    PointEvaluation trial = evaluate(p, manifold.retract(current.x, d));
    rec.g_new = trial.g;

    const StoppingReport stop = stopping_satisfied(p, trial, rec.dual_raw, mu, conds);
    if (stop.satisfied) {
      rec.converged = true;
      rec.feasible_retraction = true;
      rec.delta_next = delta;
      current = std::move(trial);
      lambda = rec.dual_raw;
      merit_current = merit(current, mu);
      rec.merit_after = merit_current;
      notify(rec, current, lambda);
      result.records.push_back(std::move(rec));
      return finish(InnerStatus::kConverged);
    }

    if (d_norm == 0.0) {
      if (inst.norm(inst.grad) != 0.0) {
        throw SolverFailure("inner_solve: subsolver returned a zero step with a nonzero "
                            "barrier gradient");
      }
      rec.stalled = true;
      rec.delta_next = delta;
      rec.merit_after = merit_current;
      notify(rec, current, lambda);
      result.records.push_back(std::move(rec));
      return finish(InnerStatus::kStalled);
    }

    if (!trial.strictly_feasible()) {
      rec.feasible_retraction = false;
      delta = cfg.contract_coeff * d_norm;
      rec.delta_next = delta;
      rec.merit_after = merit_current;
      notify(rec, current, lambda);
      result.records.push_back(std::move(rec));
      continue;
    }
    rec.feasible_retraction = true;
    rec.pred = sol.model_decrease;

    if (rec.pred <= pred_noise_floor(merit_current, cfg.pred_noise)) {
      rec.stalled = true;
      rec.delta_next = delta;
      rec.merit_after = merit_current;
      notify(rec, current, lambda);
      result.records.push_back(std::move(rec));
      return finish(InnerStatus::kStalled);
    }

    const double merit_trial = merit(trial, mu);
    rec.ared = merit_current - merit_trial;
    rec.rho = rec.pred != 0.0 ? rec.ared / rec.pred : 0.0;
    rec.delta_next = tr_radius_update(delta, rec.ared, rec.pred, d_norm, cfg.delta_max);
    rec.accepted = rec.pred > 0.0 && rec.ared > cfg.eta * rec.pred;

    if (rec.accepted) {
      rec.dual_clipped =
          clip_duals(rec.dual_raw, lambda, mu, trial.g, cfg.clip_c_lo, cfg.clip_c_hi);
      lambda = rec.dual_clipped;
      current = std::move(trial);
      merit_current = merit_trial;
    }
    delta = rec.delta_next;
    rec.merit_after = merit_current;
    notify(rec, current, lambda);
    result.records.push_back(std::move(rec));
  }
}

double pred_noise_floor(double merit, double pred_noise) {
  return pred_noise * std::numeric_limits<double>::epsilon() * std::abs(merit);
}

double default_initial_radius(const RicoProblem& p, const OuterConfig& cfg) {
  if (cfg.delta_hat0) return *cfg.delta_hat0;
  return std::min(p.manifold->scale() / 8.0, cfg.inner.delta_max);
}

OuterResult outer_solve(const RicoProblem& p, const PrimalDualPair& w0, const OuterConfig& cfg,
                        const SolverObserver* observer) {
  cfg.validate();
  if (w0.lambda.size() != p.num_constraints()) {
    throw InvalidInput("outer_solve: multiplier vector has the wrong length");
  }
  if (!strict_feasible(p, w0.x) || (w0.lambda.array() <= 0.0).any()) {
    throw InvalidInput("outer_solve: initial point must satisfy g(x) > 0 and lambda > 0");
  }

  InnerConfig inner_cfg = cfg.inner;
  if (std::isfinite(cfg.budget_s)) {
    const auto budget = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(cfg.budget_s));
    const auto deadline = Clock::now() + budget;
    inner_cfg.deadline = inner_cfg.deadline ? std::min(*inner_cfg.deadline, deadline) : deadline;
  }

  OuterResult out;
  out.w = w0;
  double mu = cfg.mu0;
  double delta_hat = default_initial_radius(p, cfg);

  for (int k = 0;; ++k) {
    if (k >= cfg.max_outer) {
      out.status = OuterStatus::kMaxOuter;
      break;
    }
    InnerResult inner =
        inner_solve(p, out.w, mu, delta_hat, cfg.stopping, inner_cfg, observer, k);

    OuterRecord rec;
    rec.k = k;
    rec.mu = mu;
    rec.delta_hat = delta_hat;
    rec.delta_final = inner.delta_final;
    rec.inner_status = inner.status;
    rec.inner_iterations = static_cast<int>(inner.records.size());
    out.w = inner.w;

    const PointEvaluation e = evaluate(p, out.w.x);
    rec.residual = kkt_residual(p, e, out.w.lambda);
    for (auto& r : inner.records) {
      out.inner.push_back(std::move(r));
      out.outer_of_record.push_back(k);
    }
    out.outer.push_back(rec);
    if (observer && observer->on_outer) observer->on_outer(k, mu, inner.status, e, out.w.lambda);

    delta_hat = std::max(inner.delta_final, cfg.delta_bar);

    if (rec.residual.total <= cfg.target_residual) {
      out.status = OuterStatus::kTargetReached;
      break;
    }
    if (inner.status == InnerStatus::kTimeLimit) {
      out.status = OuterStatus::kTimeLimit;
      break;
    }
    if (inner.status == InnerStatus::kBudgetExhausted) {
      out.status = OuterStatus::kInnerBudget;
      break;
    }
    if (inner.status == InnerStatus::kStalled) {
      out.status = OuterStatus::kStalled;
      break;
    }
    mu = cfg.mu_update(mu);
    if (!(mu >= cfg.mu_min)) {
      out.status = OuterStatus::kMuUnderflow;
      break;
    }
  }
  return out;
}

}  // namespace riptrm
