#include "riptrm/bench/runner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <spdlog/spdlog.h>

#include "riptrm/error.hpp"

namespace riptrm::bench {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kAnalytic1d:
      return "analytic-1d";
    case ProblemKind::kRosenbrockGrassmann:
      return "rosenbrock-grassmann";
    case ProblemKind::kStableLinsys:
      return "stable-linsys";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "analytic-1d") return ProblemKind::kAnalytic1d;
  if (name == "rosenbrock-grassmann") return ProblemKind::kRosenbrockGrassmann;
  if (name == "stable-linsys") return ProblemKind::kStableLinsys;
  throw InvalidInput("unknown problem '" + name +
                     "' (expected rosenbrock-grassmann, stable-linsys or analytic-1d)");
}

namespace {

StableLinSysSpec seeded_linsys(const RunConfig& cfg) {
  StableLinSysSpec spec = cfg.linsys;
  spec.seed = cfg.seed;
  return spec;
}

OuterConfig solver_config(const RunConfig& cfg, const RicoProblem& p) {
  OuterConfig oc = cfg.outer_config();
  if (!oc.delta_hat0) oc.delta_hat0 = default_initial_radius(p, oc);
  return oc;
}

double compl_norm(const PointEvaluation& e, const Eigen::VectorXd& lambda, double mu) {
  return (lambda.array() * e.g.array() - mu).matrix().norm();
}

double min_or_inf(const Eigen::VectorXd& v) {
  return v.size() ? v.minCoeff() : std::numeric_limits<double>::infinity();
}

struct RowBuilder {
  const RicoProblem& p;
  const RunConfig& cfg;
  Clock::time_point start;

  RunRecord point_row(const PointEvaluation& e, const Eigen::VectorXd& lambda, double mu) const {
    RunRecord r;
    r.elapsed_s = cfg.deterministic
                      ? 0.0
                      : std::chrono::duration<double>(Clock::now() - start).count();
    r.mu = mu;
    r.f = e.f;
    r.merit = merit(e, mu);
    const ResidualBreakdown res = kkt_residual(p, e, lambda);
    r.residual_total = res.total;
    r.grad_lag_norm = res.grad_lag_norm;
    r.compl_norm = compl_norm(e, lambda, mu);
    const CurvatureMatrices c =
        curvature_matrices(p, e, lambda, p.manifold->tangent_basis(e.x));
    r.min_eig_H = (lambda.array() > 0.0).all() ? condensed_min_eig(e, lambda, c)
                                                : std::numeric_limits<double>::quiet_NaN();
    r.second_order_measure = second_order_measure(e, c, cfg.active_tol);
    r.min_g = min_or_inf(e.g);
    r.min_lambda = min_or_inf(lambda);
    r.x = e.x.coords;
    r.lambda = lambda;
    return r;
  }
};

std::string inner_status(const InnerIterationRecord& rec) {
  if (rec.converged) return "converged";
  if (rec.stalled) return "stalled";
  if (!rec.feasible_retraction) return "infeasible";
  return rec.accepted ? "accepted" : "rejected";
}

bool close(double a, double b, double rel) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= rel * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

RicoProblem make_problem(const RunConfig& cfg) {
  switch (cfg.problem) {
    case ProblemKind::kAnalytic1d:
      return build_analytic_1d().problem;
    case ProblemKind::kRosenbrockGrassmann:
      return build_rosenbrock_grassmann(cfg.rosenbrock).problem;
    case ProblemKind::kStableLinsys:
      return build_stable_linsys(seeded_linsys(cfg)).instance.problem;
  }
  throw InvalidInput("unknown problem kind");
}

PrimalDualPair make_start(const RunConfig& cfg, const RicoProblem& p) {
  switch (cfg.problem) {
    case ProblemKind::kAnalytic1d:
      return build_analytic_1d().start;
    case ProblemKind::kRosenbrockGrassmann:
      return build_rosenbrock_grassmann(cfg.rosenbrock).start;
    case ProblemKind::kStableLinsys: {
      PrimalDualPair w;
      w.x = find_interior_point(p, cfg.seed, cfg.feasibility);
      w.lambda = Eigen::VectorXd::Ones(p.num_constraints());
      return w;
    }
  }
  throw InvalidInput("unknown problem kind");
}

RunResult run_solver(const RunConfig& cfg) {
  cfg.validate();
  const RicoProblem p = make_problem(cfg);
  const PrimalDualPair start = make_start(cfg, p);
  return run_solver(cfg, p, start);
}

RunResult run_solver(const RunConfig& cfg, const RicoProblem& p, const PrimalDualPair& start) {
  cfg.validate();
  const OuterConfig oc = solver_config(cfg, p);
  const Clock::time_point t0 = Clock::now();
  RowBuilder rows{p, cfg, t0};
  RunResult out;

  {
    const PointEvaluation e = evaluate(p, start.x);
    RunRecord r = rows.point_row(e, start.lambda, oc.mu0);
    r.outer_iter = 0;
    r.delta = *oc.delta_hat0;
    r.delta_next = *oc.delta_hat0;
    r.feasible_retraction = true;
    r.status = "initial";
    out.records.push_back(std::move(r));
  }

  SolverObserver obs;
  obs.on_inner = [&](int k, double mu, const InnerIterationRecord& rec, const PointEvaluation& e,
                     const Eigen::VectorXd& lambda) {
    RunRecord r = rows.point_row(e, lambda, mu);
    r.outer_iter = k;
    r.inner_iter = rec.ell;
    r.delta = rec.delta;
    r.delta_next = rec.delta_next;
    r.ared = rec.ared;
    r.pred = rec.pred;
    r.d_norm = rec.d_norm;
    r.accepted = rec.accepted;
    r.feasible_retraction = rec.feasible_retraction;
    r.lambda_prev = rec.lambda_prev;
    r.dual_raw = rec.dual_raw;
    r.dual_clipped = rec.dual_clipped;
    r.g_new = rec.g_new;
    r.status = inner_status(rec);
    spdlog::debug("outer {} inner {}: {} delta={:.3e} |d|={:.3e} merit={:.10e}", k, rec.ell,
                  r.status, rec.delta, rec.d_norm, r.merit);
    out.records.push_back(std::move(r));
  };
  double last_delta_final = 0.0;
  obs.on_outer = [&](int k, double mu, InnerStatus status, const PointEvaluation& e,
                     const Eigen::VectorXd& lambda) {
    RunRecord r = rows.point_row(e, lambda, mu);
    r.outer_iter = k;
    r.status = "outer:" + to_string(status);
    r.feasible_retraction = true;
    spdlog::info("outer {}: mu={:.3e} status={} residual={:.3e} f={:.10e}", k, mu,
                 to_string(status), r.residual_total, r.f);
    out.records.push_back(std::move(r));
  };

  out.solver = outer_solve(p, start, oc, &obs);

  // Radius bookkeeping of the outer rows comes from the solver's own records.
  std::size_t outer_idx = 0;
  for (auto& r : out.records) {
    if (r.status.rfind("outer:", 0) == 0 && outer_idx < out.solver.outer.size()) {
      const OuterRecord& o = out.solver.outer[outer_idx++];
      last_delta_final = o.delta_final;
      r.delta = o.delta_final;
      r.delta_next = std::max(o.delta_final, oc.delta_bar);
    }
  }

  const PointEvaluation fe = evaluate(p, out.solver.w.x);
  const double final_mu = out.solver.outer.empty() ? oc.mu0 : out.solver.outer.back().mu;
  RunRecord fin = rows.point_row(fe, out.solver.w.lambda, final_mu);
  fin.outer_iter = out.solver.outer.empty() ? 0 : out.solver.outer.back().k;
  fin.delta = last_delta_final;
  fin.delta_next = std::max(last_delta_final, oc.delta_bar);
  fin.feasible_retraction = true;
  fin.status = "final:" + to_string(out.solver.status);
  out.final_residual = kkt_residual(p, fe, out.solver.w.lambda);
  out.final_second_order = fin.second_order_measure;
  out.records.push_back(std::move(fin));
  out.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

VerifyReport verify_trace(const RunConfig& cfg, const RicoProblem& p,
                          const std::vector<RunRecord>& rows) {
  VerifyReport rep;
  auto issue = [&rep](int row, const std::string& msg) { rep.issues.push_back({row, msg}); };
  if (rows.empty()) {
    issue(0, "trace has no data rows");
    return rep;
  }
  const OuterConfig oc = solver_config(cfg, p);
  const InnerConfig& ic = oc.inner;
  constexpr double kRel = 1e-10;
  const int m = p.num_constraints();

  const RunRecord* prev_inner = nullptr;
  const RunRecord* last_outer = nullptr;
  double expected_mu = oc.mu0;
  int current_outer = -1;

  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    const RunRecord& r = rows[idx];
    const int row = static_cast<int>(idx) + 1;
    std::ostringstream msg;

    if (r.x.size() != p.manifold->ambient_size() || r.lambda.size() != m) {
      issue(row, "point or multiplier has the wrong dimension");
      continue;
    }
    const PointEvaluation e = evaluate(p, {r.x});
    if (!e.strictly_feasible()) issue(row, "iterate is not strictly feasible");
    if (!(r.lambda.array() > 0.0).all()) issue(row, "multiplier is not positive");
    const ResidualBreakdown res = kkt_residual(p, e, r.lambda);
    if (!close(res.total, r.residual_total, kRel)) {
      msg << "residual_total " << r.residual_total << " differs from recomputed " << res.total;
      issue(row, msg.str());
      msg.str("");
    }

    if (r.is_inner()) {
      if (r.outer_iter != current_outer) {
        if (current_outer >= 0 && last_outer == nullptr) {
          issue(row, "outer iteration changed without a summary row");
        }
        current_outer = r.outer_iter;
        if (r.mu != expected_mu) {
          msg << "mu " << r.mu << " does not follow the barrier schedule (expected "
              << expected_mu << ")";
          issue(row, msg.str());
          msg.str("");
        }
        const double expected_delta = last_outer ? last_outer->delta_next : *oc.delta_hat0;
        if (r.inner_iter == 0 && r.delta != expected_delta) {
          msg << "initial radius " << r.delta << " differs from " << expected_delta;
          issue(row, msg.str());
          msg.str("");
        }
        prev_inner = nullptr;
        last_outer = nullptr;
      }
      if (r.delta > ic.delta_max) issue(row, "radius exceeds delta_max");
      if (prev_inner && r.delta != prev_inner->delta_next) {
        issue(row, "radius differs from the previous row's delta_next");
      }
      if (r.accepted) {
        if (!r.feasible_retraction) issue(row, "accepted step with infeasible retraction");
        if (!(r.ared > ic.eta * r.pred)) {
          msg << "accepted step violates ared > eta * pred (ared = " << r.ared
              << ", pred = " << r.pred << ")";
          issue(row, msg.str());
          msg.str("");
        }
        if (r.g_new.size() != m || r.lambda_prev.size() != m || r.dual_clipped.size() != m) {
          issue(row, "accepted step lacks dual bookkeeping");
        } else {
          const ClipBounds b = clip_bounds(r.lambda_prev, r.mu, r.g_new, ic.clip_c_lo, ic.clip_c_hi);
          if ((r.dual_clipped.array() < b.lo.array()).any() ||
              (r.dual_clipped.array() > b.hi.array()).any()) {
            issue(row, "clipped multiplier outside [zeta_min, zeta_max]");
          }
          if (r.dual_clipped != r.lambda) issue(row, "carried multiplier is not the clipped one");
        }
        if (prev_inner && r.merit > prev_inner->merit) {
          msg << "merit increased over an accepted step (" << prev_inner->merit << " -> "
              << r.merit << ")";
          issue(row, msg.str());
          msg.str("");
        }
      } else if (r.status == "rejected" && r.pred > 0.0 && r.ared > ic.eta * r.pred) {
        issue(row, "successful step was rejected");
      }
      if (r.status == "stalled") {
        if (r.delta_next != r.delta) issue(row, "stalled row changed the radius");
        if (r.d_norm != 0.0 && r.pred > pred_noise_floor(r.merit, ic.pred_noise)) {
          issue(row, "stall declared although pred is above the rounding floor");
        }
      }
      if (r.status == "infeasible" && r.delta_next != ic.contract_coeff * r.d_norm) {
        issue(row, "radius after an infeasible retraction is not contract_coeff * |d|");
      }
      if (r.status == "accepted" || r.status == "rejected") {
        const double expect = tr_radius_update(r.delta, r.ared, r.pred, r.d_norm, ic.delta_max);
        if (r.delta_next != expect) issue(row, "radius update does not follow the ratio rule");
      }
      prev_inner = &r;
    } else if (r.status.rfind("outer:", 0) == 0) {
      if (r.delta_next != std::max(r.delta, oc.delta_bar)) {
        issue(row, "next initial radius is not max(delta_final, delta_bar)");
      }
      last_outer = &r;
      expected_mu = oc.mu_update(r.mu);
    }
  }

  const RunRecord& fin = rows.back();
  if (fin.status.rfind("final:", 0) != 0) {
    issue(static_cast<int>(rows.size()), "last row is not a final summary");
  }
  if (fin.x.size() == p.manifold->ambient_size() && fin.lambda.size() == m) {
    const PointEvaluation e = evaluate(p, {fin.x});
    rep.final_residual = kkt_residual(p, e, fin.lambda).total;
    rep.final_second_order =
        second_order_measure(p, e, fin.lambda, cfg.active_tol, p.manifold->tangent_basis(e.x));
    if (!close(rep.final_second_order, fin.second_order_measure, 1e-8)) {
      std::ostringstream msg;
      msg << "second_order_measure " << fin.second_order_measure << " differs from recomputed "
          << rep.final_second_order;
      issue(static_cast<int>(rows.size()), msg.str());
    }
  }
  return rep;
}

std::string repeat_path(const std::string& path, int r) {
  if (path.empty()) return path;
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  const std::string tag = "-r" + std::to_string(r);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash) || dot == 0) {
    return path + tag;
  }
  return path.substr(0, dot) + tag + path.substr(dot);
}

}  // namespace riptrm::bench
