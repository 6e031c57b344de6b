#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riptrm/bench/config.hpp"
#include "riptrm/bench/trace.hpp"
#include "riptrm/solver.hpp"

namespace riptrm::bench {

/// The configured problem. Deterministic in the config, so `verify` can
/// rebuild exactly the problem a trace was produced for.
RicoProblem make_problem(const RunConfig& cfg);

/// Initial primal-dual pair; runs the feasibility phase where the problem has
/// no prescribed start.
PrimalDualPair make_start(const RunConfig& cfg, const RicoProblem& p);

struct RunResult {
  OuterResult solver;
  std::vector<RunRecord> records;
  ResidualBreakdown final_residual;
  double final_second_order = 0.0;
  double wall_s = 0.0;
};

/// Builds the problem, finds the start and runs the solver, recording one row
/// per inner iteration plus initial, outer-summary and final rows.
RunResult run_solver(const RunConfig& cfg);
RunResult run_solver(const RunConfig& cfg, const RicoProblem& p, const PrimalDualPair& start);

struct VerifyIssue {
  /// 1-based data row, or 0 for trace-level problems.
  int row = 0;
  std::string message;
};

struct VerifyReport {
  std::vector<VerifyIssue> issues;
  double final_residual = 0.0;
  double final_second_order = 0.0;

  bool ok() const { return issues.empty(); }
};

/// Re-derives the residual, feasibility, acceptance, radius, clipping, merit
/// and barrier-schedule bookkeeping from a trace.
VerifyReport verify_trace(const RunConfig& cfg, const RicoProblem& p,
                          const std::vector<RunRecord>& rows);

/// Path for run r of a `--repeat` sweep: "trace.csv" -> "trace-r2.csv".
std::string repeat_path(const std::string& path, int r);

}  // namespace riptrm::bench
