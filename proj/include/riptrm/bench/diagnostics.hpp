#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riptrm/problem.hpp"
#include "riptrm/trs.hpp"

namespace riptrm::bench {

/// Finite-difference report for one oracle along one random tangent direction.
struct OracleCheck {
  std::string oracle;  // "f" or "g<i>"
  /// Central difference of t -> h(R_x(tv)) at step 1e-5 against <grad h, v>.
  double grad_rel_err = 0.0;
  /// Central difference of the ambient gradient against ehess_apply.
  double hess_rel_err = 0.0;
  /// Log-log slopes of the first- and second-order Taylor remainders, taken
  /// on the odd and even parts of t -> h(R_x(tv)); correct oracles give 3 and 4.
  double grad_slope = 0.0;
  double hess_slope = 0.0;
  /// The Taylor remainder was at rounding level for every step, so no slope
  /// could be measured (the model is exact along this direction).
  bool grad_exact = false;
  bool hess_exact = false;
  bool pass = false;
};

struct GradcheckOptions {
  double fd_step = 1e-5;
  double rel_tol = 1e-5;
  double min_grad_slope = 2.0;
  double min_hess_slope = 3.0;
  /// Slope tolerance for the fitted slopes.
  double slope_slack = 0.1;
};

/// Checks the objective and every constraint at x along a seeded tangent.
std::vector<OracleCheck> gradcheck(const RicoProblem& p, const ManifoldPoint& x,
                                   std::uint64_t seed, const GradcheckOptions& opts = {});

/// Median local slope of log(residual) against log(t) over the smallest steps
/// whose residual stays above noise_floor. Returns NaN when fewer than three
/// such points exist.
double taylor_slope(const std::vector<double>& steps, const std::vector<double>& residuals,
                    double noise_floor);

struct TrsBenchRow {
  int index = 0;
  int dim = 0;
  bool hard_case = false;
  double radius = 0.0;
  double model_cauchy = 0.0;
  double model_tcg = 0.0;
  double model_exact = 0.0;
  double cauchy_bound = 0.0;
  bool exact_verified = false;
  bool pass = false;
  std::string note;
};

struct TrsBenchOptions {
  int count = 1000;
  int max_dim = 10;
  double hard_fraction = 0.1;
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

/// Random instance i of a benchmark sweep; hard-case instances have the
/// gradient orthogonal to the bottom eigenspace and a radius beyond the
/// pseudo-inverse step.
trs::TrsInstance random_trs_instance(std::uint64_t seed, int index, int dim, bool hard_case);

/// Runs every subsolver on random instances and checks optimality of the
/// exact step, the Cauchy decrease bound and the model ordering.
std::vector<TrsBenchRow> trs_bench(const TrsBenchOptions& opts);

}  // namespace riptrm::bench
