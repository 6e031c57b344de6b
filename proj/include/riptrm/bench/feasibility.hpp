#pragma once

#include <cstdint>
#include <optional>

#include "riptrm/problem.hpp"

namespace riptrm::bench {

struct FeasibilityOptions {
  double tol = 1e-3;
  int max_restarts = 50;
  int max_iters = 2000;
  double armijo_c = 1e-4;
  double initial_step = 1.0;
  int max_backtracks = 60;
};

/// Point with min_i g_i(x) >= tol found by Armijo-backtracked Riemannian
/// gradient descent on sum_i max(0, 2 tol - g_i)^2 from seeded random starts.
/// A warm start that already meets the tolerance is returned unchanged.
///
/// Throws FeasibilityFailure when every restart fails.
ManifoldPoint find_interior_point(const RicoProblem& p, std::uint64_t seed,
                                  const FeasibilityOptions& opts = {},
                                  const std::optional<ManifoldPoint>& warm_start = std::nullopt);

}  // namespace riptrm::bench
