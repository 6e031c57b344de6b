#include "riptrm/bench/feasibility.hpp"

#include <cmath>
#include <string>

#include "riptrm/error.hpp"

namespace riptrm::bench {

namespace {

double min_value(const Eigen::VectorXd& g) {
  return g.size() ? g.minCoeff() : std::numeric_limits<double>::infinity();
}

double penalty(const Eigen::VectorXd& g, double target) {
  return (target - g.array()).max(0.0).square().sum();
}

// Returns true once the tolerance is met; x is updated in place.
bool descend(const RicoProblem& p, ManifoldPoint& x, const FeasibilityOptions& opts) {
  const Manifold& m = *p.manifold;
  const double target = 2.0 * opts.tol;
  double step = opts.initial_step;
  for (int it = 0; it < opts.max_iters; ++it) {
    const Eigen::VectorXd g = constraint_values(p, x);
    if (!std::isfinite(g.sum())) return false;
    if (min_value(g) >= opts.tol) return true;
    const double psi = penalty(g, target);

    TangentVector grad = m.zero_tangent();
    for (int i = 0; i < p.num_constraints(); ++i) {
      const double slack = target - g(i);
      if (slack > 0.0) {
        grad.coords -= 2.0 * slack * m.egrad_to_rgrad(x, p.constraints[i].egrad(x)).coords;
      }
    }
    const double gnorm2 = m.inner(x, grad, grad);
    if (!(gnorm2 > 0.0)) return false;

    bool moved = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      ManifoldPoint trial;
      try {
        trial = m.retract(x, -step * grad);
      } catch (const Error&) {
        step *= 0.5;
        continue;
      }
      const double psi_trial = penalty(constraint_values(p, trial), target);
      if (std::isfinite(psi_trial) && psi_trial <= psi - opts.armijo_c * step * gnorm2) {
        x = std::move(trial);
        moved = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!moved) return false;
  }
  return min_value(constraint_values(p, x)) >= opts.tol;
}

}  // namespace

ManifoldPoint find_interior_point(const RicoProblem& p, std::uint64_t seed,
                                  const FeasibilityOptions& opts,
                                  const std::optional<ManifoldPoint>& warm_start) {
  if (!(opts.tol > 0.0)) throw InvalidInput("find_interior_point: tol must be positive");
  if (warm_start && min_value(constraint_values(p, *warm_start)) >= opts.tol) {
    return *warm_start;
  }
  for (int attempt = 0; attempt < opts.max_restarts; ++attempt) {
    ManifoldPoint x = (attempt == 0 && warm_start)
                          ? *warm_start
                          : p.manifold->sample_point(seed + static_cast<std::uint64_t>(attempt));
    if (descend(p, x, opts)) return x;
  }
  throw FeasibilityFailure("find_interior_point: no point with min g >= " +
                           std::to_string(opts.tol) + " after " +
                           std::to_string(opts.max_restarts) + " restarts");
}

}  // namespace riptrm::bench
