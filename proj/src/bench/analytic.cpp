#include <memory>

#include "riptrm/bench/problems.hpp"
#include "riptrm/manifolds.hpp"

namespace riptrm::bench {

ProblemInstance build_analytic_1d() {
  using Eigen::VectorXd;
  RicoProblem p;
  p.name = "analytic-1d";
  p.manifold = std::make_shared<Euclidean>(1);
  p.objective.value = [](const ManifoldPoint& x) { return x.coords(0); };
  p.objective.egrad = [](const ManifoldPoint&) { return VectorXd::Ones(1).eval(); };
  p.objective.ehess_apply = [](const ManifoldPoint&, const VectorXd&) {
    return VectorXd::Zero(1).eval();
  };
  FunctionOracle g;
  g.value = [](const ManifoldPoint& x) { return x.coords(0) - 1.0; };
  g.egrad = [](const ManifoldPoint&) { return VectorXd::Ones(1).eval(); };
  g.ehess_apply = [](const ManifoldPoint&, const VectorXd&) { return VectorXd::Zero(1).eval(); };
  p.constraints.push_back(std::move(g));

  ProblemInstance inst;
  inst.problem = std::move(p);
  inst.start.x.coords = VectorXd::Constant(1, 2.0);
  inst.start.lambda = VectorXd::Ones(1);
  return inst;
}

}  // namespace riptrm::bench
