#include "riptrm/problem.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "riptrm/error.hpp"
#include "riptrm/linalg.hpp"

namespace riptrm {

namespace {

// Barrier quantities divide by g_i; anything below this is treated as the
// boundary.
constexpr double kBarrierGuard = 1e-300;

void require_strictly_feasible(const Eigen::VectorXd& g, const char* op) {
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (!(g(i) >= kBarrierGuard)) {
      throw NotStrictlyFeasible(std::string(op) + ": g_" + std::to_string(i) + " = " +
                                std::to_string(g(i)) + " is not strictly positive");
    }
  }
}

void require_lambda_size(const RicoProblem& p, const Eigen::VectorXd& lambda, const char* op) {
  if (lambda.size() != p.num_constraints()) {
    throw InvalidInput(std::string(op) + ": multiplier vector has length " +
                       std::to_string(lambda.size()) + ", expected " +
                       std::to_string(p.num_constraints()));
  }
}

Eigen::VectorXd egrad_lagrangian(const PointEvaluation& e, const Eigen::VectorXd& lambda) {
  Eigen::VectorXd out = e.egrad_f;
  for (std::size_t i = 0; i < e.egrad_g.size(); ++i) {
    out -= lambda(Eigen::Index(i)) * e.egrad_g[i];
  }
  return out;
}

}  // namespace

bool PointEvaluation::strictly_feasible() const { return (g.array() > 0.0).all(); }

PointEvaluation evaluate(const RicoProblem& p, const ManifoldPoint& x) {
  PointEvaluation e;
  e.x = x;
  e.f = p.objective.value(x);
  e.egrad_f = p.objective.egrad(x);
  e.rgrad_f = p.manifold->egrad_to_rgrad(x, e.egrad_f);
  const int m = p.num_constraints();
  e.g.resize(m);
  e.egrad_g.reserve(m);
  e.rgrad_g.reserve(m);
  for (int i = 0; i < m; ++i) {
    const FunctionOracle& c = p.constraints[i];
    e.g(i) = c.value(x);
    e.egrad_g.push_back(c.egrad(x));
    e.rgrad_g.push_back(p.manifold->egrad_to_rgrad(x, e.egrad_g.back()));
  }
  return e;
}

Eigen::VectorXd constraint_values(const RicoProblem& p, const ManifoldPoint& x) {
  Eigen::VectorXd g(p.num_constraints());
  for (int i = 0; i < p.num_constraints(); ++i) {
    g(i) = p.constraints[i].value(x);
  }
  return g;
}

bool strict_feasible(const RicoProblem& p, const ManifoldPoint& x) {
  return (constraint_values(p, x).array() > 0.0).all();
}

TangentVector grad_lagrangian(const RicoProblem& p, const PointEvaluation& e,
                              const Eigen::VectorXd& lambda) {
  require_lambda_size(p, lambda, "grad_lagrangian");
  TangentVector out = e.rgrad_f;
  for (int i = 0; i < p.num_constraints(); ++i) {
    out.coords -= lambda(i) * e.rgrad_g[i].coords;
  }
  return out;
}

TangentVector grad_lagrangian(const RicoProblem& p, const PrimalDualPair& w) {
  return grad_lagrangian(p, evaluate(p, w.x), w.lambda);
}

TangentVector hess_lagrangian_apply(const RicoProblem& p, const PointEvaluation& e,
                                    const Eigen::VectorXd& lambda, const TangentVector& v) {
  require_lambda_size(p, lambda, "hess_lagrangian_apply");
  Eigen::VectorXd ehess_v = p.objective.ehess_apply(e.x, v.coords);
  for (int i = 0; i < p.num_constraints(); ++i) {
    if (lambda(i) != 0.0) {
      ehess_v -= lambda(i) * p.constraints[i].ehess_apply(e.x, v.coords);
    }
  }
  return p.manifold->ehess_to_rhess(e.x, egrad_lagrangian(e, lambda), ehess_v, v);
}

TangentVector hess_lagrangian_apply(const RicoProblem& p, const PrimalDualPair& w,
                                    const TangentVector& v) {
  return hess_lagrangian_apply(p, evaluate(p, w.x), w.lambda, v);
}

TangentVector barrier_gradient(const RicoProblem& p, const PointEvaluation& e, double mu) {
  if (mu < 0.0) {
    throw InvalidInput("barrier_gradient: mu must be nonnegative");
  }
  TangentVector out = e.rgrad_f;
  if (mu == 0.0) {
    return out;
  }
  require_strictly_feasible(e.g, "barrier_gradient");
  for (int i = 0; i < p.num_constraints(); ++i) {
    out.coords -= (mu / e.g(i)) * e.rgrad_g[i].coords;
  }
  return out;
}

TangentVector barrier_gradient(const RicoProblem& p, const ManifoldPoint& x, double mu) {
  return barrier_gradient(p, evaluate(p, x), mu);
}

TangentVector condensed_apply(const RicoProblem& p, const PointEvaluation& e,
                              const Eigen::VectorXd& lambda, const TangentVector& v) {
  require_lambda_size(p, lambda, "condensed_apply");
  for (int i = 0; i < p.num_constraints(); ++i) {
    if (!(e.g(i) >= kBarrierGuard) || !(lambda(i) > 0.0)) {
      throw InvalidState("condensed_apply: requires g(x) > 0 and lambda > 0 (index " +
                         std::to_string(i) + ")");
    }
  }
  TangentVector out = hess_lagrangian_apply(p, e, lambda, v);
  const Manifold& m = *p.manifold;
  for (int i = 0; i < p.num_constraints(); ++i) {
    const double weight = lambda(i) / e.g(i) * m.inner(e.x, e.rgrad_g[i], v);
    out.coords += weight * e.rgrad_g[i].coords;
  }
  return out;
}

TangentVector condensed_apply(const RicoProblem& p, const PrimalDualPair& w,
                              const TangentVector& v) {
  return condensed_apply(p, evaluate(p, w.x), w.lambda, v);
}

BarrierKktField barrier_kkt_field(const RicoProblem& p, const PrimalDualPair& w, double mu) {
  const PointEvaluation e = evaluate(p, w.x);
  BarrierKktField out{grad_lagrangian(p, e, w.lambda), Eigen::VectorXd()};
  out.complementarity = (w.lambda.array() * e.g.array() - mu).matrix();
  return out;
}

double merit(const PointEvaluation& e, double mu) {
  for (Eigen::Index i = 0; i < e.g.size(); ++i) {
    if (!(e.g(i) > 0.0)) {
      throw NotStrictlyFeasible("merit: g_" + std::to_string(i) + " = " +
                                std::to_string(e.g(i)) + " is not strictly positive");
    }
  }
  return e.f - mu * e.g.array().log().sum();
}

double merit(const RicoProblem& p, const ManifoldPoint& x, double mu) {
  const Eigen::VectorXd g = constraint_values(p, x);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (!(g(i) > 0.0)) {
      throw NotStrictlyFeasible("merit: g_" + std::to_string(i) + " = " +
                                std::to_string(g(i)) + " is not strictly positive");
    }
  }
  return p.objective.value(x) - mu * g.array().log().sum();
}

ResidualBreakdown kkt_residual(const RicoProblem& p, const PointEvaluation& e,
                               const Eigen::VectorXd& lambda) {
  require_lambda_size(p, lambda, "kkt_residual");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  ResidualBreakdown r;
  r.manvio = p.manifold->manvio(e.x);
  for (int i = 0; i < p.num_constraints(); ++i) {
    const double lam_neg = std::min(0.0, lambda(i));
    const double g_neg = std::min(0.0, e.g(i));
    const double c = lambda(i) * e.g(i);
    r.dual_neg += lam_neg * lam_neg;
    r.primal_neg += g_neg * g_neg;
    r.compl_ += c * c;
  }
  if (!std::isfinite(r.manvio)) {
    r.manvio = kInf;
    r.grad_lag_norm = kInf;
    r.total = kInf;
    return r;
  }
  const TangentVector grad = grad_lagrangian(p, e, lambda);
  r.grad_lag_norm = p.manifold->norm(e.x, grad);
  r.total = std::sqrt(r.grad_lag_norm * r.grad_lag_norm + r.dual_neg + r.primal_neg + r.compl_ +
                      r.manvio * r.manvio);
  return r;
}

ResidualBreakdown kkt_residual(const RicoProblem& p, const PrimalDualPair& w) {
  return kkt_residual(p, evaluate(p, w.x), w.lambda);
}

Eigen::MatrixXd matrixize_operator(
    const Manifold& m, const ManifoldPoint& x, const std::vector<TangentVector>& basis,
    const std::function<TangentVector(const TangentVector&)>& apply) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  if (d == 0) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd b(basis[0].coords.size(), d);
  Eigen::MatrixXd hb(basis[0].coords.size(), d);
  for (Eigen::Index j = 0; j < d; ++j) {
    b.col(j) = basis[j].coords;
    hb.col(j) = m.lower(x, apply(basis[j]));
  }
  const Eigen::MatrixXd mat = b.transpose() * hb;
  return 0.5 * (mat + mat.transpose());
}

CurvatureMatrices curvature_matrices(const RicoProblem& p, const PointEvaluation& e,
                                     const Eigen::VectorXd& lambda,
                                     const std::vector<TangentVector>& basis) {
  require_lambda_size(p, lambda, "curvature_matrices");
  const Manifold& m = *p.manifold;
  CurvatureMatrices c;
  c.hess_lagrangian = matrixize_operator(m, e.x, basis, [&](const TangentVector& v) {
    return hess_lagrangian_apply(p, e, lambda, v);
  });
  const auto d = static_cast<Eigen::Index>(basis.size());
  c.constraint_grads.resize(d, p.num_constraints());
  for (int i = 0; i < p.num_constraints(); ++i) {
    const Eigen::VectorXd w = m.lower(e.x, e.rgrad_g[i]);
    for (Eigen::Index j = 0; j < d; ++j) c.constraint_grads(j, i) = basis[j].coords.dot(w);
  }
  return c;
}

double second_order_measure(const PointEvaluation& e, const CurvatureMatrices& c,
                            double active_tol) {
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < e.g.size(); ++i) {
    if (e.g(i) < active_tol) {
      active.push_back(i);
    }
  }
  const Eigen::Index d = c.hess_lagrangian.rows();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(active.size()), d);
  for (std::size_t r = 0; r < active.size(); ++r) {
    a.row(Eigen::Index(r)) = c.constraint_grads.col(active[r]).transpose();
  }
  const Eigen::MatrixXd z = linalg::null_space(a);
  if (z.cols() == 0) {
    return std::numeric_limits<double>::infinity();
  }
  const Eigen::MatrixXd reduced = z.transpose() * c.hess_lagrangian * z;
  return linalg::min_eigenvalue(0.5 * (reduced + reduced.transpose()));
}

double second_order_measure(const RicoProblem& p, const PointEvaluation& e,
                            const Eigen::VectorXd& lambda, double active_tol,
                            const std::vector<TangentVector>& basis) {
  return second_order_measure(e, curvature_matrices(p, e, lambda, basis), active_tol);
}

double second_order_measure(const RicoProblem& p, const PrimalDualPair& w, double active_tol) {
  const PointEvaluation e = evaluate(p, w.x);
  return second_order_measure(p, e, w.lambda, active_tol, p.manifold->tangent_basis(w.x));
}

}  // namespace riptrm
