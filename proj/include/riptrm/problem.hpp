#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "riptrm/manifold.hpp"

namespace riptrm {

/// Smooth function on the manifold described through a smooth extension to
/// the ambient space.
struct FunctionOracle {
  std::function<double(const ManifoldPoint&)> value;
  std::function<Eigen::VectorXd(const ManifoldPoint&)> egrad;
  /// D(egrad)(x)[v] for an ambient direction v.
  std::function<Eigen::VectorXd(const ManifoldPoint&, const Eigen::VectorXd&)> ehess_apply;
};

/// min f(x) subject to g_i(x) >= 0, x in M.
struct RicoProblem {
  ManifoldPtr manifold;
  FunctionOracle objective;
  std::vector<FunctionOracle> constraints;
  std::string name;

  int num_constraints() const { return static_cast<int>(constraints.size()); }
};

/// Primal point and inequality multipliers.
struct PrimalDualPair {
  ManifoldPoint x;
  Eigen::VectorXd lambda;
};

struct ResidualBreakdown {
  double grad_lag_norm = 0.0;
  /// sum_i min(0, lambda_i)^2
  double dual_neg = 0.0;
  /// sum_i min(0, g_i)^2
  double primal_neg = 0.0;
  /// sum_i (lambda_i g_i)^2
  double compl_ = 0.0;
  double manvio = 0.0;
  double total = 0.0;
};

/// Values and first derivatives of every oracle at one point. Multiplier
/// independent, so it can be shared between a trial and an accepted dual.
struct PointEvaluation {
  ManifoldPoint x;
  double f = 0.0;
  Eigen::VectorXd g;
  Eigen::VectorXd egrad_f;
  TangentVector rgrad_f;
  std::vector<Eigen::VectorXd> egrad_g;
  std::vector<TangentVector> rgrad_g;

  bool strictly_feasible() const;
};

PointEvaluation evaluate(const RicoProblem& p, const ManifoldPoint& x);

Eigen::VectorXd constraint_values(const RicoProblem& p, const ManifoldPoint& x);

/// True iff every g_i(x) > 0 (no tolerance).
bool strict_feasible(const RicoProblem& p, const ManifoldPoint& x);

TangentVector grad_lagrangian(const RicoProblem& p, const PrimalDualPair& w);
TangentVector grad_lagrangian(const RicoProblem& p, const PointEvaluation& e,
                              const Eigen::VectorXd& lambda);

TangentVector hess_lagrangian_apply(const RicoProblem& p, const PrimalDualPair& w,
                                    const TangentVector& v);
TangentVector hess_lagrangian_apply(const RicoProblem& p, const PointEvaluation& e,
                                    const Eigen::VectorXd& lambda, const TangentVector& v);

/// grad f(x) - mu sum_i grad g_i(x) / g_i(x); equals the Riemannian gradient of
/// the log-barrier merit. mu = 0 returns grad f(x).
///
/// Throws NotStrictlyFeasible when some g_i(x) is not safely positive.
TangentVector barrier_gradient(const RicoProblem& p, const ManifoldPoint& x, double mu);
TangentVector barrier_gradient(const RicoProblem& p, const PointEvaluation& e, double mu);

/// H(w)[v] = Hess_x L(w)[v] + sum_i (lambda_i / g_i) <grad g_i, v> grad g_i.
///
/// Throws InvalidState unless g(x) > 0 and lambda > 0.
TangentVector condensed_apply(const RicoProblem& p, const PrimalDualPair& w,
                              const TangentVector& v);
TangentVector condensed_apply(const RicoProblem& p, const PointEvaluation& e,
                              const Eigen::VectorXd& lambda, const TangentVector& v);

struct BarrierKktField {
  TangentVector grad_lag;
  Eigen::VectorXd complementarity;  // Lambda g(x) - mu 1
};

BarrierKktField barrier_kkt_field(const RicoProblem& p, const PrimalDualPair& w, double mu);

/// f(x) - mu sum_i log g_i(x).
///
/// Throws NotStrictlyFeasible when some g_i(x) <= 0.
double merit(const RicoProblem& p, const ManifoldPoint& x, double mu);
double merit(const PointEvaluation& e, double mu);

/// Deviation from the KKT set, including the manifold violation. Works at
/// infeasible points; total is +inf iff manvio is.
ResidualBreakdown kkt_residual(const RicoProblem& p, const PrimalDualPair& w);
ResidualBreakdown kkt_residual(const RicoProblem& p, const PointEvaluation& e,
                               const Eigen::VectorXd& lambda);

inline constexpr double kDefaultActiveTol = 1e-6;

/// Hess_x L and the constraint gradients in an orthonormal basis of T_xM.
struct CurvatureMatrices {
  Eigen::MatrixXd hess_lagrangian;   // d x d, symmetrized
  Eigen::MatrixXd constraint_grads;  // d x m; column i holds grad g_i
};
CurvatureMatrices curvature_matrices(const RicoProblem& p, const PointEvaluation& e,
                                     const Eigen::VectorXd& lambda,
                                     const std::vector<TangentVector>& basis);
double second_order_measure(const PointEvaluation& e, const CurvatureMatrices& c,
                            double active_tol);

/// Minimum eigenvalue of Hess_x L over the weak critical cone
/// {v : <grad g_i, v> = 0 for every i with g_i(x) < active_tol}. Returns +inf
/// when the cone is {0}.
double second_order_measure(const RicoProblem& p, const PrimalDualPair& w,
                            double active_tol = kDefaultActiveTol);
double second_order_measure(const RicoProblem& p, const PointEvaluation& e,
                            const Eigen::VectorXd& lambda, double active_tol,
                            const std::vector<TangentVector>& basis);

/// Matrix of a self-adjoint operator on T_xM in an orthonormal basis,
/// symmetrized.
Eigen::MatrixXd matrixize_operator(
    const Manifold& m, const ManifoldPoint& x, const std::vector<TangentVector>& basis,
    const std::function<TangentVector(const TangentVector&)>& apply);

}  // namespace riptrm
