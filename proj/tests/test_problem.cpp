#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "riptrm/bench/problems.hpp"
#include "riptrm/error.hpp"
#include "riptrm/linalg.hpp"
#include "riptrm/manifolds.hpp"
#include "riptrm/problem.hpp"

namespace riptrm {
namespace {

using Scalar = std::function<double(double)>;

FunctionOracle scalar_oracle(Scalar f, Scalar df, Scalar d2f) {
  FunctionOracle o;
  o.value = [f](const ManifoldPoint& x) { return f(x.coords(0)); };
  o.egrad = [df](const ManifoldPoint& x) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, df(x.coords(0)));
  };
  o.ehess_apply = [d2f](const ManifoldPoint& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return d2f(x.coords(0)) * v;
  };
  return o;
}

FunctionOracle affine(double a, double b) {
  return scalar_oracle([=](double x) { return a * x + b; }, [=](double) { return a; },
                       [](double) { return 0.0; });
}

RicoProblem scalar_problem(FunctionOracle f, std::vector<FunctionOracle> g) {
  return {std::make_shared<Euclidean>(1), std::move(f), std::move(g), "scalar"};
}

ManifoldPoint at(double x) { return {Eigen::VectorXd::Constant(1, x)}; }
TangentVector dir(double v) { return {Eigen::VectorXd::Constant(1, v)}; }

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// Quadratic objective and constraints on Sphere(4); each constraint is shifted
// to equal 0.5 at the sampled point.
struct RandomInstance {
  RicoProblem p;
  PrimalDualPair w;
};

FunctionOracle random_quadratic(int n, std::mt19937_64& rng, double shift) {
  const Eigen::VectorXd c = random_vector(n, rng);
  const Eigen::VectorXd b = random_vector(n * n, rng);
  const Eigen::MatrixXd bm = Eigen::Map<const Eigen::MatrixXd>(b.data(), n, n);
  const Eigen::MatrixXd a = 0.5 * (bm + bm.transpose());
  FunctionOracle o;
  o.value = [=](const ManifoldPoint& x) {
    return shift + c.dot(x.coords) + 0.5 * x.coords.dot(a * x.coords);
  };
  o.egrad = [=](const ManifoldPoint& x) -> Eigen::VectorXd { return c + a * x.coords; };
  o.ehess_apply = [=](const ManifoldPoint&, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return a * v;
  };
  return o;
}

RandomInstance random_instance(std::uint64_t seed, int m = 3) {
  std::mt19937_64 rng(seed);
  RandomInstance r;
  r.p.manifold = std::make_shared<Sphere>(4);
  r.p.objective = random_quadratic(4, rng, 0.0);
  r.w.x = r.p.manifold->sample_point(seed);
  for (int i = 0; i < m; ++i) {
    const FunctionOracle g = random_quadratic(4, rng, 0.0);
    const double shift = 0.5 - g.value(r.w.x);
    r.p.constraints.push_back(g);
    r.p.constraints.back().value = [g, shift](const ManifoldPoint& x) { return g.value(x) + shift; };
  }
  r.w.lambda = Eigen::VectorXd::LinSpaced(m, 0.5, 2.0);
  return r;
}

TEST(ConstraintValues, EmptyWithoutConstraints) {
  const RicoProblem p = scalar_problem(affine(1, 0), {});
  EXPECT_EQ(constraint_values(p, at(3)).size(), 0);
  EXPECT_TRUE(strict_feasible(p, at(3)));
}

TEST(ConstraintValues, RosenbrockInitialPoint) {
  const bench::ProblemInstance inst = bench::build_rosenbrock_grassmann({});
  const Eigen::VectorXd g = constraint_values(inst.problem, inst.start.x);
  ASSERT_EQ(g.size(), 15);
  int ones = 0;
  for (int i = 0; i < g.size(); ++i) {
    const bool high = std::abs(g(i) - 1.01) < 1e-15;
    const bool low = std::abs(g(i) - 0.01) < 1e-15;
    EXPECT_TRUE(high || low) << g(i);
    ones += high ? 1 : 0;
  }
  EXPECT_EQ(ones, 3);
}

TEST(StrictFeasible, SignTestWithoutTolerance) {
  EXPECT_TRUE(strict_feasible(scalar_problem(affine(0, 0), {affine(0, 0.01)}), at(0)));
  EXPECT_FALSE(strict_feasible(scalar_problem(affine(0, 0), {affine(0, 0.0)}), at(0)));
  EXPECT_FALSE(strict_feasible(scalar_problem(affine(0, 0), {affine(0, -1e-300)}), at(0)));
}

TEST(GradLagrangian, ZeroDualsGiveObjectiveGradient) {
  const RandomInstance r = random_instance(1);
  PrimalDualPair w = r.w;
  w.lambda.setZero();
  const TangentVector gl = grad_lagrangian(r.p, w);
  const TangentVector gf = r.p.manifold->egrad_to_rgrad(w.x, r.p.objective.egrad(w.x));
  EXPECT_LE((gl.coords - gf.coords).norm(), 1e-15);
}

TEST(GradLagrangian, ConstraintEqualToObjectiveCancels) {
  const RandomInstance r = random_instance(2, 0);
  RicoProblem p = r.p;
  p.constraints = {p.objective};
  const PrimalDualPair w{r.w.x, Eigen::VectorXd::Ones(1)};
  EXPECT_LE(grad_lagrangian(p, w).coords.norm(), 1e-15);
}

TEST(GradLagrangian, MatchesFiniteDifferenceOfLagrangian) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RandomInstance r = random_instance(seed);
    const Manifold& m = *r.p.manifold;
    const TangentVector v = m.sample_tangent(r.w.x, seed + 9);
    const auto lag = [&](double t) {
      const ManifoldPoint y = m.retract(r.w.x, t * v);
      return r.p.objective.value(y) - r.w.lambda.dot(constraint_values(r.p, y));
    };
    const double t = 1e-5;
    const double fd = (lag(t) - lag(-t)) / (2 * t);
    const double exact = m.inner(r.w.x, grad_lagrangian(r.p, r.w), v);
    EXPECT_LE(std::abs(fd - exact), 1e-5 * std::max(1.0, std::abs(exact)));
  }
}

TEST(HessLagrangian, SelfAdjointAndSecondOrder) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RandomInstance r = random_instance(seed);
    const Manifold& m = *r.p.manifold;
    const TangentVector u = m.sample_tangent(r.w.x, 1);
    const TangentVector v = m.sample_tangent(r.w.x, 2);
    const double uv = m.inner(r.w.x, hess_lagrangian_apply(r.p, r.w, u), v);
    const double vu = m.inner(r.w.x, u, hess_lagrangian_apply(r.p, r.w, v));
    EXPECT_NEAR(uv, vu, 1e-9 * (1 + std::abs(uv)));

    const auto lag = [&](double t) {
      const ManifoldPoint y = m.retract(r.w.x, t * v);
      return r.p.objective.value(y) - r.w.lambda.dot(constraint_values(r.p, y));
    };
    const double t = 1e-3;
    const double fd = (lag(t) - 2 * lag(0) + lag(-t)) / (t * t);
    const double exact = m.inner(r.w.x, hess_lagrangian_apply(r.p, r.w, v), v);
    EXPECT_LE(std::abs(fd - exact), 1e-4 * std::max(1.0, std::abs(exact)));
  }
}

TEST(HessLagrangian, ZeroDualsGiveObjectiveHessian) {
  const RandomInstance r = random_instance(3);
  const Manifold& m = *r.p.manifold;
  PrimalDualPair w = r.w;
  w.lambda.setZero();
  const TangentVector v = m.sample_tangent(w.x, 4);
  const TangentVector expected = m.ehess_to_rhess(w.x, r.p.objective.egrad(w.x),
                                                  r.p.objective.ehess_apply(w.x, v.coords), v);
  EXPECT_LE((hess_lagrangian_apply(r.p, w, v).coords - expected.coords).norm(), 1e-14);
}

TEST(BarrierGradient, ScalarHandValue) {
  const RicoProblem p = scalar_problem(affine(0, 0), {affine(1, 0)});
  EXPECT_DOUBLE_EQ(barrier_gradient(p, at(2), 1.0).coords(0), -0.5);
}

TEST(BarrierGradient, ZeroMuIsObjectiveGradient) {
  const RandomInstance r = random_instance(4);
  const TangentVector gf = r.p.manifold->egrad_to_rgrad(r.w.x, r.p.objective.egrad(r.w.x));
  EXPECT_EQ(barrier_gradient(r.p, r.w.x, 0.0).coords, gf.coords);
}

TEST(BarrierGradient, MatchesMeritDerivative) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RandomInstance r = random_instance(seed);
    const Manifold& m = *r.p.manifold;
    const double mu = 0.3;
    const TangentVector v = m.sample_tangent(r.w.x, seed + 3);
    const double t = 1e-5;
    const double fd = (merit(r.p, m.retract(r.w.x, t * v), mu) -
                       merit(r.p, m.retract(r.w.x, -t * v), mu)) /
                      (2 * t);
    const double exact = m.inner(r.w.x, barrier_gradient(r.p, r.w.x, mu), v);
    EXPECT_LE(std::abs(fd - exact), 1e-5 * std::max(1.0, std::abs(exact)));
  }
}

TEST(BarrierGradient, RejectsBoundaryPoints) {
  const RicoProblem p = scalar_problem(affine(0, 0), {affine(1, 0)});
  EXPECT_THROW(barrier_gradient(p, at(0), 1.0), NotStrictlyFeasible);
  EXPECT_THROW(barrier_gradient(p, at(-1), 1.0), NotStrictlyFeasible);
}

TEST(CondensedApply, ScalarHandValue) {
  const RicoProblem p = scalar_problem(affine(0, 0), {affine(1, 0)});
  const PrimalDualPair w{at(2), Eigen::VectorXd::Ones(1)};
  EXPECT_DOUBLE_EQ(condensed_apply(p, w, dir(3)).coords(0), 1.5);
}

TEST(CondensedApply, NoConstraintsGiveObjectiveHessian) {
  const RandomInstance r = random_instance(5, 0);
  const Manifold& m = *r.p.manifold;
  const TangentVector v = m.sample_tangent(r.w.x, 1);
  EXPECT_LE((condensed_apply(r.p, r.w, v).coords - hess_lagrangian_apply(r.p, r.w, v).coords)
                .norm(),
            1e-15);
}

TEST(CondensedApply, HessianPlusRankMCorrection) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RandomInstance r = random_instance(seed);
    const Manifold& m = *r.p.manifold;
    const TangentVector v = m.sample_tangent(r.w.x, seed + 1);
    const Eigen::VectorXd g = constraint_values(r.p, r.w.x);
    TangentVector expected = hess_lagrangian_apply(r.p, r.w, v);
    for (int i = 0; i < r.p.num_constraints(); ++i) {
      const TangentVector gg = m.egrad_to_rgrad(r.w.x, r.p.constraints[i].egrad(r.w.x));
      expected += (r.w.lambda(i) / g(i) * m.inner(r.w.x, gg, v)) * gg;
    }
    const TangentVector hv = condensed_apply(r.p, r.w, v);
    EXPECT_LE((hv.coords - expected.coords).norm(), 1e-10 * (1 + expected.coords.norm()));

    const TangentVector u = m.sample_tangent(r.w.x, seed + 2);
    const double a = m.inner(r.w.x, condensed_apply(r.p, r.w, u), v);
    const double b = m.inner(r.w.x, u, hv);
    EXPECT_NEAR(a, b, 1e-9 * (1 + std::abs(a)));
  }
}

TEST(CondensedApply, RejectsInvalidState) {
  const RicoProblem p = scalar_problem(affine(0, 0), {affine(1, 0)});
  EXPECT_THROW(condensed_apply(p, {at(0), Eigen::VectorXd::Ones(1)}, dir(1)), InvalidState);
  EXPECT_THROW(condensed_apply(p, {at(1), Eigen::VectorXd::Zero(1)}, dir(1)), InvalidState);
}

TEST(BarrierKktField, VanishesOnCentralPath) {
  const RicoProblem p = scalar_problem(affine(1, 0), {affine(1, -1)});
  const double mu = 0.5;
  const BarrierKktField f = barrier_kkt_field(p, {at(1 + mu), Eigen::VectorXd::Ones(1)}, mu);
  EXPECT_DOUBLE_EQ(f.grad_lag.coords(0), 0.0);
  EXPECT_DOUBLE_EQ(f.complementarity(0), 0.0);
  const BarrierKktField k = barrier_kkt_field(p, {at(1), Eigen::VectorXd::Ones(1)}, 0.0);
  EXPECT_DOUBLE_EQ(k.grad_lag.coords(0), 0.0);
  EXPECT_DOUBLE_EQ(k.complementarity(0), 0.0);
}

TEST(Merit, ScalarValues) {
  EXPECT_DOUBLE_EQ(merit(scalar_problem(affine(1, 0), {affine(0, 1)}), at(2.5), 0.7), 2.5);
  EXPECT_NEAR(merit(scalar_problem(affine(1, 0), {affine(1, 0)}), at(std::numbers::e), 1.0),
              std::numbers::e - 1.0, 1e-15);
  const double e = std::numbers::e;
  EXPECT_NEAR(merit(scalar_problem(affine(0, 0), {affine(0, e), affine(0, e * e)}), at(0), 0.5),
              -1.5, 1e-15);
  EXPECT_THROW(merit(scalar_problem(affine(0, 0), {affine(1, 0)}), at(0), 1.0),
               NotStrictlyFeasible);
}

TEST(KktResidual, ZeroAtKktPoint) {
  const RicoProblem p = scalar_problem(affine(1, 0), {affine(1, -1)});
  const ResidualBreakdown r = kkt_residual(p, {at(1), Eigen::VectorXd::Ones(1)});
  EXPECT_EQ(r.total, 0.0);
  EXPECT_EQ(r.grad_lag_norm, 0.0);
  EXPECT_EQ(r.compl_, 0.0);
}

TEST(KktResidual, NegativeDualHandValue) {
  const RicoProblem p = scalar_problem(affine(0, 0), {affine(0, 1)});
  const ResidualBreakdown r = kkt_residual(p, {at(0), Eigen::VectorXd::Constant(1, -1)});
  EXPECT_NEAR(r.total, std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(r.dual_neg, 1.0);
  EXPECT_DOUBLE_EQ(r.compl_, 1.0);
  EXPECT_DOUBLE_EQ(r.primal_neg, 0.0);
}

TEST(KktResidual, TotalCombinesComponents) {
  const RandomInstance r = random_instance(6);
  PrimalDualPair w = r.w;
  w.lambda(0) = -0.3;
  const ResidualBreakdown b = kkt_residual(r.p, w);
  const double expected = std::sqrt(b.grad_lag_norm * b.grad_lag_norm + b.dual_neg +
                                    b.primal_neg + b.compl_ + b.manvio * b.manvio);
  EXPECT_NEAR(b.total, expected, 1e-14 * expected);
}

TEST(KktResidual, IndefiniteSpdSlotIsInfinite) {
  RicoProblem p;
  p.manifold = std::make_shared<SymmetricPositiveDefinite>(2);
  p.objective.value = [](const ManifoldPoint&) { return 0.0; };
  p.objective.egrad = [](const ManifoldPoint&) -> Eigen::VectorXd {
    return Eigen::VectorXd::Zero(4);
  };
  p.objective.ehess_apply = [](const ManifoldPoint&, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return Eigen::VectorXd::Zero(4);
  };
  Eigen::Matrix2d x;
  x << 1, 0, 0, -1;
  const ResidualBreakdown r = kkt_residual(p, {{flatten(x)}, Eigen::VectorXd()});
  EXPECT_EQ(r.total, std::numeric_limits<double>::infinity());
  EXPECT_EQ(r.manvio, std::numeric_limits<double>::infinity());
}

TEST(SecondOrderMeasure, RosenbrockInitialPoint) {
  const bench::ProblemInstance inst = bench::build_rosenbrock_grassmann({});
  const double measure = second_order_measure(inst.problem, inst.start);
  EXPECT_LE(std::abs(measure + 2e7), 0.05 * 2e7) << measure;
}

TEST(SecondOrderMeasure, NoActiveConstraintsUsesFullTangentSpace) {
  const RandomInstance r = random_instance(7);
  const Manifold& m = *r.p.manifold;
  const auto basis = m.tangent_basis(r.w.x);
  const Eigen::MatrixXd h = matrixize_operator(
      m, r.w.x, basis, [&](const TangentVector& v) { return hess_lagrangian_apply(r.p, r.w, v); });
  EXPECT_NEAR(second_order_measure(r.p, r.w), linalg::min_eigenvalue(h), 1e-12);
}

TEST(SecondOrderMeasure, FullyActiveConeIsInfinite) {
  const RicoProblem p = scalar_problem(affine(0, 0), {affine(1, 0)});
  EXPECT_EQ(second_order_measure(p, {at(0), Eigen::VectorXd::Ones(1)}),
            std::numeric_limits<double>::infinity());
}

TEST(SecondOrderMeasure, ActiveConstraintRestrictsCone) {
  // f = -x^2 - y^2/4 + 3 y^2 on R^2; g = x active at the origin, so the cone is the y axis.
  RicoProblem p;
  p.manifold = std::make_shared<Euclidean>(2);
  const Eigen::Matrix2d hf = Eigen::Vector2d(-2, 5.5).asDiagonal();
  p.objective.value = [hf](const ManifoldPoint& x) { return 0.5 * x.coords.dot(hf * x.coords); };
  p.objective.egrad = [hf](const ManifoldPoint& x) -> Eigen::VectorXd { return hf * x.coords; };
  p.objective.ehess_apply = [hf](const ManifoldPoint&, const Eigen::VectorXd& v)
      -> Eigen::VectorXd { return hf * v; };
  FunctionOracle g;
  g.value = [](const ManifoldPoint& x) { return x.coords(0); };
  g.egrad = [](const ManifoldPoint&) -> Eigen::VectorXd { return Eigen::Vector2d(1, 0); };
  g.ehess_apply = [](const ManifoldPoint&, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return Eigen::Vector2d::Zero();
  };
  p.constraints = {g};
  const PrimalDualPair w{{Eigen::Vector2d(0, 0)}, Eigen::VectorXd::Ones(1)};
  EXPECT_NEAR(second_order_measure(p, w), 5.5, 1e-14);
  const PrimalDualPair inactive{{Eigen::Vector2d(1, 0)}, Eigen::VectorXd::Ones(1)};
  EXPECT_NEAR(second_order_measure(p, inactive), -2.0, 1e-14);
}

TEST(SecondOrderMeasure, InvariantUnderBasisRotation) {
  const bench::ProblemInstance inst = bench::build_rosenbrock_grassmann({});
  const Manifold& m = *inst.problem.manifold;
  const PointEvaluation e = evaluate(inst.problem, inst.start.x);
  const auto basis = m.tangent_basis(inst.start.x);
  const int d = static_cast<int>(basis.size());
  std::mt19937_64 rng(3);
  const Eigen::VectorXd raw = random_vector(d * d, rng);
  const Eigen::MatrixXd q =
      linalg::qr_thin(Eigen::Map<const Eigen::MatrixXd>(raw.data(), d, d)).q;
  std::vector<TangentVector> rotated;
  for (int j = 0; j < d; ++j) {
    TangentVector b = m.zero_tangent();
    for (int i = 0; i < d; ++i) b += q(i, j) * basis[i];
    rotated.push_back(b);
  }
  const double a = second_order_measure(inst.problem, e, inst.start.lambda, kDefaultActiveTol,
                                        basis);
  const double b = second_order_measure(inst.problem, e, inst.start.lambda, kDefaultActiveTol,
                                        rotated);
  EXPECT_NEAR(a, b, 1e-8 * std::abs(a));
}

}  // namespace
}  // namespace riptrm
