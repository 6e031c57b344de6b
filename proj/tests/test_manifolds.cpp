#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "riptrm/bench/diagnostics.hpp"
#include "riptrm/error.hpp"
#include "riptrm/linalg.hpp"
#include "riptrm/manifolds.hpp"
#include "riptrm/problem.hpp"

namespace riptrm {
namespace {

struct Case {
  std::string label;
  ManifoldPtr m;
};

std::vector<Case> all_manifolds() {
  auto skew3 = std::make_shared<SkewSymmetric>(3);
  auto spd3 = std::make_shared<SymmetricPositiveDefinite>(3);
  return {
      {"euclidean", std::make_shared<Euclidean>(3)},
      {"sphere", std::make_shared<Sphere>(4)},
      {"grassmann", std::make_shared<Grassmann>(5, 2)},
      {"spd", std::make_shared<SymmetricPositiveDefinite>(3)},
      {"skew", std::make_shared<SkewSymmetric>(4)},
      {"product_jrq", std::make_shared<Product>(std::vector<ManifoldPtr>{skew3, spd3, spd3})},
      {"product_mixed", std::make_shared<Product>(std::vector<ManifoldPtr>{
                            std::make_shared<Euclidean>(2), std::make_shared<Sphere>(3),
                            std::make_shared<Grassmann>(4, 1)})},
  };
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// f(y) = c.y + 1/2 y'Ay + sum_i w_i y_i^3 / 3 on the ambient space.
FunctionOracle random_cubic(int n, std::uint64_t seed) {
  const Eigen::VectorXd c = random_vector(n, seed);
  const Eigen::VectorXd b = random_vector(n * n, seed + 1);
  const Eigen::MatrixXd bm = Eigen::Map<const Eigen::MatrixXd>(b.data(), n, n);
  const Eigen::MatrixXd a = 0.5 * (bm + bm.transpose());
  const Eigen::VectorXd w = random_vector(n, seed + 2);
  FunctionOracle f;
  f.value = [=](const ManifoldPoint& x) {
    const Eigen::VectorXd& y = x.coords;
    return c.dot(y) + 0.5 * y.dot(a * y) + (w.array() * y.array().cube()).sum() / 3.0;
  };
  f.egrad = [=](const ManifoldPoint& x) -> Eigen::VectorXd {
    const Eigen::VectorXd& y = x.coords;
    return c + a * y + (w.array() * y.array().square()).matrix();
  };
  f.ehess_apply = [=](const ManifoldPoint& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return a * v + (2.0 * w.array() * x.coords.array() * v.array()).matrix();
  };
  return f;
}

class ManifoldProperties : public ::testing::TestWithParam<Case> {};

TEST_P(ManifoldProperties, SamplesAreMembersAndDeterministic) {
  const Manifold& m = *GetParam().m;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ManifoldPoint x = m.sample_point(seed);
    EXPECT_TRUE(m.contains(x, 1e-10));
    EXPECT_LE(m.manvio(x), 1e-10);
    EXPECT_EQ(x.coords, m.sample_point(seed).coords);
    const TangentVector v = m.sample_tangent(x, seed);
    EXPECT_EQ(v.coords, m.sample_tangent(x, seed).coords);
    EXPECT_LE((m.project_tangent(x, v.coords).coords - v.coords).norm(), 1e-10);
  }
}

TEST_P(ManifoldProperties, ProjectionIsIdempotent) {
  const Manifold& m = *GetParam().m;
  const ManifoldPoint x = m.sample_point(3);
  const Eigen::VectorXd a = random_vector(m.ambient_size(), 4);
  const TangentVector p1 = m.project_tangent(x, a);
  const TangentVector p2 = m.project_tangent(x, p1.coords);
  EXPECT_LE((p1.coords - p2.coords).norm(), 1e-12 * (1 + a.norm()));
}

TEST_P(ManifoldProperties, TangentBasisIsOrthonormal) {
  const Manifold& m = *GetParam().m;
  const ManifoldPoint x = m.sample_point(7);
  const auto basis = m.tangent_basis(x);
  ASSERT_EQ(static_cast<int>(basis.size()), m.dim());
  Eigen::MatrixXd gram(m.dim(), m.dim());
  for (int i = 0; i < m.dim(); ++i) {
    EXPECT_LE((m.project_tangent(x, basis[i].coords).coords - basis[i].coords).norm(), 1e-10);
    for (int j = 0; j < m.dim(); ++j) gram(i, j) = m.inner(x, basis[i], basis[j]);
  }
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(m.dim(), m.dim())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST_P(ManifoldProperties, InnerIsSymmetricPositiveAndMatchesLowering) {
  const Manifold& m = *GetParam().m;
  const ManifoldPoint x = m.sample_point(11);
  const TangentVector u = m.sample_tangent(x, 1);
  const TangentVector v = m.sample_tangent(x, 2);
  EXPECT_NEAR(m.inner(x, u, v), m.inner(x, v, u), 1e-12);
  EXPECT_GT(m.inner(x, u, u), 0.0);
  EXPECT_NEAR(m.norm(x, u), std::sqrt(m.inner(x, u, u)), 1e-14);
  EXPECT_NEAR(u.coords.dot(m.lower(x, v)), m.inner(x, u, v), 1e-10);
}

TEST_P(ManifoldProperties, RetractionAtZeroIsIdentity) {
  const Manifold& m = *GetParam().m;
  const ManifoldPoint x = m.sample_point(5);
  EXPECT_EQ(m.retract(x, m.zero_tangent()).coords, x.coords);
}

TEST_P(ManifoldProperties, RetractionStaysOnManifold) {
  const Manifold& m = *GetParam().m;
  const ManifoldPoint x = m.sample_point(5);
  const TangentVector v = m.sample_tangent(x, 6);
  for (double t : {1e-3, 0.1, 1.0}) {
    EXPECT_TRUE(m.contains(m.retract(x, t * v), 1e-10)) << "t = " << t;
  }
}

TEST_P(ManifoldProperties, RetractionIsFirstOrder) {
  const Manifold& m = *GetParam().m;
  const ManifoldPoint x = m.sample_point(8);
  const TangentVector v = m.sample_tangent(x, 9);
  std::vector<double> steps;
  std::vector<double> errs;
  for (int i = 0; i < 12; ++i) {
    const double t = 0.1 * std::pow(0.5, i);
    steps.push_back(t);
    errs.push_back((m.retract(x, t * v).coords - x.coords - t * v.coords).norm());
  }
  const double slope = bench::taylor_slope(steps, errs, 1e-13);
  if (!std::isnan(slope)) EXPECT_GE(slope, 1.9);
}

TEST_P(ManifoldProperties, GradientMatchesDirectionalDerivative) {
  const Manifold& m = *GetParam().m;
  const FunctionOracle f = random_cubic(m.ambient_size(), 21);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ManifoldPoint x = m.sample_point(seed);
    const TangentVector v = m.sample_tangent(x, seed + 40);
    const TangentVector rg = m.egrad_to_rgrad(x, f.egrad(x));
    const double t = 1e-5;
    const double fd = (f.value(m.retract(x, t * v)) - f.value(m.retract(x, -t * v))) / (2 * t);
    const double exact = m.inner(x, rg, v);
    EXPECT_LE(std::abs(fd - exact), 1e-5 * std::max(1.0, std::abs(exact)));
  }
}

TEST_P(ManifoldProperties, HessianIsSelfAdjointAndSecondOrder) {
  const Manifold& m = *GetParam().m;
  const FunctionOracle f = random_cubic(m.ambient_size(), 33);
  const ManifoldPoint x = m.sample_point(2);
  const Eigen::VectorXd eg = f.egrad(x);
  const TangentVector u = m.sample_tangent(x, 1);
  const TangentVector v = m.sample_tangent(x, 2);
  const auto rhess = [&](const TangentVector& w) {
    return m.ehess_to_rhess(x, eg, f.ehess_apply(x, w.coords), w);
  };
  const double scale = 1 + m.norm(x, u) * m.norm(x, v) * (1 + eg.norm());
  EXPECT_LE(std::abs(m.inner(x, rhess(u), v) - m.inner(x, u, rhess(v))), 1e-9 * scale);

  const double t = 1e-3;
  const double f0 = f.value(x);
  const double second =
      (f.value(m.retract(x, t * v)) - 2 * f0 + f.value(m.retract(x, -t * v))) / (t * t);
  const double exact = m.inner(x, rhess(v), v);
  EXPECT_LE(std::abs(second - exact), 1e-4 * std::max(1.0, std::abs(exact)));
}

TEST_P(ManifoldProperties, TaylorOrdersThroughGradcheck) {
  RicoProblem p;
  p.manifold = GetParam().m;
  p.objective = random_cubic(p.manifold->ambient_size(), 77);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ManifoldPoint x = p.manifold->sample_point(seed);
    for (const auto& c : bench::gradcheck(p, x, seed + 5)) {
      EXPECT_TRUE(c.pass) << "grad slope " << c.grad_slope << " hess slope " << c.hess_slope
                          << " grad err " << c.grad_rel_err << " hess err " << c.hess_rel_err;
    }
  }
}

TEST_P(ManifoldProperties, ShapeMismatchIsRejected) {
  const Manifold& m = *GetParam().m;
  const ManifoldPoint x = m.sample_point(0);
  EXPECT_THROW(m.project_tangent(x, Eigen::VectorXd::Zero(m.ambient_size() + 1)), InvalidInput);
  EXPECT_THROW(m.inner(x, TangentVector{Eigen::VectorXd::Zero(1 + m.ambient_size())},
                       m.zero_tangent()),
               InvalidInput);
}

INSTANTIATE_TEST_SUITE_P(All, ManifoldProperties, ::testing::ValuesIn(all_manifolds()),
                         [](const auto& info) { return info.param.label; });

TEST(Euclidean, BasicOperations) {
  const Euclidean e(2);
  const ManifoldPoint x{Eigen::Vector2d(1, 2)};
  const TangentVector e1{Eigen::Vector2d(1, 0)};
  EXPECT_DOUBLE_EQ(e.inner(x, e1, e1), 1.0);
  EXPECT_EQ(e.retract(x, e1).coords, Eigen::VectorXd(Eigen::Vector2d(2, 2)));
  const auto basis = e.tangent_basis(x);
  EXPECT_EQ(basis[0].coords, Eigen::VectorXd(Eigen::Vector2d(1, 0)));
  EXPECT_EQ(basis[1].coords, Eigen::VectorXd(Eigen::Vector2d(0, 1)));
  const Eigen::VectorXd g = Eigen::Vector2d(3, -4);
  EXPECT_EQ(e.egrad_to_rgrad(x, g).coords, g);
  EXPECT_EQ(e.ehess_to_rhess(x, g, g, e1).coords, g);
  EXPECT_EQ(e.project_tangent(x, g).coords, g);
  EXPECT_THROW(Euclidean(0), InvalidInput);
}

TEST(Spd, InnerAtIdentityIsTrace) {
  const SymmetricPositiveDefinite spd(2);
  const ManifoldPoint x{flatten(Eigen::MatrixXd::Identity(2, 2))};
  const TangentVector u{flatten(Eigen::MatrixXd::Identity(2, 2))};
  EXPECT_NEAR(spd.inner(x, u, u), 2.0, 1e-15);
}

TEST(Spd, AffineInvariantMetricAndGradient) {
  const SymmetricPositiveDefinite spd(3);
  const ManifoldPoint x = spd.sample_point(4);
  const Eigen::MatrixXd xm = as_matrix(x.coords, 3, 3);
  EXPECT_GT(linalg::min_eigenvalue(xm), 0.0);
  const TangentVector u = spd.sample_tangent(x, 1);
  const TangentVector v = spd.sample_tangent(x, 2);
  const Eigen::MatrixXd xi = xm.inverse();
  const double expected =
      (xi * as_matrix(u.coords, 3, 3) * xi * as_matrix(v.coords, 3, 3)).trace();
  EXPECT_NEAR(spd.inner(x, u, v), expected, 1e-10 * (1 + std::abs(expected)));

  const Eigen::VectorXd g = random_vector(9, 5);
  const Eigen::MatrixXd gm = as_matrix(g, 3, 3);
  const Eigen::MatrixXd expected_rg = xm * (0.5 * (gm + gm.transpose())) * xm;
  EXPECT_LE((spd.egrad_to_rgrad(x, g).coords - flatten(expected_rg)).norm(), 1e-10);
}

TEST(Spd, NegativeEigenvalueGivesInfiniteViolation) {
  const SymmetricPositiveDefinite spd(2);
  const ManifoldPoint bad{flatten(Eigen::Vector2d(1, -0.5).asDiagonal().toDenseMatrix())};
  EXPECT_EQ(spd.manvio(bad), std::numeric_limits<double>::infinity());
  EXPECT_FALSE(spd.contains(bad, 1e-10));
}

TEST(Grassmann, VerticalDirectionsAreAnnihilated) {
  const Grassmann gr(5, 2);
  const ManifoldPoint x = gr.sample_point(3);
  const Eigen::MatrixXd xm = as_matrix(x.coords, 5, 2);
  Eigen::Matrix2d a;
  a << 1, -2, 0.5, 3;
  EXPECT_LE(gr.project_tangent(x, flatten(xm * a)).coords.norm(), 1e-12);
  const Eigen::VectorXd g = random_vector(10, 2);
  const Eigen::MatrixXd expected = (Eigen::MatrixXd::Identity(5, 5) - xm * xm.transpose()) *
                                   as_matrix(g, 5, 2);
  EXPECT_LE((gr.egrad_to_rgrad(x, g).coords - flatten(expected)).norm(), 1e-12);
}

TEST(Grassmann, SamplesAndRetractionsAreOrthonormal) {
  const Grassmann gr(6, 3);
  const ManifoldPoint x = gr.sample_point(12);
  const Eigen::MatrixXd xm = as_matrix(x.coords, 6, 3);
  EXPECT_LE((xm.transpose() * xm - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-12);
  const ManifoldPoint y = gr.retract(x, gr.sample_tangent(x, 1));
  const Eigen::MatrixXd ym = as_matrix(y.coords, 6, 3);
  EXPECT_LE((ym.transpose() * ym - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-12);
  EXPECT_EQ(static_cast<int>(gr.tangent_basis(x).size()), 9);
  EXPECT_THROW(Grassmann(3, 3), InvalidInput);
}

TEST(Grassmann, LinearFunctionCurvatureMatchesFiniteDifference) {
  const Grassmann gr(5, 3);
  const ManifoldPoint x = gr.sample_point(1);
  const TangentVector v = gr.sample_tangent(x, 2);
  const Eigen::VectorXd g = random_vector(15, 3);
  const auto f = [&](const ManifoldPoint& y) { return g.dot(y.coords); };
  const TangentVector hv = gr.ehess_to_rhess(x, g, Eigen::VectorXd::Zero(15), v);
  const double t = 1e-3;
  const double fd = (f(gr.retract(x, t * v)) - 2 * f(x) + f(gr.retract(x, -t * v))) / (t * t);
  EXPECT_NEAR(gr.inner(x, hv, v), fd, 1e-5 * std::max(1.0, std::abs(fd)));
}

TEST(Scales, DefaultsFollowManifoldType) {
  EXPECT_DOUBLE_EQ(Euclidean(3).scale(), 1.0);
  EXPECT_DOUBLE_EQ(Sphere(3).scale(), std::numbers::pi);
  EXPECT_DOUBLE_EQ(Grassmann(5, 3).scale(), std::numbers::pi * std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(SymmetricPositiveDefinite(2).scale(), 1.0);
  EXPECT_DOUBLE_EQ(SkewSymmetric(2).scale(), 1.0);
  const Product prod({std::make_shared<Sphere>(3), std::make_shared<Euclidean>(2)});
  EXPECT_NEAR(prod.scale(), std::sqrt(std::numbers::pi * std::numbers::pi + 1.0), 1e-15);
  EXPECT_EQ(prod.dim(), 4);
}

TEST(Product, OperationsDecomposeByFactor) {
  auto skew = std::make_shared<SkewSymmetric>(3);
  auto spd = std::make_shared<SymmetricPositiveDefinite>(3);
  const Product prod({skew, spd, spd});
  const ManifoldPoint x = prod.sample_point(9);
  const TangentVector u = prod.sample_tangent(x, 1);
  const TangentVector v = prod.sample_tangent(x, 2);
  double inner_sum = 0.0;
  for (std::size_t i = 0; i < prod.num_factors(); ++i) {
    inner_sum += prod.factor(i).inner(prod.factor_point(x, i), prod.factor_tangent(u, i),
                                      prod.factor_tangent(v, i));
  }
  EXPECT_NEAR(prod.inner(x, u, v), inner_sum, 1e-12);

  const ManifoldPoint y = prod.retract(x, u);
  for (std::size_t i = 0; i < prod.num_factors(); ++i) {
    const ManifoldPoint yi =
        prod.factor(i).retract(prod.factor_point(x, i), prod.factor_tangent(u, i));
    EXPECT_EQ(prod.factor_point(y, i).coords, yi.coords);
  }
  EXPECT_EQ(static_cast<int>(prod.tangent_basis(x).size()), 3 + 6 + 6);
}

TEST(Skew, LinearSpaceOperations) {
  const SkewSymmetric skew(3);
  const ManifoldPoint x = skew.sample_point(1);
  const Eigen::MatrixXd xm = as_matrix(x.coords, 3, 3);
  EXPECT_LE((xm + xm.transpose()).norm(), 1e-15);
  const TangentVector v = skew.sample_tangent(x, 2);
  EXPECT_EQ(skew.retract(x, v).coords, x.coords + v.coords);
  const Eigen::MatrixXd a = as_matrix(random_vector(9, 3), 3, 3);
  EXPECT_LE((skew.project_tangent(x, flatten(a)).coords - flatten(0.5 * (a - a.transpose())))
                .norm(),
            1e-15);
  Eigen::MatrixXd nonskew = xm;
  nonskew(0, 1) += 1.0;
  EXPECT_NEAR(skew.manvio({flatten(nonskew)}), std::sqrt(2.0), 1e-12);
}

}  // namespace
}  // namespace riptrm
