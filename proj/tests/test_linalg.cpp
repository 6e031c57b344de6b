#include <random>

#include <gtest/gtest.h>

#include "riptrm/error.hpp"
#include "riptrm/linalg.hpp"

namespace riptrm::linalg {
namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) a(i, j) = normal(rng);
  }
  return a;
}

Eigen::MatrixXd random_symmetric(int n, std::uint64_t seed) {
  const Eigen::MatrixXd a = random_matrix(n, n, seed);
  return 0.5 * (a + a.transpose());
}

TEST(SymEig, IdentityHasUnitSpectrum) {
  const SymEigResult r = sym_eig(Eigen::MatrixXd::Identity(3, 3));
  EXPECT_TRUE(r.eigenvalues.isApprox(Eigen::Vector3d::Ones()));
}

TEST(SymEig, DiagonalIsSortedAscending) {
  const SymEigResult r = sym_eig(Eigen::Vector3d(3, 1, 2).asDiagonal());
  EXPECT_DOUBLE_EQ(r.eigenvalues(0), 1.0);
  EXPECT_DOUBLE_EQ(r.eigenvalues(1), 2.0);
  EXPECT_DOUBLE_EQ(r.eigenvalues(2), 3.0);
}

TEST(SymEig, TwoByTwoResiduals) {
  Eigen::Matrix2d a;
  a << 2, 1, 1, 2;
  const SymEigResult r = sym_eig(a);
  EXPECT_NEAR(r.eigenvalues(0), 1.0, 1e-14);
  EXPECT_NEAR(r.eigenvalues(1), 3.0, 1e-14);
  for (int i = 0; i < 2; ++i) {
    const Eigen::VectorXd v = r.eigenvectors.col(i);
    EXPECT_LE((a * v - r.eigenvalues(i) * v).norm(), 1e-12);
  }
}

TEST(SymEig, ReconstructionAndOrthonormality) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 1 + static_cast<int>(seed % 9);
    const Eigen::MatrixXd a = random_symmetric(n, seed);
    const SymEigResult r = sym_eig(a);
    const Eigen::MatrixXd& v = r.eigenvectors;
    const double anorm = a.norm();
    EXPECT_LE((a - v * r.eigenvalues.asDiagonal() * v.transpose()).norm(), 1e-10 * (1 + anorm));
    EXPECT_LE((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-12);
    for (int i = 0; i < n; ++i) {
      EXPECT_LE((a * v.col(i) - r.eigenvalues(i) * v.col(i)).norm(), 1e-10 * anorm);
    }
    for (int i = 1; i < n; ++i) EXPECT_LE(r.eigenvalues(i - 1), r.eigenvalues(i));
  }
}

TEST(SymEig, SpectrumInvariantUnderOrthogonalSimilarity) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd a = random_symmetric(6, seed);
    const Eigen::MatrixXd q = qr_thin(random_matrix(6, 6, seed + 100)).q;
    const Eigen::MatrixXd b = q.transpose() * a * q;
    const Eigen::VectorXd ea = sym_eig(a).eigenvalues;
    const Eigen::VectorXd eb = sym_eig(0.5 * (b + b.transpose())).eigenvalues;
    EXPECT_LE((ea - eb).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(SymEig, RejectsBadInput) {
  EXPECT_THROW(sym_eig(Eigen::MatrixXd::Zero(2, 3)), InvalidInput);
  Eigen::Matrix2d a;
  a << 1, 2, 0, 1;
  EXPECT_THROW(sym_eig(a), InvalidInput);
}

TEST(SymEig, AbsorbsRoundoffAsymmetry) {
  Eigen::Matrix2d a;
  a << 2, 1, 1 + 1e-15, 2;
  EXPECT_NO_THROW(sym_eig(a));
}

TEST(MinEigenvalue, EmptyIsInfinite) {
  EXPECT_EQ(min_eigenvalue(Eigen::MatrixXd(0, 0)), std::numeric_limits<double>::infinity());
  EXPECT_DOUBLE_EQ(min_eigenvalue(Eigen::Vector3d(3, -1, 2).asDiagonal()), -1.0);
}

TEST(SolvePosdef, Identity) {
  const Eigen::Vector3d b(1.5, -2, 7);
  EXPECT_EQ(solve_posdef(Eigen::MatrixXd::Identity(3, 3), b), Eigen::VectorXd(b));
}

TEST(SolvePosdef, DiagonalIsExact) {
  const Eigen::VectorXd x = solve_posdef(Eigen::Vector2d(2, 4).asDiagonal(), Eigen::Vector2d(2, 4));
  EXPECT_DOUBLE_EQ(x(0), 1.0);
  EXPECT_DOUBLE_EQ(x(1), 1.0);
  const Eigen::VectorXd y =
      solve_posdef(Eigen::Vector3d(3, 7, 0.1).asDiagonal(), Eigen::Vector3d(1, 1, 1));
  EXPECT_DOUBLE_EQ(y(0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(y(1), 1.0 / 7.0);
  EXPECT_DOUBLE_EQ(y(2), 1.0 / 0.1);
}

TEST(SolvePosdef, RandomResidual) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd b = random_matrix(7, 7, seed);
    const Eigen::MatrixXd a = b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(7, 7);
    const Eigen::VectorXd rhs = random_matrix(7, 1, seed + 50);
    const Eigen::VectorXd x = solve_posdef(a, rhs);
    EXPECT_LE((a * x - rhs).norm(), 1e-10 * (1 + rhs.norm()));
  }
}

TEST(SolvePosdef, RejectsIndefinite) {
  EXPECT_THROW(solve_posdef(Eigen::Vector2d(1, -1).asDiagonal(), Eigen::Vector2d(1, 1)),
               NotPositiveDefinite);
}

TEST(QrThin, IdentityFactorsTrivially) {
  const ThinQr f = qr_thin(Eigen::MatrixXd::Identity(3, 3));
  EXPECT_LE((f.q - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-15);
  EXPECT_LE((f.r - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-15);
}

TEST(QrThin, RandomIdentities) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int k = 1 + static_cast<int>(seed % 4);
    const int n = k + static_cast<int>(seed % 3);
    const Eigen::MatrixXd a = random_matrix(n, k, seed);
    const ThinQr f = qr_thin(a);
    ASSERT_EQ(f.q.rows(), n);
    ASSERT_EQ(f.q.cols(), k);
    EXPECT_LE((f.q.transpose() * f.q - Eigen::MatrixXd::Identity(k, k)).norm(), 1e-12);
    EXPECT_LE((f.q * f.r - a).norm(), 1e-10);
    for (int i = 0; i < k; ++i) {
      EXPECT_GE(f.r(i, i), 0.0);
      for (int j = 0; j < i; ++j) EXPECT_EQ(f.r(i, j), 0.0);
    }
  }
}

TEST(QrThin, IdempotentOnOrthonormalInput) {
  const Eigen::MatrixXd q = qr_thin(random_matrix(6, 3, 9)).q;
  const ThinQr f = qr_thin(q);
  EXPECT_LE((f.r - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-12);
  EXPECT_LE((f.q - q).norm(), 1e-12);
}

TEST(QrThin, RejectsRankDeficient) {
  Eigen::MatrixXd a(3, 2);
  a << 1, 2, 1, 2, 1, 2;
  EXPECT_THROW(qr_thin(a), RankDeficient);
  EXPECT_THROW(qr_thin(Eigen::MatrixXd::Ones(2, 3)), InvalidInput);
}

TEST(NullSpace, SpansKernel) {
  Eigen::MatrixXd a(2, 4);
  a << 1, 0, 1, 0, 0, 1, 0, 1;
  const Eigen::MatrixXd z = null_space(a);
  ASSERT_EQ(z.cols(), 2);
  EXPECT_LE((a * z).norm(), 1e-12);
  EXPECT_LE((z.transpose() * z - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-12);
}

TEST(OrthogonalComplement, CompletesBasis) {
  const Eigen::MatrixXd q = qr_thin(random_matrix(5, 2, 3)).q;
  const Eigen::MatrixXd c = orthogonal_complement(q);
  ASSERT_EQ(c.cols(), 3);
  EXPECT_LE((q.transpose() * c).norm(), 1e-12);
  EXPECT_LE((c.transpose() * c - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-12);
}

TEST(SymApply, SquareRootSquares) {
  const Eigen::MatrixXd b = random_matrix(4, 4, 5);
  const Eigen::MatrixXd a = b * b.transpose() + Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd s = sym_apply(a, [](double l) { return std::sqrt(l); });
  EXPECT_LE((s * s - a).norm(), 1e-10 * a.norm());
}

}  // namespace
}  // namespace riptrm::linalg
