#pragma once

#include <Eigen/Core>

namespace riptrm::linalg {

/// Spectrum of a symmetric matrix. Eigenvalues are ascending and the
/// eigenvector columns are orthonormal.
struct SymEigResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

struct ThinQr {
  Eigen::MatrixXd q;
  Eigen::MatrixXd r;
};

/// Relative symmetry tolerance accepted by the factorizations below. Inputs
/// within tolerance are symmetrized before use.
inline constexpr double kSymmetryTol = 1e-12;

bool is_symmetric(const Eigen::MatrixXd& a, double rel_tol = kSymmetryTol);

/// Full symmetric eigendecomposition.
///
/// Throws InvalidInput if `a` is not square or not symmetric to kSymmetryTol
/// relative to its Frobenius norm.
SymEigResult sym_eig(const Eigen::MatrixXd& a);

/// Smallest eigenvalue of a symmetric matrix; +inf for a 0x0 matrix.
double min_eigenvalue(const Eigen::MatrixXd& a);

/// Solves a x = b for symmetric positive definite a via Cholesky.
///
/// Throws NotPositiveDefinite when the factorization breaks down.
Eigen::VectorXd solve_posdef(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// Thin Householder QR of an n x k matrix (n >= k) with the sign convention
/// diag(R) >= 0.
///
/// Throws RankDeficient when some |R_ii| < 1e-12 * ||A||.
ThinQr qr_thin(const Eigen::MatrixXd& a);

/// Orthonormal basis (columns) of the null space of `a`. Singular values
/// below rel_tol * max(1, sigma_max) count as zero.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol = 1e-10);

/// Orthonormal completion: n x (n-k) columns orthogonal to the range of the
/// orthonormal n x k matrix `q`.
Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& q);

/// Applies a scalar function to the spectrum of a symmetric matrix.
template <typename Fn>
Eigen::MatrixXd sym_apply(const Eigen::MatrixXd& a, Fn&& fn) {
  const SymEigResult eig = sym_eig(a);
  Eigen::VectorXd mapped = eig.eigenvalues;
  for (Eigen::Index i = 0; i < mapped.size(); ++i) {
    mapped(i) = fn(mapped(i));
  }
  return eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.transpose();
}

}  // namespace riptrm::linalg
