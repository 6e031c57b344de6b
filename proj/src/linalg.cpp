#include "riptrm/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "riptrm/error.hpp"

namespace riptrm::linalg {

bool is_symmetric(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.rows() != a.cols()) {
    return false;
  }
  const double scale = std::max(1.0, a.norm());
  return (a - a.transpose()).norm() <= rel_tol * scale;
}

SymEigResult sym_eig(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw InvalidInput("sym_eig: matrix is " + std::to_string(a.rows()) + "x" +
                       std::to_string(a.cols()) + ", expected square");
  }
  if (!a.allFinite()) {
    throw InvalidInput("sym_eig: non-finite entries");
  }
  if (!is_symmetric(a)) {
    throw InvalidInput("sym_eig: matrix is not symmetric");
  }
  if (a.rows() == 0) {
    return {Eigen::VectorXd(0), Eigen::MatrixXd(0, 0)};
  }
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw SolverFailure("sym_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) {
    return std::numeric_limits<double>::infinity();
  }
  return sym_eig(a).eigenvalues(0);
}

Eigen::VectorXd solve_posdef(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw InvalidInput("solve_posdef: dimension mismatch");
  }
  if (!is_symmetric(a)) {
    throw InvalidInput("solve_posdef: matrix is not symmetric");
  }
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("solve_posdef: Cholesky factorization failed");
  }
  return llt.solve(b);
}

ThinQr qr_thin(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index k = a.cols();
  if (n < k) {
    throw InvalidInput("qr_thin: need rows >= cols");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

  const double threshold = 1e-12 * a.norm();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (std::abs(r(i, i)) <= threshold) {
      throw RankDeficient("qr_thin: column " + std::to_string(i) +
                          " is numerically dependent");
    }
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  return {std::move(q), std::move(r)};
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) {
    return Eigen::MatrixXd::Identity(n, n);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = rel_tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      ++rank;
    }
  }
  return svd.matrixV().rightCols(n - rank);
}

Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& q) {
  const Eigen::Index n = q.rows();
  const Eigen::Index k = q.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  const Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return full.rightCols(n - k);
}

}  // namespace riptrm::linalg
