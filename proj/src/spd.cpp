#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "riptrm/error.hpp"
#include "riptrm/linalg.hpp"
#include "riptrm/manifolds.hpp"

namespace riptrm {

namespace {

Eigen::MatrixXd sym(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

SymmetricPositiveDefinite::SymmetricPositiveDefinite(int n) : n_(n) {
  if (n < 1) {
    throw InvalidInput("SymmetricPositiveDefinite: dimension must be positive");
  }
}

std::string SymmetricPositiveDefinite::name() const {
  return "SPD(" + std::to_string(n_) + ")";
}

double SymmetricPositiveDefinite::inner(const ManifoldPoint& x, const TangentVector& u,
                                        const TangentVector& v) const {
  check_point(x, "inner");
  check_ambient(u.coords, "inner");
  check_ambient(v.coords, "inner");
  Eigen::LLT<Eigen::MatrixXd> llt(sym(as_matrix(x.coords, n_, n_)));
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("SPD::inner: base point is not positive definite");
  }
  const Eigen::MatrixXd xu = llt.solve(Eigen::MatrixXd(as_matrix(u.coords, n_, n_)));
  const Eigen::MatrixXd xv = llt.solve(Eigen::MatrixXd(as_matrix(v.coords, n_, n_)));
  return (xu.transpose().array() * xv.array()).sum();
}

Eigen::VectorXd SymmetricPositiveDefinite::lower(const ManifoldPoint& x,
                                                 const TangentVector& v) const {
  check_point(x, "lower");
  check_ambient(v.coords, "lower");
  Eigen::LLT<Eigen::MatrixXd> llt(sym(as_matrix(x.coords, n_, n_)));
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("SPD::lower: base point is not positive definite");
  }
  const Eigen::MatrixXd xv = llt.solve(Eigen::MatrixXd(as_matrix(v.coords, n_, n_)));
  const Eigen::MatrixXd xvx = llt.solve(Eigen::MatrixXd(xv.transpose()));
  return flatten(sym(xvx));
}

ManifoldPoint SymmetricPositiveDefinite::retract(const ManifoldPoint& x,
                                                 const TangentVector& v) const {
  check_point(x, "retract");
  check_ambient(v.coords, "retract");
  if (v.coords.isZero(0.0)) {
    return x;
  }
  const Eigen::MatrixXd xm = sym(as_matrix(x.coords, n_, n_));
  const linalg::SymEigResult eig = linalg::sym_eig(xm);
  if (eig.eigenvalues(0) <= 0.0) {
    throw InvalidInput("SPD::retract: base point is not positive definite");
  }
  const Eigen::VectorXd root = eig.eigenvalues.array().sqrt();
  const Eigen::MatrixXd& q = eig.eigenvectors;
  const Eigen::MatrixXd x_half = q * root.asDiagonal() * q.transpose();
  const Eigen::MatrixXd x_neg_half = q * root.cwiseInverse().asDiagonal() * q.transpose();
  const Eigen::MatrixXd inner_arg = sym(x_neg_half * sym(as_matrix(v.coords, n_, n_)) * x_neg_half);
  const Eigen::MatrixXd expm = linalg::sym_apply(inner_arg, [](double s) { return std::exp(s); });
  ManifoldPoint out{flatten(sym(x_half * expm * x_half))};
  if (!contains(out, 1e-10)) {
    throw InternalConsistency("SPD::retract: result is not positive definite");
  }
  return out;
}

TangentVector SymmetricPositiveDefinite::project_tangent(const ManifoldPoint& x,
                                                         const Eigen::VectorXd& ambient) const {
  check_point(x, "project_tangent");
  check_ambient(ambient, "project_tangent");
  return {flatten(sym(as_matrix(ambient, n_, n_)))};
}

std::vector<TangentVector> SymmetricPositiveDefinite::tangent_basis(
    const ManifoldPoint& x) const {
  check_point(x, "tangent_basis");
  const Eigen::MatrixXd x_half =
      linalg::sym_apply(sym(as_matrix(x.coords, n_, n_)), [](double s) { return std::sqrt(s); });
  std::vector<TangentVector> basis;
  basis.reserve(dim());
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n_; ++j) {
    for (int i = j; i < n_; ++i) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n_, n_);
      if (i == j) {
        e(i, i) = 1.0;
      } else {
        e(i, j) = inv_sqrt2;
        e(j, i) = inv_sqrt2;
      }
      basis.push_back({flatten(sym(x_half * e * x_half))});
    }
  }
  return basis;
}

TangentVector SymmetricPositiveDefinite::egrad_to_rgrad(const ManifoldPoint& x,
                                                        const Eigen::VectorXd& egrad) const {
  check_point(x, "egrad_to_rgrad");
  check_ambient(egrad, "egrad_to_rgrad");
  const auto xm = as_matrix(x.coords, n_, n_);
  return {flatten(sym(xm * sym(as_matrix(egrad, n_, n_)) * xm))};
}

TangentVector SymmetricPositiveDefinite::ehess_to_rhess(const ManifoldPoint& x,
                                                        const Eigen::VectorXd& egrad,
                                                        const Eigen::VectorXd& ehess_v,
                                                        const TangentVector& v) const {
  check_point(x, "ehess_to_rhess");
  check_ambient(egrad, "ehess_to_rhess");
  check_ambient(ehess_v, "ehess_to_rhess");
  check_ambient(v.coords, "ehess_to_rhess");
  const auto xm = as_matrix(x.coords, n_, n_);
  const auto vm = as_matrix(v.coords, n_, n_);
  const Eigen::MatrixXd g = sym(as_matrix(egrad, n_, n_));
  const Eigen::MatrixXd h = sym(as_matrix(ehess_v, n_, n_));
  return {flatten(sym(xm * h * xm) + sym(vm * g * xm))};
}

double SymmetricPositiveDefinite::manvio(const ManifoldPoint& x) const {
  check_point(x, "manvio");
  const auto xm = as_matrix(x.coords, n_, n_);
  if (!xm.allFinite()) {
    return std::numeric_limits<double>::infinity();
  }
  const double asym = (xm - xm.transpose()).norm();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(xm, false);
  const double imag_tol = 1e-12 * std::max(1.0, xm.norm());
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const std::complex<double> ev = solver.eigenvalues()(i);
    if (std::abs(ev.imag()) <= imag_tol && ev.real() < 0.0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return asym;
}

bool SymmetricPositiveDefinite::contains(const ManifoldPoint& x, double tol) const {
  if (x.coords.size() != ambient_size() || !x.coords.allFinite()) {
    return false;
  }
  const auto xm = as_matrix(x.coords, n_, n_);
  if ((xm - xm.transpose()).norm() > tol) {
    return false;
  }
  return linalg::min_eigenvalue(sym(xm)) > 0.0;
}

ManifoldPoint SymmetricPositiveDefinite::random_point(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd s(n_, n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < n_; ++i) {
      s(i, j) = normal(rng);
    }
  }
  const Eigen::MatrixXd s_sym = 0.25 * (s + s.transpose());
  return {flatten(sym(linalg::sym_apply(s_sym, [](double e) { return std::exp(e); })))};
}

}  // namespace riptrm
