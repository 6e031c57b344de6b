#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "riptrm/error.hpp"
#include "riptrm/linalg.hpp"
#include "riptrm/manifolds.hpp"

namespace riptrm {

Grassmann::Grassmann(int n, int k) : n_(n), k_(k) {
  if (k < 1 || n <= k) {
    throw InvalidInput("Grassmann: need n > k >= 1");
  }
}

std::string Grassmann::name() const {
  return "Grassmann(" + std::to_string(n_) + "," + std::to_string(k_) + ")";
}

double Grassmann::scale() const { return std::numbers::pi * std::sqrt(double(k_)); }

double Grassmann::inner(const ManifoldPoint& x, const TangentVector& u,
                        const TangentVector& v) const {
  check_point(x, "inner");
  check_ambient(u.coords, "inner");
  check_ambient(v.coords, "inner");
  return u.coords.dot(v.coords);
}

ManifoldPoint Grassmann::retract(const ManifoldPoint& x, const TangentVector& v) const {
  check_point(x, "retract");
  check_ambient(v.coords, "retract");
  if (v.coords.isZero(0.0)) {
    return x;
  }
  const Eigen::MatrixXd y = as_matrix(x.coords, n_, k_) + as_matrix(v.coords, n_, k_);
  const Eigen::MatrixXd gram = y.transpose() * y;
  // Polar factor y (y^T y)^{-1/2}.
  const Eigen::MatrixXd inv_sqrt = linalg::sym_apply(gram, [](double s) {
    return 1.0 / std::sqrt(s);
  });
  ManifoldPoint out{flatten(y * inv_sqrt)};
  if (!contains(out, 1e-10)) {
    throw InternalConsistency("Grassmann::retract: polar factor is not orthonormal");
  }
  return out;
}

TangentVector Grassmann::project_tangent(const ManifoldPoint& x,
                                         const Eigen::VectorXd& ambient) const {
  check_point(x, "project_tangent");
  check_ambient(ambient, "project_tangent");
  const auto xm = as_matrix(x.coords, n_, k_);
  const auto a = as_matrix(ambient, n_, k_);
  const Eigen::MatrixXd horizontal = a - xm * (xm.transpose() * a);
  return {flatten(horizontal)};
}

std::vector<TangentVector> Grassmann::tangent_basis(const ManifoldPoint& x) const {
  check_point(x, "tangent_basis");
  const Eigen::MatrixXd xperp = linalg::orthogonal_complement(as_matrix(x.coords, n_, k_));
  std::vector<TangentVector> basis;
  basis.reserve(dim());
  for (int j = 0; j < k_; ++j) {
    for (int i = 0; i < n_ - k_; ++i) {
      Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n_, k_);
      v.col(j) = xperp.col(i);
      basis.push_back({flatten(v)});
    }
  }
  return basis;
}

TangentVector Grassmann::egrad_to_rgrad(const ManifoldPoint& x,
                                        const Eigen::VectorXd& egrad) const {
  return project_tangent(x, egrad);
}

TangentVector Grassmann::ehess_to_rhess(const ManifoldPoint& x, const Eigen::VectorXd& egrad,
                                        const Eigen::VectorXd& ehess_v,
                                        const TangentVector& v) const {
  check_ambient(egrad, "ehess_to_rhess");
  check_ambient(v.coords, "ehess_to_rhess");
  const auto xm = as_matrix(x.coords, n_, k_);
  const auto g = as_matrix(egrad, n_, k_);
  const auto vm = as_matrix(v.coords, n_, k_);
  // Only the symmetric part of X^T G contributes to <Hess[v], v>; dropping the
  // skew part keeps the operator self-adjoint for objectives that are not
  // invariant under X -> XQ.
  const Eigen::MatrixXd xtg = xm.transpose() * g;
  const Eigen::MatrixXd sym_xtg = 0.5 * (xtg + xtg.transpose());
  TangentVector out = project_tangent(x, ehess_v);
  out.coords -= flatten(vm * sym_xtg);
  return out;
}

double Grassmann::manvio(const ManifoldPoint& x) const {
  check_point(x, "manvio");
  const auto xm = as_matrix(x.coords, n_, k_);
  return (xm.transpose() * xm - Eigen::MatrixXd::Identity(k_, k_)).norm();
}

bool Grassmann::contains(const ManifoldPoint& x, double tol) const {
  return x.coords.size() == ambient_size() && x.coords.allFinite() && manvio(x) <= tol;
}

ManifoldPoint Grassmann::random_point(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n_, k_);
  for (int j = 0; j < k_; ++j) {
    for (int i = 0; i < n_; ++i) {
      a(i, j) = normal(rng);
    }
  }
  return {flatten(linalg::qr_thin(a).q)};
}

}  // namespace riptrm
