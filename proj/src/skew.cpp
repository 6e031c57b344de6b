#include <cmath>
#include <random>
#include <string>

#include "riptrm/error.hpp"
#include "riptrm/manifolds.hpp"

namespace riptrm {

namespace {

Eigen::MatrixXd skew(const Eigen::MatrixXd& a) { return 0.5 * (a - a.transpose()); }

}  // namespace

SkewSymmetric::SkewSymmetric(int n) : n_(n) {
  if (n < 2) {
    throw InvalidInput("SkewSymmetric: dimension must be at least 2");
  }
}

std::string SkewSymmetric::name() const { return "Skew(" + std::to_string(n_) + ")"; }

double SkewSymmetric::inner(const ManifoldPoint& x, const TangentVector& u,
                            const TangentVector& v) const {
  check_point(x, "inner");
  check_ambient(u.coords, "inner");
  check_ambient(v.coords, "inner");
  return u.coords.dot(v.coords);
}

ManifoldPoint SkewSymmetric::retract(const ManifoldPoint& x, const TangentVector& v) const {
  check_point(x, "retract");
  check_ambient(v.coords, "retract");
  return {x.coords + v.coords};
}

TangentVector SkewSymmetric::project_tangent(const ManifoldPoint& x,
                                             const Eigen::VectorXd& ambient) const {
  check_point(x, "project_tangent");
  check_ambient(ambient, "project_tangent");
  return {flatten(skew(as_matrix(ambient, n_, n_)))};
}

std::vector<TangentVector> SkewSymmetric::tangent_basis(const ManifoldPoint& x) const {
  check_point(x, "tangent_basis");
  std::vector<TangentVector> basis;
  basis.reserve(dim());
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n_; ++j) {
    for (int i = j + 1; i < n_; ++i) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n_, n_);
      e(i, j) = inv_sqrt2;
      e(j, i) = -inv_sqrt2;
      basis.push_back({flatten(e)});
    }
  }
  return basis;
}

TangentVector SkewSymmetric::egrad_to_rgrad(const ManifoldPoint& x,
                                            const Eigen::VectorXd& egrad) const {
  return project_tangent(x, egrad);
}

TangentVector SkewSymmetric::ehess_to_rhess(const ManifoldPoint& x, const Eigen::VectorXd&,
                                            const Eigen::VectorXd& ehess_v,
                                            const TangentVector&) const {
  return project_tangent(x, ehess_v);
}

double SkewSymmetric::manvio(const ManifoldPoint& x) const {
  check_point(x, "manvio");
  const auto xm = as_matrix(x.coords, n_, n_);
  return (xm + xm.transpose()).norm();
}

bool SkewSymmetric::contains(const ManifoldPoint& x, double tol) const {
  return x.coords.size() == ambient_size() && x.coords.allFinite() && manvio(x) <= tol;
}

ManifoldPoint SkewSymmetric::random_point(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n_, n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < n_; ++i) {
      a(i, j) = normal(rng);
    }
  }
  return {flatten(skew(a))};
}

}  // namespace riptrm
