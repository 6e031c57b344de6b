#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "riptrm/error.hpp"
#include "riptrm/linalg.hpp"
#include "riptrm/manifolds.hpp"

namespace riptrm {

Sphere::Sphere(int n) : n_(n) {
  if (n < 2) {
    throw InvalidInput("Sphere: ambient dimension must be at least 2");
  }
}

std::string Sphere::name() const { return "Sphere(" + std::to_string(n_) + ")"; }

double Sphere::scale() const { return std::numbers::pi; }

double Sphere::inner(const ManifoldPoint& x, const TangentVector& u,
                     const TangentVector& v) const {
  check_point(x, "inner");
  check_ambient(u.coords, "inner");
  check_ambient(v.coords, "inner");
  return u.coords.dot(v.coords);
}

ManifoldPoint Sphere::retract(const ManifoldPoint& x, const TangentVector& v) const {
  check_point(x, "retract");
  check_ambient(v.coords, "retract");
  const Eigen::VectorXd y = x.coords + v.coords;
  const double len = y.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw InternalConsistency("Sphere::retract: x + v has no direction");
  }
  if (v.coords.isZero(0.0)) {
    return x;
  }
  return {y / len};
}

TangentVector Sphere::project_tangent(const ManifoldPoint& x,
                                      const Eigen::VectorXd& ambient) const {
  check_point(x, "project_tangent");
  check_ambient(ambient, "project_tangent");
  return {ambient - x.coords * x.coords.dot(ambient)};
}

std::vector<TangentVector> Sphere::tangent_basis(const ManifoldPoint& x) const {
  check_point(x, "tangent_basis");
  const Eigen::MatrixXd comp = linalg::orthogonal_complement(x.coords / x.coords.norm());
  std::vector<TangentVector> basis;
  basis.reserve(comp.cols());
  for (Eigen::Index j = 0; j < comp.cols(); ++j) {
    basis.push_back({comp.col(j)});
  }
  return basis;
}

TangentVector Sphere::egrad_to_rgrad(const ManifoldPoint& x,
                                     const Eigen::VectorXd& egrad) const {
  return project_tangent(x, egrad);
}

TangentVector Sphere::ehess_to_rhess(const ManifoldPoint& x, const Eigen::VectorXd& egrad,
                                     const Eigen::VectorXd& ehess_v,
                                     const TangentVector& v) const {
  check_ambient(egrad, "ehess_to_rhess");
  check_ambient(v.coords, "ehess_to_rhess");
  TangentVector out = project_tangent(x, ehess_v);
  out.coords -= x.coords.dot(egrad) * v.coords;
  return out;
}

double Sphere::manvio(const ManifoldPoint& x) const {
  check_point(x, "manvio");
  return std::abs(x.coords.norm() - 1.0);
}

bool Sphere::contains(const ManifoldPoint& x, double tol) const {
  return x.coords.size() == n_ && x.coords.allFinite() && manvio(x) <= tol;
}

ManifoldPoint Sphere::random_point(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n_);
  do {
    for (int i = 0; i < n_; ++i) {
      x(i) = normal(rng);
    }
  } while (x.norm() == 0.0);
  return {x / x.norm()};
}

}  // namespace riptrm
