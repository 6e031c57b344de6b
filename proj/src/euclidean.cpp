#include <random>
#include <string>

#include "riptrm/error.hpp"
#include "riptrm/manifolds.hpp"

namespace riptrm {

Euclidean::Euclidean(int n) : n_(n) {
  if (n < 1) {
    throw InvalidInput("Euclidean: dimension must be positive");
  }
}

std::string Euclidean::name() const { return "Euclidean(" + std::to_string(n_) + ")"; }

double Euclidean::inner(const ManifoldPoint& x, const TangentVector& u,
                        const TangentVector& v) const {
  check_point(x, "inner");
  check_ambient(u.coords, "inner");
  check_ambient(v.coords, "inner");
  return u.coords.dot(v.coords);
}

ManifoldPoint Euclidean::retract(const ManifoldPoint& x, const TangentVector& v) const {
  check_point(x, "retract");
  check_ambient(v.coords, "retract");
  return {x.coords + v.coords};
}

TangentVector Euclidean::project_tangent(const ManifoldPoint& x,
                                         const Eigen::VectorXd& ambient) const {
  check_point(x, "project_tangent");
  check_ambient(ambient, "project_tangent");
  return {ambient};
}

std::vector<TangentVector> Euclidean::tangent_basis(const ManifoldPoint& x) const {
  check_point(x, "tangent_basis");
  std::vector<TangentVector> basis;
  basis.reserve(n_);
  for (int i = 0; i < n_; ++i) {
    basis.push_back({Eigen::VectorXd::Unit(n_, i)});
  }
  return basis;
}

TangentVector Euclidean::egrad_to_rgrad(const ManifoldPoint& x,
                                        const Eigen::VectorXd& egrad) const {
  return project_tangent(x, egrad);
}

TangentVector Euclidean::ehess_to_rhess(const ManifoldPoint& x, const Eigen::VectorXd&,
                                        const Eigen::VectorXd& ehess_v,
                                        const TangentVector&) const {
  return project_tangent(x, ehess_v);
}

double Euclidean::manvio(const ManifoldPoint& x) const {
  check_point(x, "manvio");
  return 0.0;
}

bool Euclidean::contains(const ManifoldPoint& x, double) const {
  return x.coords.size() == n_ && x.coords.allFinite();
}

ManifoldPoint Euclidean::random_point(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n_);
  for (int i = 0; i < n_; ++i) {
    x(i) = normal(rng);
  }
  return {x};
}

}  // namespace riptrm
