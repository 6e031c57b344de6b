#include "riptrm/manifold.hpp"

#include <cmath>
#include <random>
#include <string>

#include "riptrm/error.hpp"

namespace riptrm {

double Manifold::norm(const ManifoldPoint& x, const TangentVector& v) const {
  return std::sqrt(std::max(0.0, inner(x, v, v)));
}

Eigen::VectorXd Manifold::lower(const ManifoldPoint& x, const TangentVector& v) const {
  check_point(x, "lower");
  check_ambient(v.coords, "lower");
  return v.coords;
}

ManifoldPoint Manifold::sample_point(std::uint64_t seed) const {
  ManifoldPoint x = random_point(seed);
  if (!contains(x)) {
    throw InternalConsistency(name() + ": sampled point fails membership test");
  }
  return x;
}

TangentVector Manifold::sample_tangent(const ManifoldPoint& x, std::uint64_t seed) const {
  check_point(x, "sample_tangent");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  Eigen::VectorXd a(ambient_size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a(i) = normal(rng);
  }
  return project_tangent(x, a);
}

void Manifold::check_point(const ManifoldPoint& x, const char* op) const {
  if (x.coords.size() != ambient_size()) {
    throw InvalidInput(name() + "::" + op + ": point has " +
                       std::to_string(x.coords.size()) + " coordinates, expected " +
                       std::to_string(ambient_size()));
  }
}

void Manifold::check_ambient(const Eigen::VectorXd& v, const char* op) const {
  if (v.size() != ambient_size()) {
    throw InvalidInput(name() + "::" + op + ": vector has " + std::to_string(v.size()) +
                       " coordinates, expected " + std::to_string(ambient_size()));
  }
}

}  // namespace riptrm
