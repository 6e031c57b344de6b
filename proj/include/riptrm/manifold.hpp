#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace riptrm {

/// Point on a manifold in the manifold's ambient coordinates. Matrix-valued
/// manifolds store their matrices column-major, and products concatenate the
/// factor coordinates.
struct ManifoldPoint {
  Eigen::VectorXd coords;
};

/// Tangent vector in ambient coordinates. The base point is carried by the
/// caller; operations check shape compatibility only.
struct TangentVector {
  Eigen::VectorXd coords;

  TangentVector& operator+=(const TangentVector& o) {
    coords += o.coords;
    return *this;
  }
  TangentVector& operator-=(const TangentVector& o) {
    coords -= o.coords;
    return *this;
  }
  TangentVector& operator*=(double s) {
    coords *= s;
    return *this;
  }
};

inline TangentVector operator+(TangentVector a, const TangentVector& b) { return a += b; }
inline TangentVector operator-(TangentVector a, const TangentVector& b) { return a -= b; }
inline TangentVector operator*(double s, TangentVector a) { return a *= s; }
inline TangentVector operator-(TangentVector a) { return a *= -1.0; }

/// Intrinsic dimension and the typical distance used to size the initial
/// trust region.
struct ManifoldDescriptor {
  int dim = 0;
  double scale = 1.0;
};

/// Riemannian manifold realized in an ambient Euclidean space.
///
/// All operations are pure. Implementations use second-order retractions so
/// that the quadratic model built from the Riemannian Hessian matches the
/// second derivative of pullbacks along retraction curves.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual int ambient_size() const = 0;
  virtual double scale() const = 0;
  ManifoldDescriptor descriptor() const { return {dim(), scale()}; }

  virtual double inner(const ManifoldPoint& x, const TangentVector& u,
                       const TangentVector& v) const = 0;
  double norm(const ManifoldPoint& x, const TangentVector& v) const;

  /// Ambient covector w with inner(x, u, v) = u.coords . w for every tangent u.
  /// The default suits metrics inherited from the ambient Euclidean space.
  virtual Eigen::VectorXd lower(const ManifoldPoint& x, const TangentVector& v) const;

  virtual ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& v) const = 0;
  virtual TangentVector project_tangent(const ManifoldPoint& x,
                                        const Eigen::VectorXd& ambient) const = 0;

  /// Orthonormal basis of T_xM under inner(x, ., .), exactly dim() vectors.
  virtual std::vector<TangentVector> tangent_basis(const ManifoldPoint& x) const = 0;

  virtual TangentVector egrad_to_rgrad(const ManifoldPoint& x,
                                       const Eigen::VectorXd& egrad) const = 0;

  /// Riemannian Hessian applied to v, given the Euclidean gradient and the
  /// Euclidean Hessian-vector product D(egrad)(x)[v] of a smooth extension.
  virtual TangentVector ehess_to_rhess(const ManifoldPoint& x, const Eigen::VectorXd& egrad,
                                       const Eigen::VectorXd& ehess_v,
                                       const TangentVector& v) const = 0;

  /// Distance to the membership conditions; +inf when the point has left the
  /// manifold in a way that cannot be measured (e.g. an indefinite SPD slot).
  virtual double manvio(const ManifoldPoint& x) const = 0;

  /// Membership test at the given absolute tolerance.
  virtual bool contains(const ManifoldPoint& x, double tol = 1e-10) const = 0;

  /// Deterministic random point/tangent; identical seeds give bitwise-identical
  /// output.
  ManifoldPoint sample_point(std::uint64_t seed) const;
  TangentVector sample_tangent(const ManifoldPoint& x, std::uint64_t seed) const;

  TangentVector zero_tangent() const {
    return {Eigen::VectorXd::Zero(ambient_size())};
  }

 protected:
  virtual ManifoldPoint random_point(std::uint64_t seed) const = 0;

  void check_point(const ManifoldPoint& x, const char* op) const;
  void check_ambient(const Eigen::VectorXd& v, const char* op) const;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

}  // namespace riptrm
