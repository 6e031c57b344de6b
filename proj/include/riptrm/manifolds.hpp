#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "riptrm/manifold.hpp"

namespace riptrm {

/// R^n with the dot product; retraction is addition.
class Euclidean final : public Manifold {
 public:
  explicit Euclidean(int n);

  std::string name() const override;
  int dim() const override { return n_; }
  int ambient_size() const override { return n_; }
  double scale() const override { return 1.0; }

  double inner(const ManifoldPoint& x, const TangentVector& u,
               const TangentVector& v) const override;
  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& v) const override;
  TangentVector project_tangent(const ManifoldPoint& x,
                                const Eigen::VectorXd& ambient) const override;
  std::vector<TangentVector> tangent_basis(const ManifoldPoint& x) const override;
  TangentVector egrad_to_rgrad(const ManifoldPoint& x,
                               const Eigen::VectorXd& egrad) const override;
  TangentVector ehess_to_rhess(const ManifoldPoint& x, const Eigen::VectorXd& egrad,
                               const Eigen::VectorXd& ehess_v,
                               const TangentVector& v) const override;
  double manvio(const ManifoldPoint& x) const override;
  bool contains(const ManifoldPoint& x, double tol) const override;

 protected:
  ManifoldPoint random_point(std::uint64_t seed) const override;

 private:
  int n_;
};

/// Unit sphere in R^n with the induced metric and the projective retraction
/// (x + v) / ||x + v||, which is the metric projection and hence second order.
class Sphere final : public Manifold {
 public:
  explicit Sphere(int n);

  std::string name() const override;
  int dim() const override { return n_ - 1; }
  int ambient_size() const override { return n_; }
  double scale() const override;

  double inner(const ManifoldPoint& x, const TangentVector& u,
               const TangentVector& v) const override;
  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& v) const override;
  TangentVector project_tangent(const ManifoldPoint& x,
                                const Eigen::VectorXd& ambient) const override;
  std::vector<TangentVector> tangent_basis(const ManifoldPoint& x) const override;
  TangentVector egrad_to_rgrad(const ManifoldPoint& x,
                               const Eigen::VectorXd& egrad) const override;
  TangentVector ehess_to_rhess(const ManifoldPoint& x, const Eigen::VectorXd& egrad,
                               const Eigen::VectorXd& ehess_v,
                               const TangentVector& v) const override;
  double manvio(const ManifoldPoint& x) const override;
  bool contains(const ManifoldPoint& x, double tol) const override;

 protected:
  ManifoldPoint random_point(std::uint64_t seed) const override;

 private:
  int n_;
};

/// Grassmann manifold Gr(n, k) represented by orthonormal n x k matrices.
///
/// Tangent vectors are horizontal lifts (X^T V = 0) with the metric
/// tr(U^T V). The retraction is the polar factor of X + V.
class Grassmann final : public Manifold {
 public:
  Grassmann(int n, int k);

  std::string name() const override;
  int dim() const override { return k_ * (n_ - k_); }
  int ambient_size() const override { return n_ * k_; }
  double scale() const override;
  int rows() const { return n_; }
  int cols() const { return k_; }

  double inner(const ManifoldPoint& x, const TangentVector& u,
               const TangentVector& v) const override;
  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& v) const override;
  TangentVector project_tangent(const ManifoldPoint& x,
                                const Eigen::VectorXd& ambient) const override;
  std::vector<TangentVector> tangent_basis(const ManifoldPoint& x) const override;
  TangentVector egrad_to_rgrad(const ManifoldPoint& x,
                               const Eigen::VectorXd& egrad) const override;
  TangentVector ehess_to_rhess(const ManifoldPoint& x, const Eigen::VectorXd& egrad,
                               const Eigen::VectorXd& ehess_v,
                               const TangentVector& v) const override;
  double manvio(const ManifoldPoint& x) const override;
  bool contains(const ManifoldPoint& x, double tol) const override;

 protected:
  ManifoldPoint random_point(std::uint64_t seed) const override;

 private:
  int n_;
  int k_;
};

/// Symmetric positive definite n x n matrices with the affine-invariant
/// metric tr(X^-1 U X^-1 V) and the exponential-map retraction.
class SymmetricPositiveDefinite final : public Manifold {
 public:
  explicit SymmetricPositiveDefinite(int n);

  std::string name() const override;
  int dim() const override { return n_ * (n_ + 1) / 2; }
  int ambient_size() const override { return n_ * n_; }
  double scale() const override { return 1.0; }

  double inner(const ManifoldPoint& x, const TangentVector& u,
               const TangentVector& v) const override;
  Eigen::VectorXd lower(const ManifoldPoint& x, const TangentVector& v) const override;
  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& v) const override;
  TangentVector project_tangent(const ManifoldPoint& x,
                                const Eigen::VectorXd& ambient) const override;
  std::vector<TangentVector> tangent_basis(const ManifoldPoint& x) const override;
  TangentVector egrad_to_rgrad(const ManifoldPoint& x,
                               const Eigen::VectorXd& egrad) const override;
  TangentVector ehess_to_rhess(const ManifoldPoint& x, const Eigen::VectorXd& egrad,
                               const Eigen::VectorXd& ehess_v,
                               const TangentVector& v) const override;
  /// ||X - X^T||_F, or +inf if X has a negative real eigenvalue.
  double manvio(const ManifoldPoint& x) const override;
  bool contains(const ManifoldPoint& x, double tol) const override;

 protected:
  ManifoldPoint random_point(std::uint64_t seed) const override;

 private:
  int n_;
};

/// Skew-symmetric n x n matrices, a linear space with the Frobenius metric.
class SkewSymmetric final : public Manifold {
 public:
  explicit SkewSymmetric(int n);

  std::string name() const override;
  int dim() const override { return n_ * (n_ - 1) / 2; }
  int ambient_size() const override { return n_ * n_; }
  double scale() const override { return 1.0; }

  double inner(const ManifoldPoint& x, const TangentVector& u,
               const TangentVector& v) const override;
  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& v) const override;
  TangentVector project_tangent(const ManifoldPoint& x,
                                const Eigen::VectorXd& ambient) const override;
  std::vector<TangentVector> tangent_basis(const ManifoldPoint& x) const override;
  TangentVector egrad_to_rgrad(const ManifoldPoint& x,
                               const Eigen::VectorXd& egrad) const override;
  TangentVector ehess_to_rhess(const ManifoldPoint& x, const Eigen::VectorXd& egrad,
                               const Eigen::VectorXd& ehess_v,
                               const TangentVector& v) const override;
  /// ||J + J^T||_F.
  double manvio(const ManifoldPoint& x) const override;
  bool contains(const ManifoldPoint& x, double tol) const override;

 protected:
  ManifoldPoint random_point(std::uint64_t seed) const override;

 private:
  int n_;
};

/// Cartesian product with the product metric. Coordinates of the factors are
/// concatenated in order; every operation decomposes blockwise.
class Product final : public Manifold {
 public:
  explicit Product(std::vector<ManifoldPtr> factors);

  std::string name() const override;
  int dim() const override;
  int ambient_size() const override { return ambient_size_; }
  /// sqrt of the sum of squared factor scales.
  double scale() const override;

  std::size_t num_factors() const { return factors_.size(); }
  const Manifold& factor(std::size_t i) const { return *factors_[i]; }
  int offset(std::size_t i) const { return offsets_[i]; }

  /// Coordinates of factor i as a standalone vector.
  Eigen::VectorXd block(const Eigen::VectorXd& coords, std::size_t i) const;
  ManifoldPoint factor_point(const ManifoldPoint& x, std::size_t i) const;
  TangentVector factor_tangent(const TangentVector& v, std::size_t i) const;

  double inner(const ManifoldPoint& x, const TangentVector& u,
               const TangentVector& v) const override;
  Eigen::VectorXd lower(const ManifoldPoint& x, const TangentVector& v) const override;
  ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& v) const override;
  TangentVector project_tangent(const ManifoldPoint& x,
                                const Eigen::VectorXd& ambient) const override;
  std::vector<TangentVector> tangent_basis(const ManifoldPoint& x) const override;
  TangentVector egrad_to_rgrad(const ManifoldPoint& x,
                               const Eigen::VectorXd& egrad) const override;
  TangentVector ehess_to_rhess(const ManifoldPoint& x, const Eigen::VectorXd& egrad,
                               const Eigen::VectorXd& ehess_v,
                               const TangentVector& v) const override;
  /// Sum of the factor violations.
  double manvio(const ManifoldPoint& x) const override;
  bool contains(const ManifoldPoint& x, double tol) const override;

 protected:
  ManifoldPoint random_point(std::uint64_t seed) const override;

 private:
  std::vector<ManifoldPtr> factors_;
  std::vector<int> offsets_;
  int ambient_size_ = 0;
};

/// Square-matrix views over column-major coordinates.
inline Eigen::Map<const Eigen::MatrixXd> as_matrix(const Eigen::VectorXd& v, int rows,
                                                   int cols) {
  return {v.data(), rows, cols};
}

inline Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

}  // namespace riptrm
