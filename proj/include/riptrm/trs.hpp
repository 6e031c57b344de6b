#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "riptrm/manifold.hpp"

namespace riptrm::trs {

/// Quadratic model m(d) = 1/2 <H d, d> + <grad, d> over the ball ||d|| <= radius
/// in one tangent space.
struct TrsInstance {
  std::function<TangentVector(const TangentVector&)> apply_H;
  TangentVector grad;
  double radius = 1.0;
  std::function<double(const TangentVector&, const TangentVector&)> inner;
  /// Orthonormal basis of the tangent space; required by matrixize and
  /// exact_step only.
  std::shared_ptr<const std::vector<TangentVector>> basis;

  double norm(const TangentVector& v) const;

  /// Instance on T_xM using the manifold's metric and tangent basis.
  static TrsInstance on_manifold(const Manifold& m, const ManifoldPoint& x,
                                 std::function<TangentVector(const TangentVector&)> apply_H,
                                 TangentVector grad, double radius);

  /// Instance on R^d with the dot product and the canonical basis.
  static TrsInstance from_matrix(const Eigen::MatrixXd& h, const Eigen::VectorXd& grad,
                                 double radius);
};

enum class TrsStatus {
  kInterior,
  kBoundary,
  kHardCase,
  kNegativeCurvatureBoundary,
  kMaxIter,
};

std::string to_string(TrsStatus status);

struct TrsSolution {
  TangentVector d;
  std::optional<double> nu;
  TrsStatus status = TrsStatus::kInterior;
  double model_decrease = 0.0;
  int iterations = 0;
  /// Model values and norms of the truncated CG iterates, starting at d = 0.
  std::vector<double> iterate_models;
  std::vector<double> iterate_norms;
};

enum class Subsolver { kCauchy, kTruncatedCg, kExact };

std::string to_string(Subsolver s);
/// Parses "cauchy", "tcg" or "exact"; throws InvalidInput otherwise.
Subsolver parse_subsolver(const std::string& name);

double model_value(const TrsInstance& inst, const TangentVector& d);

TrsSolution cauchy_step(const TrsInstance& inst);

struct TcgOptions {
  double kappa = 0.1;
  double theta = 1.0;
  /// Non-positive means the tangent-space dimension (or the ambient size when
  /// no basis is attached).
  int max_iter = 0;
};

/// Steihaug-Toint truncated conjugate gradient from d = 0.
TrsSolution truncated_cg(const TrsInstance& inst, const TcgOptions& opts = {});

inline constexpr double kDefaultExactTol = 1e-9;

/// Global minimizer of the model over the ball via the eigendecomposition of
/// the matrixized operator and the secular equation, with an explicit hard
/// case. The result is checked with verify_global_optimality; a violation
/// throws SolverFailure.
TrsSolution exact_step(const TrsInstance& inst, double tol = kDefaultExactTol);

struct OptimalityReport {
  bool pass = false;
  double stationarity = 0.0;     // ||(H + nu I) d + grad||
  double complementarity = 0.0;  // |nu (radius - ||d||)|
  double radius_excess = 0.0;    // max(0, ||d|| - radius)
  double nu_negativity = 0.0;    // max(0, -nu)
  double shifted_min_eig = 0.0;  // lambda_min(H) + nu
  double effective_tol = 0.0;

  std::string describe() const;
};

/// Checks the four global optimality conditions for (d, nu). `tol` is relative:
/// the comparisons use tol * (1 + ||grad|| + ||H||_op).
OptimalityReport verify_global_optimality(const TrsInstance& inst, const TangentVector& d,
                                          double nu, double tol = kDefaultExactTol);

/// M_ij = <H b_i, b_j> in the attached basis, symmetrized.
Eigen::MatrixXd matrixize(const TrsInstance& inst);
double min_eig(const TrsInstance& inst);
/// Spectral norm of the matrixized operator.
double op_norm(const TrsInstance& inst);

/// Basis coordinates <v, b_j> of a tangent vector.
Eigen::VectorXd to_coords(const TrsInstance& inst, const TangentVector& v);
TangentVector from_coords(const TrsInstance& inst, const Eigen::VectorXd& y);

TrsSolution solve(const TrsInstance& inst, Subsolver which, const TcgOptions& tcg = {},
                  double exact_tol = kDefaultExactTol);

}  // namespace riptrm::trs
