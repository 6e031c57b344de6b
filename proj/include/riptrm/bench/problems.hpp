#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "riptrm/problem.hpp"

namespace riptrm::bench {

struct ProblemInstance {
  RicoProblem problem;
  /// Suggested start; `x` may be empty when a feasibility phase is needed.
  PrimalDualPair start;
};

/// min x subject to x - 1 >= 0 on R.
ProblemInstance build_analytic_1d();

struct RosenbrockGrassmannSpec {
  int n = 5;
  int k = 3;
  double alpha = 1e7;
  double c = -0.01;

  void validate() const;
};

/// Chained Rosenbrock over the row-major vectorization of X in Gr(n, k), with
/// X_ij >= c. Starts at [I_k; 0] with unit multipliers.
ProblemInstance build_rosenbrock_grassmann(const RosenbrockGrassmannSpec& spec);

/// Row-major vectorization of an n x k matrix stored column-major.
Eigen::VectorXd row_major_vec(const Eigen::VectorXd& coords, int n, int k);

struct StableLinSysSpec {
  int n = 5;
  double h = 0.02;
  int N = 20;
  double frac1 = 0.2;
  double frac2 = 0.1;
  double noise_sigma = 1e-3;
  double ring_radius = 0.05;
  double bound_margin = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

using Index2 = std::pair<int, int>;

struct StableLinSysData {
  Eigen::MatrixXd j_true;
  Eigen::MatrixXd r_true;
  Eigen::MatrixXd q_true;
  Eigen::MatrixXd a_true;
  /// x_0, ..., x_N.
  std::vector<Eigen::VectorXd> states;
  std::vector<Index2> i1;
  std::vector<Index2> i2;
  double lower = 0.0;
  double upper = 0.0;
  double radius = 0.0;
  double center = 0.0;
  double h = 0.0;
};

StableLinSysData generate_stable_linsys_data(const StableLinSysSpec& spec);

struct StableLinSysInstance {
  ProblemInstance instance;
  StableLinSysData data;
};

/// Identification of A = (J - R) Q over Skew(n) x SPD(n) x SPD(n) with box
/// and ring constraints on selected entries. The start point is left empty.
StableLinSysInstance build_stable_linsys(const StableLinSysSpec& spec);

/// Problem over the same data (used to rebuild from a stored run).
RicoProblem make_stable_linsys_problem(const StableLinSysData& data);

/// Packs (J, R, Q) into product coordinates.
ManifoldPoint pack_jrq(const Eigen::MatrixXd& j, const Eigen::MatrixXd& r,
                       const Eigen::MatrixXd& q);

enum class ProblemKind { kAnalytic1d, kRosenbrockGrassmann, kStableLinsys };

std::string to_string(ProblemKind kind);
/// Throws InvalidInput on an unknown name.
ProblemKind parse_problem_kind(const std::string& name);

}  // namespace riptrm::bench
