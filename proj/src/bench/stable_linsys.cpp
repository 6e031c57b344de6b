#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>

#include "riptrm/bench/problems.hpp"
#include "riptrm/error.hpp"
#include "riptrm/manifolds.hpp"

namespace riptrm::bench {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd gaussian(int rows, int cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

struct Jrq {
  MatrixXd j;
  MatrixXd r;
  MatrixXd q;
};

Jrq unpack(const VectorXd& coords, int n) {
  const int s = n * n;
  return {as_matrix(coords.segment(0, s), n, n), as_matrix(coords.segment(s, s), n, n),
          as_matrix(coords.segment(2 * s, s), n, n)};
}

VectorXd pack(const MatrixXd& j, const MatrixXd& r, const MatrixXd& q) {
  const auto s = j.size();
  VectorXd out(3 * s);
  out << flatten(j), flatten(r), flatten(q);
  return out;
}

// Ambient gradient of (J, R, Q) -> phi(A) with A = (J - R) Q, given G_A.
VectorXd pull_back_gradient(const Jrq& w, const MatrixXd& ga) {
  const MatrixXd gj = ga * w.q.transpose();
  return pack(gj, -gj, (w.j - w.r).transpose() * ga);
}

// Directional derivative of pull_back_gradient along (VJ, VR, VQ), given
// G_A and its derivative dG_A.
VectorXd pull_back_hessian(const Jrq& w, const Jrq& v, const MatrixXd& ga, const MatrixXd& dga) {
  const MatrixXd dj = dga * w.q.transpose() + ga * v.q.transpose();
  return pack(dj, -dj, (v.j - v.r).transpose() * ga + (w.j - w.r).transpose() * dga);
}

MatrixXd a_direction(const Jrq& w, const Jrq& v) { return (v.j - v.r) * w.q + (w.j - w.r) * v.q; }

struct Objective {
  int n;
  double h;
  double weight;
  std::vector<VectorXd> states;

  double value(const VectorXd& coords) const {
    const Jrq w = unpack(coords, n);
    const MatrixXd m = MatrixXd::Identity(n, n) + h * (w.j - w.r) * w.q;
    double total = 0.0;
    for (std::size_t t = 1; t + 1 < states.size(); ++t) {
      total += (states[t + 1] - m * states[t]).norm();
    }
    return weight * total;
  }

  VectorXd egrad(const VectorXd& coords) const {
    const Jrq w = unpack(coords, n);
    const MatrixXd m = MatrixXd::Identity(n, n) + h * (w.j - w.r) * w.q;
    MatrixXd ga = MatrixXd::Zero(n, n);
    for (std::size_t t = 1; t + 1 < states.size(); ++t) {
      const VectorXd e = states[t + 1] - m * states[t];
      const double en = e.norm();
      if (en > 0.0) ga -= (h * weight / en) * e * states[t].transpose();
    }
    return pull_back_gradient(w, ga);
  }

  VectorXd ehess(const VectorXd& coords, const VectorXd& dir) const {
    const Jrq w = unpack(coords, n);
    const Jrq v = unpack(dir, n);
    const MatrixXd m = MatrixXd::Identity(n, n) + h * (w.j - w.r) * w.q;
    const MatrixXd da = a_direction(w, v);
    MatrixXd ga = MatrixXd::Zero(n, n);
    MatrixXd dga = MatrixXd::Zero(n, n);
    for (std::size_t t = 1; t + 1 < states.size(); ++t) {
      const VectorXd e = states[t + 1] - m * states[t];
      const double en = e.norm();
      if (!(en > 0.0)) continue;
      const VectorXd u = e / en;
      const VectorXd de = -h * (da * states[t]);
      const VectorXd du = (de - u * u.dot(de)) / en;
      ga -= h * weight * u * states[t].transpose();
      dga -= h * weight * du * states[t].transpose();
    }
    return pull_back_hessian(w, v, ga, dga);
  }
};

double entry(const Jrq& w, int i, int j) { return (w.j.row(i) - w.r.row(i)).dot(w.q.col(j)); }

// Ambient gradient of a_ij.
MatrixXd entry_grad_a(int n, int i, int j) {
  MatrixXd e = MatrixXd::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

// sign * a_ij + offset >= 0.
FunctionOracle linear_entry_constraint(int n, int i, int j, double sign, double offset) {
  FunctionOracle g;
  g.value = [=](const ManifoldPoint& x) { return sign * entry(unpack(x.coords, n), i, j) + offset; };
  g.egrad = [=](const ManifoldPoint& x) {
    return (sign * pull_back_gradient(unpack(x.coords, n), entry_grad_a(n, i, j))).eval();
  };
  g.ehess_apply = [=](const ManifoldPoint& x, const VectorXd& dir) {
    const MatrixXd ga = entry_grad_a(n, i, j);
    return (sign * pull_back_hessian(unpack(x.coords, n), unpack(dir, n), ga,
                                     MatrixXd::Zero(n, n)))
        .eval();
  };
  return g;
}

// (a_ij - b)^2 - r^2 >= 0.
FunctionOracle ring_constraint(int n, int i, int j, double b, double r) {
  FunctionOracle g;
  g.value = [=](const ManifoldPoint& x) {
    const double s = entry(unpack(x.coords, n), i, j) - b;
    return s * s - r * r;
  };
  g.egrad = [=](const ManifoldPoint& x) {
    const Jrq w = unpack(x.coords, n);
    return pull_back_gradient(w, 2.0 * (entry(w, i, j) - b) * entry_grad_a(n, i, j));
  };
  g.ehess_apply = [=](const ManifoldPoint& x, const VectorXd& dir) {
    const Jrq w = unpack(x.coords, n);
    const Jrq v = unpack(dir, n);
    const double s = entry(w, i, j) - b;
    const double ds = a_direction(w, v)(i, j);
    const MatrixXd ea = entry_grad_a(n, i, j);
    return pull_back_hessian(w, v, 2.0 * s * ea, 2.0 * ds * ea);
  };
  return g;
}

}  // namespace

void StableLinSysSpec::validate() const {
  if (n < 2) throw InvalidInput("stable-linsys: n must be at least 2");
  if (!(h > 0.0)) throw InvalidInput("stable-linsys: h must be positive");
  if (N < 2) throw InvalidInput("stable-linsys: N must be at least 2");
  if (!(frac1 >= 0.0 && frac2 >= 0.0 && frac1 + frac2 <= 1.0)) {
    throw InvalidInput("stable-linsys: index-set fractions must be nonnegative with sum <= 1");
  }
  if (!(noise_sigma >= 0.0)) throw InvalidInput("stable-linsys: noise_sigma must be >= 0");
  if (!(ring_radius > 0.0 && bound_margin > 0.0)) {
    throw InvalidInput("stable-linsys: ring_radius and bound_margin must be positive");
  }
}

StableLinSysData generate_stable_linsys_data(const StableLinSysSpec& spec) {
  spec.validate();
  const int n = spec.n;
  std::mt19937_64 rng(spec.seed);
  const double entry_scale = 1.0 / std::sqrt(static_cast<double>(n));

  StableLinSysData d;
  d.h = spec.h;
  const MatrixXd gj = gaussian(n, n, 1.0, rng);
  d.j_true = 0.5 * (gj - gj.transpose());
  const MatrixXd b = gaussian(n, n, entry_scale, rng);
  d.r_true = b * b.transpose() + 0.1 * MatrixXd::Identity(n, n);
  const MatrixXd c = gaussian(n, n, entry_scale, rng);
  d.q_true = c * c.transpose() + 0.1 * MatrixXd::Identity(n, n);
  d.a_true = (d.j_true - d.r_true) * d.q_true;

  VectorXd x0 = gaussian(n, 1, 1.0, rng).col(0);
  x0 *= std::sqrt(static_cast<double>(n)) / x0.norm();
  const MatrixXd step = MatrixXd::Identity(n, n) + spec.h * d.a_true;
  std::normal_distribution<double> noise(0.0, 1.0);
  d.states.push_back(x0);
  for (int t = 0; t < spec.N; ++t) {
    VectorXd next = step * d.states.back();
    if (spec.noise_sigma > 0.0) {
      for (int i = 0; i < n; ++i) next(i) += spec.noise_sigma * noise(rng);
    }
    d.states.push_back(std::move(next));
  }

  std::vector<int> cells(n * n);
  std::iota(cells.begin(), cells.end(), 0);
  std::shuffle(cells.begin(), cells.end(), rng);
  const int size1 = static_cast<int>(std::floor(spec.frac1 * n * n));
  const int size2 = static_cast<int>(std::floor(spec.frac2 * n * n));
  for (int t = 0; t < size1 + size2; ++t) {
    const Index2 ij{cells[t] / n, cells[t] % n};
    (t < size1 ? d.i1 : d.i2).push_back(ij);
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* set : {&d.i1, &d.i2}) {
    for (const auto& [i, j] : *set) {
      lo = std::min(lo, d.a_true(i, j));
      hi = std::max(hi, d.a_true(i, j));
    }
  }
  if (d.i1.empty() && d.i2.empty()) lo = hi = 0.0;
  d.lower = lo - spec.bound_margin;
  d.upper = hi + spec.bound_margin;
  d.radius = spec.ring_radius;

  // The ring center is chosen among a_ij +- 2r to maximize the smallest gap
  // |a_ij - b| over I2.
  double best_gap = -1.0;
  d.center = hi + 2.0 * d.radius;
  for (const auto& [i, j] : d.i2) {
    for (const double sign : {-1.0, 1.0}) {
      const double cand = d.a_true(i, j) + sign * 2.0 * d.radius;
      double gap = std::numeric_limits<double>::infinity();
      for (const auto& [p, q] : d.i2) gap = std::min(gap, std::abs(d.a_true(p, q) - cand));
      if (gap > best_gap) {
        best_gap = gap;
        d.center = cand;
      }
    }
  }
  for (const auto& [i, j] : d.i2) {
    if (!(std::abs(d.a_true(i, j) - d.center) > d.radius)) {
      throw InternalConsistency("stable-linsys: true system violates a ring constraint");
    }
  }
  return d;
}

RicoProblem make_stable_linsys_problem(const StableLinSysData& data) {
  const int n = static_cast<int>(data.a_true.rows());
  const int num_obs = static_cast<int>(data.states.size()) - 1;
  const double x0_norm = data.states.front().norm();
  if (!(x0_norm > 0.0)) throw InvalidInput("stable-linsys: x_0 must be nonzero");

  RicoProblem p;
  p.name = "stable-linsys";
  p.manifold = std::make_shared<Product>(std::vector<ManifoldPtr>{
      std::make_shared<SkewSymmetric>(n), std::make_shared<SymmetricPositiveDefinite>(n),
      std::make_shared<SymmetricPositiveDefinite>(n)});

  auto obj = std::make_shared<const Objective>(
      Objective{n, data.h, 1.0 / (num_obs * x0_norm), data.states});
  p.objective.value = [obj](const ManifoldPoint& x) { return obj->value(x.coords); };
  p.objective.egrad = [obj](const ManifoldPoint& x) { return obj->egrad(x.coords); };
  p.objective.ehess_apply = [obj](const ManifoldPoint& x, const VectorXd& v) {
    return obj->ehess(x.coords, v);
  };

  for (const auto* set : {&data.i1, &data.i2}) {
    for (const auto& [i, j] : *set) {
      p.constraints.push_back(linear_entry_constraint(n, i, j, 1.0, -data.lower));
      p.constraints.push_back(linear_entry_constraint(n, i, j, -1.0, data.upper));
    }
  }
  for (const auto& [i, j] : data.i2) {
    p.constraints.push_back(ring_constraint(n, i, j, data.center, data.radius));
  }
  return p;
}

ManifoldPoint pack_jrq(const MatrixXd& j, const MatrixXd& r, const MatrixXd& q) {
  return {pack(j, r, q)};
}

StableLinSysInstance build_stable_linsys(const StableLinSysSpec& spec) {
  StableLinSysInstance out;
  out.data = generate_stable_linsys_data(spec);
  out.instance.problem = make_stable_linsys_problem(out.data);
  out.instance.start.lambda = VectorXd::Ones(out.instance.problem.num_constraints());
  return out;
}

}  // namespace riptrm::bench
