#include <memory>
#include <string>

#include "riptrm/bench/problems.hpp"
#include "riptrm/error.hpp"
#include "riptrm/manifolds.hpp"

namespace riptrm::bench {

namespace {

// Position of v_m (row-major over X) inside column-major coordinates.
int coord_index(int m, int n, int k) { return (m % k) * n + m / k; }

}  // namespace

void RosenbrockGrassmannSpec::validate() const {
  if (!(k >= 1 && n > k)) throw InvalidInput("rosenbrock-grassmann: need n > k >= 1");
  if (!(alpha > 0.0)) throw InvalidInput("rosenbrock-grassmann: alpha must be positive");
}

Eigen::VectorXd row_major_vec(const Eigen::VectorXd& coords, int n, int k) {
  Eigen::VectorXd v(n * k);
  for (int m = 0; m < n * k; ++m) v(m) = coords(coord_index(m, n, k));
  return v;
}

ProblemInstance build_rosenbrock_grassmann(const RosenbrockGrassmannSpec& spec) {
  using Eigen::VectorXd;
  spec.validate();
  const int n = spec.n;
  const int k = spec.k;
  const int len = n * k;
  const double alpha = spec.alpha;

  RicoProblem p;
  p.name = "rosenbrock-grassmann";
  p.manifold = std::make_shared<Grassmann>(n, k);

  p.objective.value = [=](const ManifoldPoint& x) {
    const VectorXd v = row_major_vec(x.coords, n, k);
    double f = 0.0;
    for (int m = 0; m + 1 < len; ++m) {
      const double jump = v(m + 1) - v(m);
      const double off = 1.0 - v(m);
      f += alpha * jump * jump + off * off;
    }
    return f;
  };
  p.objective.egrad = [=](const ManifoldPoint& x) {
    const VectorXd v = row_major_vec(x.coords, n, k);
    VectorXd gv = VectorXd::Zero(len);
    for (int m = 0; m + 1 < len; ++m) {
      const double jump = v(m + 1) - v(m);
      gv(m + 1) += 2.0 * alpha * jump;
      gv(m) += -2.0 * alpha * jump - 2.0 * (1.0 - v(m));
    }
    VectorXd out(len);
    for (int m = 0; m < len; ++m) out(coord_index(m, n, k)) = gv(m);
    return out;
  };
  p.objective.ehess_apply = [=](const ManifoldPoint&, const VectorXd& dir) {
    const VectorXd w = row_major_vec(dir, n, k);
    VectorXd hw = VectorXd::Zero(len);
    for (int m = 0; m + 1 < len; ++m) {
      const double jump = w(m + 1) - w(m);
      hw(m + 1) += 2.0 * alpha * jump;
      hw(m) += -2.0 * alpha * jump + 2.0 * w(m);
    }
    VectorXd out(len);
    for (int m = 0; m < len; ++m) out(coord_index(m, n, k)) = hw(m);
    return out;
  };

  for (int m = 0; m < len; ++m) {
    const int idx = coord_index(m, n, k);
    const double c = spec.c;
    FunctionOracle g;
    g.value = [idx, c](const ManifoldPoint& x) { return x.coords(idx) - c; };
    g.egrad = [idx, len](const ManifoldPoint&) {
      VectorXd e = VectorXd::Zero(len);
      e(idx) = 1.0;
      return e;
    };
    g.ehess_apply = [len](const ManifoldPoint&, const VectorXd&) {
      return VectorXd::Zero(len).eval();
    };
    p.constraints.push_back(std::move(g));
  }

  Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(n, k);
  x0.topRows(k).setIdentity();

  ProblemInstance inst;
  inst.problem = std::move(p);
  inst.start.x = {flatten(x0)};
  inst.start.lambda = VectorXd::Ones(len);
  return inst;
}

}  // namespace riptrm::bench
