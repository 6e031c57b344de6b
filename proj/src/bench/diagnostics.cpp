#include "riptrm/bench/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "riptrm/error.hpp"
#include "riptrm/linalg.hpp"

namespace riptrm::bench {

namespace {

struct OracleView {
  std::string name;
  const FunctionOracle* oracle;
};

double pullback(const Manifold& m, const FunctionOracle& h, const ManifoldPoint& x,
                const TangentVector& v, double t) {
  return h.value(m.retract(x, t * v));
}

OracleCheck check_oracle(const Manifold& m, const OracleView& o, const ManifoldPoint& x,
                         const TangentVector& v, const GradcheckOptions& opts) {
  const FunctionOracle& h = *o.oracle;
  OracleCheck c;
  c.oracle = o.name;
  const double h0 = h.value(x);
  const Eigen::VectorXd eg = h.egrad(x);
  const TangentVector rg = m.egrad_to_rgrad(x, eg);
  const double slope = m.inner(x, rg, v);
  const TangentVector hv = m.ehess_to_rhess(x, eg, h.ehess_apply(x, v.coords), v);
  const double curv = m.inner(x, hv, v);

  const double t = opts.fd_step;
  const double fd = (pullback(m, h, x, v, t) - pullback(m, h, x, v, -t)) / (2.0 * t);
  const double noise = std::numeric_limits<double>::epsilon() * (std::abs(h0) + 1.0) / t;
  c.grad_rel_err = std::abs(fd - slope) / std::max({std::abs(slope), m.norm(x, rg), noise});

  const Eigen::VectorXd ev = h.ehess_apply(x, v.coords);
  const Eigen::VectorXd fd_hess = (h.egrad({x.coords + t * v.coords}) -
                                   h.egrad({x.coords - t * v.coords})) /
                                  (2.0 * t);
  c.hess_rel_err =
      (fd_hess - ev).norm() / std::max({ev.norm(), 1e-3 * eg.norm(), 1e-12});

  std::vector<double> steps;
  std::vector<double> r1;
  std::vector<double> r2;
  for (int i = 0; i < 40; ++i) {
    const double s = 1e-1 * std::pow(0.5, i);
    const double hp = pullback(m, h, x, v, s);
    const double hm = pullback(m, h, x, v, -s);
    steps.push_back(s);
    // Odd and even parts of the pullback, so adjacent orders cannot cancel.
    r1.push_back(std::abs(0.5 * (hp - hm) - s * slope));
    r2.push_back(std::abs(0.5 * (hp + hm) - h0 - 0.5 * s * s * curv));
  }
  // The last steps are far below any Taylor term, so what remains there is
  // evaluation noise.
  const auto noise_floor = [&](const std::vector<double>& r) {
    double eta = std::numeric_limits<double>::epsilon() * (std::abs(h0) + 1.0);
    for (std::size_t i = r.size() - 8; i < r.size(); ++i) eta = std::max(eta, r[i]);
    return 10.0 * eta;
  };
  c.grad_slope = taylor_slope(steps, r1, noise_floor(r1));
  c.hess_slope = taylor_slope(steps, r2, noise_floor(r2));
  c.grad_exact = std::isnan(c.grad_slope);
  c.hess_exact = std::isnan(c.hess_slope);

  const bool grad_ok = c.grad_exact || c.grad_slope >= opts.min_grad_slope - opts.slope_slack;
  const bool hess_ok = c.hess_exact || c.hess_slope >= opts.min_hess_slope - opts.slope_slack;
  c.pass = c.grad_rel_err <= opts.rel_tol && c.hess_rel_err <= opts.rel_tol && grad_ok && hess_ok;
  return c;
}

}  // namespace

double taylor_slope(const std::vector<double>& steps, const std::vector<double>& residuals,
                    double noise_floor) {
  // Median of the local slopes over the smallest steps whose residual is
  // clearly above noise; an isolated sign change only spoils two of them.
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (residuals[i] > noise_floor && std::isfinite(residuals[i])) {
      pts.emplace_back(std::log(steps[i]), std::log(residuals[i]));
    }
  }
  if (pts.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  std::sort(pts.begin(), pts.end());
  pts.resize(std::min<std::size_t>(pts.size(), 6));
  std::vector<double> local;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    local.push_back((pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first));
  }
  std::sort(local.begin(), local.end());
  const std::size_t k = local.size();
  return k % 2 == 1 ? local[k / 2] : 0.5 * (local[k / 2 - 1] + local[k / 2]);
}

std::vector<OracleCheck> gradcheck(const RicoProblem& p, const ManifoldPoint& x,
                                   std::uint64_t seed, const GradcheckOptions& opts) {
  const Manifold& m = *p.manifold;
  TangentVector v = m.sample_tangent(x, seed);
  const double vn = m.norm(x, v);
  if (!(vn > 0.0)) throw InvalidInput("gradcheck: sampled a zero tangent");
  v *= 1.0 / vn;

  std::vector<OracleView> views{{"f", &p.objective}};
  for (int i = 0; i < p.num_constraints(); ++i) {
    views.push_back({"g" + std::to_string(i), &p.constraints[i]});
  }
  std::vector<OracleCheck> out;
  for (const auto& o : views) out.push_back(check_oracle(m, o, x, v, opts));
  return out;
}

trs::TrsInstance random_trs_instance(std::uint64_t seed, int index, int dim, bool hard_case) {
  if (dim < 1) throw InvalidInput("random_trs_instance: dim must be positive");
  std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(index));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  Eigen::MatrixXd a(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) a(i, j) = normal(rng);
  }
  const Eigen::MatrixXd q = linalg::qr_thin(a).q;
  Eigen::VectorXd eig(dim);
  for (int i = 0; i < dim; ++i) eig(i) = 3.0 * normal(rng);
  Eigen::VectorXd g(dim);
  for (int i = 0; i < dim; ++i) g(i) = normal(rng);
  double radius = std::pow(10.0, unif(rng));

  if (hard_case) {
    eig(0) = -std::abs(eig(0)) - 0.5;
    for (int i = 1; i < dim; ++i) eig(i) = std::max(eig(i), eig(0) + 0.5);
    // g lives in the eigenbasis; drop the bottom component.
    g(0) = 0.0;
    double pinv_norm2 = 0.0;
    for (int i = 1; i < dim; ++i) {
      const double c = g(i) / (eig(i) - eig(0));
      pinv_norm2 += c * c;
    }
    radius = std::sqrt(pinv_norm2) * (1.5 + 0.5 * (unif(rng) + 1.0)) + 0.1;
  }
  const Eigen::MatrixXd h = q * eig.asDiagonal() * q.transpose();
  return trs::TrsInstance::from_matrix(0.5 * (h + h.transpose()), q * g, radius);
}

std::vector<TrsBenchRow> trs_bench(const TrsBenchOptions& opts) {
  if (opts.count < 0 || opts.max_dim < 1) throw InvalidInput("trs_bench: bad sizes");
  std::vector<TrsBenchRow> rows;
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<int> dims(1, opts.max_dim);
  const int hard_every =
      opts.hard_fraction > 0.0 ? std::max(1, static_cast<int>(std::lround(1.0 / opts.hard_fraction)))
                               : 0;
  for (int i = 0; i < opts.count; ++i) {
    TrsBenchRow row;
    row.index = i;
    row.dim = dims(rng);
    row.hard_case = hard_every > 0 && i % hard_every == 0;
    const trs::TrsInstance inst = random_trs_instance(opts.seed, i, row.dim, row.hard_case);
    row.radius = inst.radius;
    try {
      const trs::TrsSolution sc = trs::cauchy_step(inst);
      const trs::TrsSolution st = trs::truncated_cg(inst);
      const trs::TrsSolution se = trs::exact_step(inst, opts.tol);
      row.model_cauchy = trs::model_value(inst, sc.d);
      row.model_tcg = trs::model_value(inst, st.d);
      row.model_exact = trs::model_value(inst, se.d);
      const double gnorm = inst.norm(inst.grad);
      const double hnorm = trs::op_norm(inst);
      row.cauchy_bound =
          0.5 * gnorm * (hnorm > 0.0 ? std::min(inst.radius, gnorm / hnorm) : inst.radius);
      row.exact_verified =
          trs::verify_global_optimality(inst, se.d, se.nu.value_or(0.0), opts.tol).pass;
      const double slack = 1e-12 * std::max(1.0, row.cauchy_bound);
      const bool cauchy_ok = -row.model_cauchy >= row.cauchy_bound - slack &&
                             -row.model_tcg >= row.cauchy_bound - slack &&
                             -row.model_exact >= row.cauchy_bound - slack;
      const bool order_ok =
          row.model_exact <=
          std::min(row.model_cauchy, row.model_tcg) + 1e-10 * (1.0 + std::abs(row.model_exact));
      row.pass = row.exact_verified && cauchy_ok && order_ok;
      if (!cauchy_ok) row.note = "Cauchy decrease bound violated";
      if (!order_ok) row.note = "exact step not the best model value";
      if (!row.exact_verified) row.note = "exact step failed verification";
    } catch (const Error& e) {
      row.pass = false;
      row.note = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace riptrm::bench
