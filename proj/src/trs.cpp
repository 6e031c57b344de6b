#include "riptrm/trs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "riptrm/error.hpp"
#include "riptrm/linalg.hpp"

namespace riptrm::trs {

namespace {

const std::vector<TangentVector>& require_basis(const TrsInstance& inst, const char* op) {
  if (!inst.basis) {
    throw InvalidInput(std::string(op) + ": instance has no tangent basis attached");
  }
  return *inst.basis;
}

double safe_norm(double sq) { return std::sqrt(std::max(0.0, sq)); }

bool on_boundary(TrsStatus s) {
  return s == TrsStatus::kBoundary || s == TrsStatus::kNegativeCurvatureBoundary ||
         s == TrsStatus::kHardCase;
}

TrsSolution finish(const TrsInstance& inst, TrsSolution sol) {
  // Recurrences drift from the metric norm; put boundary steps back on the sphere.
  if (on_boundary(sol.status)) {
    const double dn = inst.norm(sol.d);
    if (dn > 0.0) sol.d *= inst.radius / dn;
  }
  sol.model_decrease = -model_value(inst, sol.d);
  return sol;
}

}  // namespace

double TrsInstance::norm(const TangentVector& v) const { return safe_norm(inner(v, v)); }

TrsInstance TrsInstance::on_manifold(const Manifold& m, const ManifoldPoint& x,
                                     std::function<TangentVector(const TangentVector&)> apply_H,
                                     TangentVector grad, double radius) {
  TrsInstance inst;
  inst.apply_H = std::move(apply_H);
  inst.grad = std::move(grad);
  inst.radius = radius;
  inst.inner = [&m, x](const TangentVector& u, const TangentVector& v) {
    return m.inner(x, u, v);
  };
  inst.basis = std::make_shared<const std::vector<TangentVector>>(m.tangent_basis(x));
  return inst;
}

TrsInstance TrsInstance::from_matrix(const Eigen::MatrixXd& h, const Eigen::VectorXd& grad,
                                     double radius) {
  if (h.rows() != h.cols() || h.rows() != grad.size()) {
    throw InvalidInput("TrsInstance::from_matrix: dimension mismatch");
  }
  TrsInstance inst;
  inst.apply_H = [h](const TangentVector& v) { return TangentVector{h * v.coords}; };
  inst.grad = {grad};
  inst.radius = radius;
  inst.inner = [](const TangentVector& u, const TangentVector& v) {
    return u.coords.dot(v.coords);
  };
  std::vector<TangentVector> basis;
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    basis.push_back({Eigen::VectorXd::Unit(grad.size(), i)});
  }
  inst.basis = std::make_shared<const std::vector<TangentVector>>(std::move(basis));
  return inst;
}

std::string to_string(TrsStatus status) {
  switch (status) {
    case TrsStatus::kInterior:
      return "interior";
    case TrsStatus::kBoundary:
      return "boundary";
    case TrsStatus::kHardCase:
      return "hard-case";
    case TrsStatus::kNegativeCurvatureBoundary:
      return "negative-curvature-boundary";
    case TrsStatus::kMaxIter:
      return "max-iter";
  }
  return "unknown";
}

std::string to_string(Subsolver s) {
  switch (s) {
    case Subsolver::kCauchy:
      return "cauchy";
    case Subsolver::kTruncatedCg:
      return "tcg";
    case Subsolver::kExact:
      return "exact";
  }
  return "unknown";
}

Subsolver parse_subsolver(const std::string& name) {
  if (name == "cauchy") return Subsolver::kCauchy;
  if (name == "tcg") return Subsolver::kTruncatedCg;
  if (name == "exact") return Subsolver::kExact;
  throw InvalidInput("unknown subsolver '" + name + "' (expected cauchy, tcg or exact)");
}

double model_value(const TrsInstance& inst, const TangentVector& d) {
  return 0.5 * inst.inner(inst.apply_H(d), d) + inst.inner(inst.grad, d);
}

TrsSolution cauchy_step(const TrsInstance& inst) {
  TrsSolution sol;
  sol.d = 0.0 * inst.grad;
  const double gnorm = inst.norm(inst.grad);
  if (gnorm == 0.0) {
    sol.status = TrsStatus::kInterior;
    return finish(inst, std::move(sol));
  }
  const double curvature = inst.inner(inst.apply_H(inst.grad), inst.grad);
  const double t_boundary = inst.radius / gnorm;
  double t = t_boundary;
  if (curvature <= 0.0) {
    sol.status = TrsStatus::kNegativeCurvatureBoundary;
  } else {
    t = std::min(gnorm * gnorm / curvature, t_boundary);
    sol.status = t == t_boundary ? TrsStatus::kBoundary : TrsStatus::kInterior;
  }
  sol.d = -t * inst.grad;
  sol.iterations = 1;
  return finish(inst, std::move(sol));
}

TrsSolution truncated_cg(const TrsInstance& inst, const TcgOptions& opts) {
  int max_iter = opts.max_iter;
  if (max_iter <= 0) {
    max_iter = inst.basis ? static_cast<int>(inst.basis->size())
                          : static_cast<int>(inst.grad.coords.size());
  }
  max_iter = std::max(max_iter, 1);

  TrsSolution sol;
  TangentVector eta = 0.0 * inst.grad;
  TangentVector h_eta = eta;
  TangentVector r = inst.grad;
  double r_r = inst.inner(r, r);
  const double norm_r0 = safe_norm(r_r);
  double model = 0.0;
  sol.iterate_models.push_back(0.0);
  sol.iterate_norms.push_back(0.0);
  sol.status = TrsStatus::kInterior;
  if (norm_r0 == 0.0) {
    sol.d = eta;
    return finish(inst, std::move(sol));
  }
  const double delta_sq = inst.radius * inst.radius;

  TangentVector p = -r;
  // Running inner products <eta, eta>, <eta, p>, <p, p>.
  double e_e = 0.0;
  double e_p = 0.0;
  double p_p = r_r;
  sol.status = TrsStatus::kMaxIter;

  for (int j = 1; j <= max_iter; ++j) {
    sol.iterations = j;
    const TangentVector hp = inst.apply_H(p);
    const double p_hp = inst.inner(p, hp);
    const double alpha = r_r / p_hp;
    const double e_e_new = e_e + 2.0 * alpha * e_p + alpha * alpha * p_p;

    if (p_hp <= 0.0 || e_e_new >= delta_sq) {
      const double tau = (-e_p + std::sqrt(e_p * e_p + p_p * (delta_sq - e_e))) / p_p;
      eta += tau * p;
      sol.status =
          p_hp <= 0.0 ? TrsStatus::kNegativeCurvatureBoundary : TrsStatus::kBoundary;
      sol.d = eta;
      sol.iterate_models.push_back(model_value(inst, eta));
      sol.iterate_norms.push_back(inst.norm(eta));
      return finish(inst, std::move(sol));
    }

    const TangentVector eta_new = eta + alpha * p;
    const TangentVector h_eta_new = h_eta + alpha * hp;
    const double model_new =
        inst.inner(eta_new, inst.grad) + 0.5 * inst.inner(eta_new, h_eta_new);
    if (model_new >= model) {
      // Rounding made the model go up; keep the previous iterate.
      sol.status = TrsStatus::kInterior;
      break;
    }
    eta = eta_new;
    h_eta = h_eta_new;
    model = model_new;
    e_e = e_e_new;
    sol.iterate_models.push_back(model);
    sol.iterate_norms.push_back(safe_norm(e_e));

    r += alpha * hp;
    const double r_r_old = r_r;
    r_r = inst.inner(r, r);
    const double norm_r = safe_norm(r_r);
    if (norm_r <= norm_r0 * std::min(std::pow(norm_r0, opts.theta), opts.kappa)) {
      sol.status = TrsStatus::kInterior;
      break;
    }
    const double beta = r_r / r_r_old;
    p = beta * p - r;
    e_p = beta * (e_p + alpha * p_p);
    p_p = r_r + beta * beta * p_p;
  }
  sol.d = eta;
  return finish(inst, std::move(sol));
}

Eigen::MatrixXd matrixize(const TrsInstance& inst) {
  const auto& basis = require_basis(inst, "matrixize");
  const auto d = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd mat(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const TangentVector hb = inst.apply_H(basis[j]);
    for (Eigen::Index i = 0; i < d; ++i) {
      mat(i, j) = inst.inner(basis[i], hb);
    }
  }
  return 0.5 * (mat + mat.transpose());
}

double min_eig(const TrsInstance& inst) { return linalg::min_eigenvalue(matrixize(inst)); }

double op_norm(const TrsInstance& inst) {
  const Eigen::MatrixXd m = matrixize(inst);
  if (m.rows() == 0) {
    return 0.0;
  }
  const Eigen::VectorXd ev = linalg::sym_eig(m).eigenvalues;
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

Eigen::VectorXd to_coords(const TrsInstance& inst, const TangentVector& v) {
  const auto& basis = require_basis(inst, "to_coords");
  Eigen::VectorXd y(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    y(Eigen::Index(j)) = inst.inner(v, basis[j]);
  }
  return y;
}

TangentVector from_coords(const TrsInstance& inst, const Eigen::VectorXd& y) {
  const auto& basis = require_basis(inst, "from_coords");
  TangentVector out = 0.0 * inst.grad;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    out.coords += y(Eigen::Index(j)) * basis[j].coords;
  }
  return out;
}

TrsSolution exact_step(const TrsInstance& inst, double tol) {
  if (!(inst.radius > 0.0)) {
    throw InvalidInput("exact_step: radius must be positive");
  }
  const Eigen::MatrixXd mat = matrixize(inst);
  const Eigen::VectorXd c = to_coords(inst, inst.grad);
  TrsSolution sol;
  if (mat.rows() == 0) {
    sol.d = 0.0 * inst.grad;
    sol.nu = 0.0;
    return finish(inst, std::move(sol));
  }
  const linalg::SymEigResult eig = linalg::sym_eig(mat);
  const Eigen::VectorXd& lam = eig.eigenvalues;
  const Eigen::MatrixXd& q = eig.eigenvectors;
  const Eigen::VectorXd gamma = q.transpose() * c;
  const Eigen::Index n = lam.size();
  const double delta = inst.radius;
  const double lam_min = lam(0);
  const double h_norm = std::max(std::abs(lam(0)), std::abs(lam(n - 1)));
  const double g_norm = gamma.norm();
  const double scale = 1.0 + g_norm + h_norm;

  auto step_at = [&](double nu) {
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y(i) = -gamma(i) / (lam(i) + nu);
    }
    return y;
  };

  Eigen::VectorXd y;
  double nu = 0.0;
  sol.status = TrsStatus::kBoundary;

  if (lam_min > 0.0) {
    y = step_at(0.0);
    if (y.norm() <= delta) {
      sol.status = TrsStatus::kInterior;
    }
  }

  if (sol.status != TrsStatus::kInterior) {
    const double nu_lo = std::max(0.0, -lam_min);
    // Eigenspace of the smallest eigenvalue, up to rounding.
    const double degenerate_tol = 1e-12 * scale;
    Eigen::Index num_min = 0;
    while (num_min < n && lam(num_min) - lam_min <= degenerate_tol) {
      ++num_min;
    }
    const double gamma_min_norm = gamma.head(num_min).norm();
    bool hard = false;
    if (gamma_min_norm <= 1e-12 * scale && lam_min <= 0.0) {
      Eigen::VectorXd y_p = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = num_min; i < n; ++i) {
        y_p(i) = -gamma(i) / (lam(i) + nu_lo);
      }
      if (y_p.norm() <= delta) {
        hard = true;
        nu = nu_lo;
        y = y_p;
        if (lam_min < 0.0) {
          // Move along the leftmost eigenvector to the boundary. Ties are
          // broken toward a nonnegative first nonzero coordinate.
          Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
          z(0) = 1.0;
          const Eigen::VectorXd z_basis = q.col(0);
          for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(z_basis(i)) > 1e-12) {
              if (z_basis(i) < 0.0) z = -z;
              break;
            }
          }
          const double tau = std::sqrt(std::max(0.0, delta * delta - y_p.squaredNorm()));
          y += tau * z;
          sol.status = TrsStatus::kHardCase;
        } else {
          sol.status = TrsStatus::kInterior;
        }
      }
    }

    if (!hard) {
      // Secular equation 1/||y(nu)|| = 1/delta on (nu_lo, inf): safeguarded
      // Newton with a bisection bracket.
      double lo = nu_lo;
      double hi = nu_lo + g_norm / delta;
      if (!(step_at(hi).norm() <= delta)) {
        hi = std::max(2.0 * hi, 1.0);
        while (step_at(hi).norm() > delta) hi *= 2.0;
      }
      nu = hi;
      for (int it = 0; it < 500; ++it) {
        const Eigen::VectorXd yn = step_at(nu);
        const double ynorm = yn.norm();
        const double phi = 1.0 / ynorm - 1.0 / delta;
        if (std::abs(ynorm - delta) <= 4.0 * std::numeric_limits<double>::epsilon() * delta) {
          break;
        }
        if (phi < 0.0) {
          lo = nu;
        } else {
          hi = nu;
        }
        double cubic = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double shifted = lam(i) + nu;
          cubic += gamma(i) * gamma(i) / (shifted * shifted * shifted);
        }
        const double dphi = cubic / (ynorm * ynorm * ynorm);
        double next = nu - phi / dphi;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
          next = 0.5 * (lo + hi);
        }
        if (next == nu || hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * hi) {
          break;
        }
        nu = next;
      }
      y = step_at(nu);
      // Absorb the last bit of rounding so that ||d|| <= delta holds exactly.
      const double ynorm = y.norm();
      if (ynorm > delta) {
        y *= delta / ynorm;
      }
      sol.status = TrsStatus::kBoundary;
    }
  }

  sol.d = from_coords(inst, q * y);
  sol.nu = nu;
  sol.iterations = 1;
  const OptimalityReport report = verify_global_optimality(inst, sol.d, nu, tol);
  if (!report.pass) {
    throw SolverFailure("exact_step: global optimality check failed: " + report.describe());
  }
  return finish(inst, std::move(sol));
}

std::string OptimalityReport::describe() const {
  std::ostringstream os;
  os << "stationarity=" << stationarity << " complementarity=" << complementarity
     << " radius_excess=" << radius_excess << " nu_negativity=" << nu_negativity
     << " shifted_min_eig=" << shifted_min_eig << " tol=" << effective_tol;
  return os.str();
}

OptimalityReport verify_global_optimality(const TrsInstance& inst, const TangentVector& d,
                                          double nu, double tol) {
  OptimalityReport rep;
  const Eigen::MatrixXd mat = matrixize(inst);
  double h_norm = 0.0;
  double lam_min = std::numeric_limits<double>::infinity();
  if (mat.rows() > 0) {
    const Eigen::VectorXd ev = linalg::sym_eig(mat).eigenvalues;
    lam_min = ev(0);
    h_norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  }
  const double g_norm = inst.norm(inst.grad);
  rep.effective_tol = tol * (1.0 + g_norm + h_norm);

  TangentVector resid = inst.apply_H(d) + nu * d + inst.grad;
  rep.stationarity = inst.norm(resid);
  const double d_norm = inst.norm(d);
  rep.complementarity = std::abs(nu * (inst.radius - d_norm));
  rep.radius_excess = std::max(0.0, d_norm - inst.radius);
  rep.nu_negativity = std::max(0.0, -nu);
  rep.shifted_min_eig = lam_min + nu;

  rep.pass = rep.stationarity <= rep.effective_tol &&
             rep.complementarity <= rep.effective_tol &&
             rep.radius_excess <= tol * std::max(1.0, inst.radius) &&
             rep.nu_negativity <= rep.effective_tol &&
             rep.shifted_min_eig >= -rep.effective_tol;
  return rep;
}

TrsSolution solve(const TrsInstance& inst, Subsolver which, const TcgOptions& tcg,
                  double exact_tol) {
  switch (which) {
    case Subsolver::kCauchy:
      return cauchy_step(inst);
    case Subsolver::kTruncatedCg:
      return truncated_cg(inst, tcg);
    case Subsolver::kExact:
      return exact_step(inst, exact_tol);
  }
  throw InvalidInput("solve: unknown subsolver");
}

}  // namespace riptrm::trs
