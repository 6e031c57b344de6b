#include <cmath>
#include <string>

#include "riptrm/error.hpp"
#include "riptrm/manifolds.hpp"

namespace riptrm {

Product::Product(std::vector<ManifoldPtr> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) {
    throw InvalidInput("Product: needs at least one factor");
  }
  for (const auto& f : factors_) {
    if (!f) {
      throw InvalidInput("Product: null factor");
    }
    offsets_.push_back(ambient_size_);
    ambient_size_ += f->ambient_size();
  }
}

std::string Product::name() const {
  std::string out = "Product(";
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out += (i ? "," : "") + factors_[i]->name();
  }
  return out + ")";
}

int Product::dim() const {
  int total = 0;
  for (const auto& f : factors_) {
    total += f->dim();
  }
  return total;
}

double Product::scale() const {
  double sum = 0.0;
  for (const auto& f : factors_) {
    sum += f->scale() * f->scale();
  }
  return std::sqrt(sum);
}

Eigen::VectorXd Product::block(const Eigen::VectorXd& coords, std::size_t i) const {
  return coords.segment(offsets_[i], factors_[i]->ambient_size());
}

ManifoldPoint Product::factor_point(const ManifoldPoint& x, std::size_t i) const {
  return {block(x.coords, i)};
}

TangentVector Product::factor_tangent(const TangentVector& v, std::size_t i) const {
  return {block(v.coords, i)};
}

double Product::inner(const ManifoldPoint& x, const TangentVector& u,
                      const TangentVector& v) const {
  check_point(x, "inner");
  check_ambient(u.coords, "inner");
  check_ambient(v.coords, "inner");
  double total = 0.0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    total += factors_[i]->inner(factor_point(x, i), factor_tangent(u, i), factor_tangent(v, i));
  }
  return total;
}

Eigen::VectorXd Product::lower(const ManifoldPoint& x, const TangentVector& v) const {
  check_point(x, "lower");
  check_ambient(v.coords, "lower");
  Eigen::VectorXd out(ambient_size_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.segment(offsets_[i], factors_[i]->ambient_size()) =
        factors_[i]->lower(factor_point(x, i), factor_tangent(v, i));
  }
  return out;
}

ManifoldPoint Product::retract(const ManifoldPoint& x, const TangentVector& v) const {
  check_point(x, "retract");
  check_ambient(v.coords, "retract");
  ManifoldPoint out{Eigen::VectorXd(ambient_size_)};
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.coords.segment(offsets_[i], factors_[i]->ambient_size()) =
        factors_[i]->retract(factor_point(x, i), factor_tangent(v, i)).coords;
  }
  return out;
}

TangentVector Product::project_tangent(const ManifoldPoint& x,
                                       const Eigen::VectorXd& ambient) const {
  check_point(x, "project_tangent");
  check_ambient(ambient, "project_tangent");
  TangentVector out{Eigen::VectorXd(ambient_size_)};
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.coords.segment(offsets_[i], factors_[i]->ambient_size()) =
        factors_[i]->project_tangent(factor_point(x, i), block(ambient, i)).coords;
  }
  return out;
}

std::vector<TangentVector> Product::tangent_basis(const ManifoldPoint& x) const {
  check_point(x, "tangent_basis");
  std::vector<TangentVector> basis;
  basis.reserve(dim());
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    for (const TangentVector& b : factors_[i]->tangent_basis(factor_point(x, i))) {
      TangentVector e{Eigen::VectorXd::Zero(ambient_size_)};
      e.coords.segment(offsets_[i], factors_[i]->ambient_size()) = b.coords;
      basis.push_back(std::move(e));
    }
  }
  return basis;
}

TangentVector Product::egrad_to_rgrad(const ManifoldPoint& x,
                                      const Eigen::VectorXd& egrad) const {
  check_point(x, "egrad_to_rgrad");
  check_ambient(egrad, "egrad_to_rgrad");
  TangentVector out{Eigen::VectorXd(ambient_size_)};
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.coords.segment(offsets_[i], factors_[i]->ambient_size()) =
        factors_[i]->egrad_to_rgrad(factor_point(x, i), block(egrad, i)).coords;
  }
  return out;
}

TangentVector Product::ehess_to_rhess(const ManifoldPoint& x, const Eigen::VectorXd& egrad,
                                      const Eigen::VectorXd& ehess_v,
                                      const TangentVector& v) const {
  check_point(x, "ehess_to_rhess");
  check_ambient(egrad, "ehess_to_rhess");
  check_ambient(ehess_v, "ehess_to_rhess");
  check_ambient(v.coords, "ehess_to_rhess");
  TangentVector out{Eigen::VectorXd(ambient_size_)};
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.coords.segment(offsets_[i], factors_[i]->ambient_size()) =
        factors_[i]
            ->ehess_to_rhess(factor_point(x, i), block(egrad, i), block(ehess_v, i),
                             factor_tangent(v, i))
            .coords;
  }
  return out;
}

double Product::manvio(const ManifoldPoint& x) const {
  check_point(x, "manvio");
  double total = 0.0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    total += factors_[i]->manvio(factor_point(x, i));
  }
  return total;
}

bool Product::contains(const ManifoldPoint& x, double tol) const {
  if (x.coords.size() != ambient_size_) {
    return false;
  }
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (!factors_[i]->contains(factor_point(x, i), tol)) {
      return false;
    }
  }
  return true;
}

ManifoldPoint Product::random_point(std::uint64_t seed) const {
  ManifoldPoint out{Eigen::VectorXd(ambient_size_)};
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    out.coords.segment(offsets_[i], factors_[i]->ambient_size()) =
        factors_[i]->sample_point(seed * 1000003ULL + i + 1).coords;
  }
  return out;
}

}  // namespace riptrm
