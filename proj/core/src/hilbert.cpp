#include "socv/hilbert.hpp"

#include <cmath>

namespace socv {

TruncatedSpace::TruncatedSpace(Vector eigenvalues)
    : eigenvalues_(std::move(eigenvalues)) {
  require(eigenvalues_.size() >= 1, "TruncatedSpace needs n >= 1 modes");
  require(eigenvalues_.allFinite(), "TruncatedSpace eigenvalues must be finite");
}

TruncatedSpace TruncatedSpace::dirichlet_laplacian(int n) {
  require(n >= 1, "dirichlet_laplacian needs n >= 1");
  Vector lambda(n);
  for (int k = 0; k < n; ++k) {
    const double kpi = (k + 1) * M_PI;
    lambda[k] = -kpi * kpi;
  }
  return TruncatedSpace(std::move(lambda));
}

TruncatedSpace TruncatedSpace::zero(int n) {
  require(n >= 1, "zero space needs n >= 1");
  return TruncatedSpace(Vector::Zero(n));
}

Vector TruncatedSpace::semigroup_factors(double t) const {
  require(t >= 0.0, "semigroup time must be nonnegative");
  return (eigenvalues_.array() * t).exp().matrix();
}

Vector TruncatedSpace::semigroup_apply(double t, const Vector& x) const {
  require_dims(x.size() == eigenvalues_.size(),
               "semigroup_apply: state dimension mismatch");
  return semigroup_factors(t).cwiseProduct(x);
}

double hs_inner(const Matrix& w1, const Matrix& w2) {
  require_dims(w1.rows() == w2.rows() && w1.cols() == w2.cols(),
               "hs_inner: shape mismatch");
  return w1.cwiseProduct(w2).sum();
}

double hs_norm(const Matrix& w) { return std::sqrt(hs_inner(w, w)); }

}  // namespace socv
