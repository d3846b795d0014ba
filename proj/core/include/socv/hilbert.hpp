#pragma once

#include "socv/types.hpp"

namespace socv {

/// Spectrally truncated state space. The generator A acts diagonally on the
/// retained modes, so the semigroup S(t) is the exact componentwise
/// exponential and costs O(n) to apply.
class TruncatedSpace {
 public:
  explicit TruncatedSpace(Vector eigenvalues);

  /// Dirichlet Laplacian modes on (0,1): lambda_k = -(k pi)^2, k = 1..n.
  static TruncatedSpace dirichlet_laplacian(int n);

  /// All eigenvalues zero (S(t) = identity).
  static TruncatedSpace zero(int n);

  int dim() const { return static_cast<int>(eigenvalues_.size()); }
  const Vector& eigenvalues() const { return eigenvalues_; }

  /// exp(lambda_k t) for each mode; t >= 0.
  Vector semigroup_factors(double t) const;

  /// S(t) x, computed componentwise.
  Vector semigroup_apply(double t, const Vector& x) const;

 private:
  Vector eigenvalues_;
};

/// Frobenius inner product of two equally shaped dense operators
/// (the truncated Hilbert-Schmidt pairing).
double hs_inner(const Matrix& w1, const Matrix& w2);

/// Frobenius norm.
double hs_norm(const Matrix& w);

}  // namespace socv
