#pragma once

#include "socv/types.hpp"

#include <Eigen/Cholesky>

#include <utility>
#include <vector>

namespace socv {

/// Least-squares conditional-expectation configuration: polynomial basis in
/// the state coordinates up to the given total degree, plus a constant.
/// With batches > 1 the fits are made independently on contiguous path
/// blocks; integral checks use such a companion solve so batch-means
/// standard errors can see the regression noise (a shared fit hides it).
struct RegressionConfig {
  int degree = 2;
  double ridge = 1e-8;  // relative to the mean diagonal of the Gram matrix
  int batches = 1;
};

/// Contiguous path ranges [lo, hi) for batched fits: at most `requested`
/// blocks, each holding at least a few times the basis size.
std::vector<std::pair<int, int>> regression_batches(int paths, int basis_size,
                                                    int requested);

/// Diagnostics accumulated over a backward sweep.
struct RegressionDiagnostics {
  double max_condition = 0.0;
  int rank_deficient_steps = 0;

  void merge(const RegressionDiagnostics& other) {
    max_condition = std::max(max_condition, other.max_condition);
    rank_deficient_steps += other.rank_deficient_steps;
  }
};

/// Monomials of total degree <= degree in dim variables (constant first,
/// then linear, then quadratic, ...).
class PolynomialBasis {
 public:
  PolynomialBasis(int dim, int degree);
  int size() const { return static_cast<int>(exponents_.size()); }
  int dim() const { return dim_; }
  void eval(const Vector& x, Eigen::Ref<Vector> out) const;

 private:
  int dim_;
  std::vector<std::vector<int>> exponents_;
};

/// One cross-sectional regression: fits multi-column payloads on the basis
/// evaluated at per-path regressor states, and returns fitted values.
/// Assembly accumulates in fixed path order, so the result is independent of
/// any caller-side parallelism.
class StepRegression {
 public:
  StepRegression(const PolynomialBasis& basis, const RegressionConfig& cfg,
                 int paths);

  /// Row p of `design` must be the basis evaluated at path p's state.
  void factor(const Matrix& design);

  /// Fitted values (paths x cols) for a payload (paths x cols).
  Matrix fit(const Matrix& payload) const;

  double condition_number() const { return condition_; }
  bool rank_deficient() const { return rank_deficient_; }

 private:
  const PolynomialBasis& basis_;
  RegressionConfig cfg_;
  Matrix design_;
  Eigen::LDLT<Matrix> factor_;
  double condition_ = 0.0;
  bool rank_deficient_ = false;
};

}  // namespace socv
