#include "socv/regression.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>

namespace socv {

std::vector<std::pair<int, int>> regression_batches(int paths, int basis_size,
                                                    int requested) {
  const int min_block = std::max(4 * basis_size, 32);
  int count = std::max(1, std::min(requested, paths / min_block));
  std::vector<std::pair<int, int>> ranges;
  const int base = paths / count;
  int lo = 0;
  for (int b = 0; b < count; ++b) {
    const int hi = (b + 1 == count) ? paths : lo + base;
    ranges.emplace_back(lo, hi);
    lo = hi;
  }
  return ranges;
}

PolynomialBasis::PolynomialBasis(int dim, int degree) : dim_(dim) {
  require(dim >= 1 && degree >= 0, "PolynomialBasis: bad dimensions");
  // Enumerate exponent tuples by total degree, lexicographic within degree.
  std::vector<int> expo(dim, 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == dim - 1) {
      expo[pos] = remaining;
      exponents_.push_back(expo);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      expo[pos] = e;
      rec(pos + 1, remaining - e);
    }
  };
  for (int total = 0; total <= degree; ++total) rec(0, total);
}

void PolynomialBasis::eval(const Vector& x, Eigen::Ref<Vector> out) const {
  require_dims(x.size() == dim_ && out.size() == size(),
               "PolynomialBasis::eval shape mismatch");
  for (size_t b = 0; b < exponents_.size(); ++b) {
    double v = 1.0;
    const auto& expo = exponents_[b];
    for (int i = 0; i < dim_; ++i) {
      for (int e = 0; e < expo[i]; ++e) v *= x[i];
    }
    out[static_cast<int>(b)] = v;
  }
}

StepRegression::StepRegression(const PolynomialBasis& basis,
                               const RegressionConfig& cfg, int paths)
    : basis_(basis), cfg_(cfg) {
  require(paths >= basis.size(),
          "StepRegression: fewer paths than basis functions");
}

void StepRegression::factor(const Matrix& design) {
  design_ = design;
  const int nb = basis_.size();
  Matrix gram = design.transpose() * design;

  // Condition estimate on the unregularized Gram matrix.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const double max_eig = eig.eigenvalues().maxCoeff();
  const double min_eig = eig.eigenvalues().minCoeff();
  condition_ = (min_eig > 0.0) ? max_eig / min_eig
                               : std::numeric_limits<double>::infinity();
  rank_deficient_ = !(min_eig > max_eig * 1e-12);

  const double scale = gram.trace() / nb;
  gram.diagonal().array() += cfg_.ridge * scale;
  factor_.compute(gram);
  require(factor_.info() == Eigen::Success,
          "StepRegression: Gram factorization failed");
}

Matrix StepRegression::fit(const Matrix& payload) const {
  require_dims(payload.rows() == design_.rows(),
               "StepRegression::fit payload row mismatch");
  const Matrix coeff = factor_.solve(design_.transpose() * payload);
  return design_ * coeff;
}

}  // namespace socv
