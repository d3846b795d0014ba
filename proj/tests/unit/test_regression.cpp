#include "socv/regression.hpp"

#include <doctest.h>

#include <random>

using namespace socv;

TEST_CASE("polynomial basis enumerates all monomials up to total degree") {
  const PolynomialBasis basis(2, 2);
  CHECK(basis.size() == 6);  // 1, x, y, x^2, xy, y^2
  Vector x(2);
  x << 2.0, 3.0;
  Vector out(6);
  basis.eval(x, out);
  double sum = 0.0;
  for (int i = 0; i < 6; ++i) sum += out[i];
  // 1 + 2 + 3 + 4 + 6 + 9 = 25 regardless of internal ordering.
  CHECK(sum == doctest::Approx(25.0).epsilon(1e-14));

  const PolynomialBasis linear(3, 1);
  CHECK(linear.size() == 4);
  const PolynomialBasis constant(3, 0);
  CHECK(constant.size() == 1);
}

TEST_CASE("regression recovers polynomial payloads exactly") {
  std::mt19937 gen(3);
  std::normal_distribution<double> normal;
  const int paths = 500;
  const PolynomialBasis basis(2, 2);
  Matrix design(paths, basis.size());
  Matrix payload(paths, 2);
  std::vector<Vector> xs(paths);
  Vector row(basis.size());
  for (int p = 0; p < paths; ++p) {
    Vector x(2);
    x << normal(gen), normal(gen);
    xs[p] = x;
    basis.eval(x, row);
    design.row(p) = row.transpose();
    payload(p, 0) = 3.0 + 2.0 * x[0] - x[1];             // affine
    payload(p, 1) = 1.0 + x[0] * x[1] - 0.5 * x[1] * x[1];  // quadratic
  }
  StepRegression reg(basis, RegressionConfig{2, 1e-8}, paths);
  reg.factor(design);
  const Matrix fitted = reg.fit(payload);
  CHECK((fitted - payload).lpNorm<Eigen::Infinity>() <= 1e-6);
  CHECK(!reg.rank_deficient());
}

TEST_CASE("regression conditional expectation averages independent noise") {
  std::mt19937 gen(5);
  std::normal_distribution<double> normal;
  const int paths = 20000;
  const PolynomialBasis basis(1, 2);
  Matrix design(paths, basis.size());
  Matrix payload(paths, 1);
  Vector row(basis.size());
  for (int p = 0; p < paths; ++p) {
    Vector x(1);
    x << normal(gen);
    basis.eval(x, row);
    design.row(p) = row.transpose();
    payload(p, 0) = x[0] * x[0] + normal(gen);  // E[.|x] = x^2
  }
  StepRegression reg(basis, RegressionConfig{2, 1e-8}, paths);
  reg.factor(design);
  const Matrix fitted = reg.fit(payload);
  // In one dimension the basis is [1, x, x^2], so design(p, 1) recovers x.
  double worst = 0.0;
  for (int p = 0; p < paths; p += 997) {
    const double x = design(p, 1);
    worst = std::max(worst, std::abs(fitted(p, 0) - x * x));
  }
  CHECK(worst <= 0.15);  // ~ sd * sqrt(basis / paths) with slack
}

TEST_CASE("rank-deficient designs are reported and ridge-stabilized") {
  const int paths = 50;
  const PolynomialBasis basis(1, 2);
  Matrix design(paths, basis.size());
  Vector row(basis.size());
  for (int p = 0; p < paths; ++p) {
    basis.eval(Vector::Constant(1, 1.0), row);  // constant regressor state
    design.row(p) = row.transpose();
  }
  StepRegression reg(basis, RegressionConfig{2, 1e-8}, paths);
  reg.factor(design);
  CHECK(reg.rank_deficient());
  CHECK(reg.condition_number() > 1e12);
  const Matrix fitted = reg.fit(Matrix::Ones(paths, 1));
  CHECK(fitted.allFinite());
  CHECK(fitted(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
}
