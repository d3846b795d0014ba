#pragma once

#include "socv/forward.hpp"
#include "socv/problem.hpp"

#include <memory>

namespace socv::testing {

/// Family with a = b = 0 and no cost; isolates the semigroup part.
class DriftFreeFamily : public CoefficientFamily {
 public:
  DriftFreeFamily(int n, int m, int d) : n_(n), m_(m), d_(d) {}
  int state_dim() const override { return n_; }
  int noise_dim() const override { return m_; }
  int control_dim() const override { return d_; }
  Vector a(double, const Vector&, const Vector&) const override {
    return Vector::Zero(n_);
  }
  Matrix b(double, const Vector&, const Vector&) const override {
    return Matrix::Zero(n_, m_);
  }
  double f(double, const Vector&, const Vector&) const override { return 0.0; }
  double g(const Vector&) const override { return 0.0; }
  Matrix a_x(double, const Vector&, const Vector&) const override {
    return Matrix::Zero(n_, n_);
  }
  Matrix a_u(double, const Vector&, const Vector&) const override {
    return Matrix::Zero(n_, d_);
  }
  Matrix b_x_col(double, const Vector&, const Vector&, int) const override {
    return Matrix::Zero(n_, n_);
  }
  Matrix b_u_col(double, const Vector&, const Vector&, int) const override {
    return Matrix::Zero(n_, d_);
  }
  Vector f_x(double, const Vector&, const Vector&) const override {
    return Vector::Zero(n_);
  }
  Vector f_u(double, const Vector&, const Vector&) const override {
    return Vector::Zero(d_);
  }
  Vector g_x(const Vector&) const override { return Vector::Zero(n_); }

 private:
  int n_, m_, d_;
};

/// Identity diffusion (b = I columns), zero drift: pure accumulated noise.
class UnitDiffusionFamily : public DriftFreeFamily {
 public:
  UnitDiffusionFamily(int n, int m) : DriftFreeFamily(n, m, 1), n_(n), m_(m) {}
  Matrix b(double, const Vector&, const Vector&) const override {
    return Matrix::Identity(n_, m_);
  }

 private:
  int n_, m_;
};

inline ProblemSpec make_problem(std::shared_ptr<const CoefficientFamily> fam,
                                Vector eigenvalues, Vector x0, double horizon,
                                ControlSet u_set) {
  ProblemSpec spec{TruncatedSpace(std::move(eigenvalues)),
                   fam->noise_dim(),
                   fam->control_dim(),
                   std::move(fam),
                   std::move(u_set),
                   horizon,
                   std::move(x0)};
  return spec;
}

inline ProblemSpec make_lq_problem(int n, int m, int d, const LQParams& params,
                                   Vector eigenvalues, Vector x0,
                                   double horizon, ControlSet u_set) {
  return make_problem(std::make_shared<LQCoefficients>(n, m, d, params),
                      std::move(eigenvalues), std::move(x0), horizon,
                      std::move(u_set));
}

inline ControlLaw zero_control(int d, int steps) {
  return OpenLoopControl{Matrix::Zero(d, steps)};
}

}  // namespace socv::testing
