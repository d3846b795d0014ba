#pragma once

#include "socv/types.hpp"

#include <memory>
#include <vector>

namespace socv {

/// Coefficient family of one control problem: drift a(t,x,u) (beyond Ax),
/// diffusion b(t,x,u) into the truncated noise space, running cost f and
/// terminal cost g, with the derivatives the condition checkers need.
///
/// Conventions:
///   a : n-vector                b : n x m matrix (column j pairs with dW_j)
///   a_x : n x n                 a_u : n x d
///   b_x_col(j) : n x n          b_u_col(j) : n x d   (derivative of column j)
///   f_x : n, f_u : d            g_x : n
/// Second derivatives come in two forms: directional applications
/// (a_xx(y, z) etc.) and contractions against an adjoint covector p or an
/// n x m pairing matrix W (a_xx_p(p) = sum_i p_i d2 a_i / dx dx, n x n).
/// Mixed blocks use rows = first index, cols = second: a_xu_p is n x d with
/// (i, j) = d2 <p, a> / dx_i du_j.
class CoefficientFamily {
 public:
  virtual ~CoefficientFamily() = default;

  virtual int state_dim() const = 0;
  virtual int noise_dim() const = 0;
  virtual int control_dim() const = 0;

  virtual bool has_first_derivatives() const { return true; }
  virtual bool has_second_derivatives() const { return false; }

  virtual Vector a(double t, const Vector& x, const Vector& u) const = 0;
  virtual Matrix b(double t, const Vector& x, const Vector& u) const = 0;
  virtual double f(double t, const Vector& x, const Vector& u) const = 0;
  virtual double g(const Vector& x) const = 0;

  virtual Matrix a_x(double t, const Vector& x, const Vector& u) const;
  virtual Matrix a_u(double t, const Vector& x, const Vector& u) const;
  virtual Matrix b_x_col(double t, const Vector& x, const Vector& u,
                         int j) const;
  virtual Matrix b_u_col(double t, const Vector& x, const Vector& u,
                         int j) const;
  virtual Vector f_x(double t, const Vector& x, const Vector& u) const;
  virtual Vector f_u(double t, const Vector& x, const Vector& u) const;
  virtual Vector g_x(const Vector& x) const;

  // Second derivatives, directional form. Defaults throw CapabilityError.
  virtual Vector a_xx(double t, const Vector& x, const Vector& u,
                      const Vector& y, const Vector& z) const;
  virtual Vector a_xu(double t, const Vector& x, const Vector& u,
                      const Vector& y, const Vector& v) const;
  virtual Vector a_uu(double t, const Vector& x, const Vector& u,
                      const Vector& v, const Vector& w) const;
  virtual Matrix b_xx(double t, const Vector& x, const Vector& u,
                      const Vector& y, const Vector& z) const;
  virtual Matrix b_xu(double t, const Vector& x, const Vector& u,
                      const Vector& y, const Vector& v) const;
  virtual Matrix b_uu(double t, const Vector& x, const Vector& u,
                      const Vector& v, const Vector& w) const;

  // Second derivatives contracted against p (state covector) / W (n x m).
  // Defaults assemble entrywise from the directional form.
  virtual Matrix a_xx_p(double t, const Vector& x, const Vector& u,
                        const Vector& p) const;
  virtual Matrix a_xu_p(double t, const Vector& x, const Vector& u,
                        const Vector& p) const;
  virtual Matrix a_uu_p(double t, const Vector& x, const Vector& u,
                        const Vector& p) const;
  virtual Matrix b_xx_w(double t, const Vector& x, const Vector& u,
                        const Matrix& w) const;
  virtual Matrix b_xu_w(double t, const Vector& x, const Vector& u,
                        const Matrix& w) const;
  virtual Matrix b_uu_w(double t, const Vector& x, const Vector& u,
                        const Matrix& w) const;

  virtual Matrix f_xx(double t, const Vector& x, const Vector& u) const;
  virtual Matrix f_xu(double t, const Vector& x, const Vector& u) const;
  virtual Matrix f_uu(double t, const Vector& x, const Vector& u) const;
  virtual Matrix g_xx(const Vector& x) const;

  /// True when b(t, x, .) is affine, so b(t,x,u') - b(t,x,u) = b_u (u' - u).
  virtual bool b_affine_in_u() const { return false; }

  /// When the Hamiltonian <p,a> + <W,b> - f is an exact quadratic in u,
  /// fills H(u) - H(0) = q . u + u' Huu u / 2 and returns true.
  virtual bool hamiltonian_u_quadratic(double t, const Vector& x,
                                       const Vector& p, const Matrix& w,
                                       Vector& q, Matrix& huu) const;

  /// Applies b_u at (t, x, u) to a control direction v: n x m matrix.
  Matrix b_u_apply(double t, const Vector& x, const Vector& u,
                   const Vector& v) const;
  /// Applies b_x at (t, x, u) to a state direction y: n x m matrix.
  Matrix b_x_apply(double t, const Vector& x, const Vector& u,
                   const Vector& y) const;
  /// Adjoint of b_u against an n x m matrix W: d-vector.
  Vector b_u_adjoint(double t, const Vector& x, const Vector& u,
                     const Matrix& w) const;
  /// Adjoint of b_x against an n x m matrix W: n-vector.
  Vector b_x_adjoint(double t, const Vector& x, const Vector& u,
                     const Matrix& w) const;
};

/// Linear-quadratic family:
///   a(t,x,u)   = B u
///   b_j(t,x,u) = C_j x + D_j u + Sigma_j      (column j)
///   f          = (x'Mx + u'Ru) / 2,  g = x'Gx / 2
struct LQParams {
  Matrix B;                // n x d
  std::vector<Matrix> C;   // m entries, n x n (empty = zeros)
  std::vector<Matrix> D;   // m entries, n x d (empty = zeros)
  Matrix Sigma;            // n x m (empty = zeros)
  Matrix M;                // n x n, symmetric psd
  Matrix R;                // d x d, symmetric pd
  Matrix G;                // n x n, symmetric psd
};

class LQCoefficients : public CoefficientFamily {
 public:
  LQCoefficients(int n, int m, int d, LQParams params);

  int state_dim() const override { return n_; }
  int noise_dim() const override { return m_; }
  int control_dim() const override { return d_; }
  bool has_second_derivatives() const override { return true; }
  bool b_affine_in_u() const override { return true; }

  Vector a(double, const Vector&, const Vector& u) const override;
  Matrix b(double, const Vector& x, const Vector& u) const override;
  double f(double, const Vector& x, const Vector& u) const override;
  double g(const Vector& x) const override;

  Matrix a_x(double, const Vector&, const Vector&) const override;
  Matrix a_u(double, const Vector&, const Vector&) const override;
  Matrix b_x_col(double, const Vector&, const Vector&, int j) const override;
  Matrix b_u_col(double, const Vector&, const Vector&, int j) const override;
  Vector f_x(double, const Vector& x, const Vector&) const override;
  Vector f_u(double, const Vector&, const Vector& u) const override;
  Vector g_x(const Vector& x) const override;

  Vector a_xx(double, const Vector&, const Vector&, const Vector&,
              const Vector&) const override;
  Vector a_xu(double, const Vector&, const Vector&, const Vector&,
              const Vector&) const override;
  Vector a_uu(double, const Vector&, const Vector&, const Vector&,
              const Vector&) const override;
  Matrix b_xx(double, const Vector&, const Vector&, const Vector&,
              const Vector&) const override;
  Matrix b_xu(double, const Vector&, const Vector&, const Vector&,
              const Vector&) const override;
  Matrix b_uu(double, const Vector&, const Vector&, const Vector&,
              const Vector&) const override;
  Matrix a_xx_p(double, const Vector&, const Vector&,
                const Vector&) const override;
  Matrix a_xu_p(double, const Vector&, const Vector&,
                const Vector&) const override;
  Matrix a_uu_p(double, const Vector&, const Vector&,
                const Vector&) const override;
  Matrix b_xx_w(double, const Vector&, const Vector&,
                const Matrix&) const override;
  Matrix b_xu_w(double, const Vector&, const Vector&,
                const Matrix&) const override;
  Matrix b_uu_w(double, const Vector&, const Vector&,
                const Matrix&) const override;
  Matrix f_xx(double, const Vector&, const Vector&) const override;
  Matrix f_xu(double, const Vector&, const Vector&) const override;
  Matrix f_uu(double, const Vector&, const Vector&) const override;
  Matrix g_xx(const Vector&) const override;

  bool hamiltonian_u_quadratic(double t, const Vector& x, const Vector& p,
                               const Matrix& w, Vector& q,
                               Matrix& huu) const override;

  const LQParams& params() const { return params_; }

 private:
  int n_, m_, d_;
  LQParams params_;
};

/// Smooth nonlinear family with bilinear diffusion (requires d == m):
///   a(t,x,u)   = A0 x + B u + kappa * tanh(x)        (componentwise tanh)
///   b_j(t,x,u) = u_j (Gamma_j x + gamma_j)
///   f          = (x'Mx + u'Ru) / 2,  g = x'Gx / 2
struct BilinearParams {
  Matrix A0;                   // n x n
  Matrix B;                    // n x d
  double kappa = 0.0;
  std::vector<Matrix> Gamma;   // m entries, n x n
  std::vector<Vector> gamma;   // m entries, n
  Matrix M, R, G;
};

class BilinearCoefficients : public CoefficientFamily {
 public:
  BilinearCoefficients(int n, int m, BilinearParams params);

  int state_dim() const override { return n_; }
  int noise_dim() const override { return m_; }
  int control_dim() const override { return m_; }  // d == m
  bool has_second_derivatives() const override { return true; }
  bool b_affine_in_u() const override { return true; }

  Vector a(double, const Vector& x, const Vector& u) const override;
  Matrix b(double, const Vector& x, const Vector& u) const override;
  double f(double, const Vector& x, const Vector& u) const override;
  double g(const Vector& x) const override;

  Matrix a_x(double, const Vector& x, const Vector&) const override;
  Matrix a_u(double, const Vector&, const Vector&) const override;
  Matrix b_x_col(double, const Vector&, const Vector& u, int j) const override;
  Matrix b_u_col(double, const Vector& x, const Vector&, int j) const override;
  Vector f_x(double, const Vector& x, const Vector&) const override;
  Vector f_u(double, const Vector&, const Vector& u) const override;
  Vector g_x(const Vector& x) const override;

  Vector a_xx(double, const Vector& x, const Vector&, const Vector& y,
              const Vector& z) const override;
  Vector a_xu(double, const Vector&, const Vector&, const Vector&,
              const Vector&) const override;
  Vector a_uu(double, const Vector&, const Vector&, const Vector&,
              const Vector&) const override;
  Matrix b_xx(double, const Vector&, const Vector&, const Vector&,
              const Vector&) const override;
  Matrix b_xu(double, const Vector&, const Vector&, const Vector& y,
              const Vector& v) const override;
  Matrix b_uu(double, const Vector&, const Vector&, const Vector&,
              const Vector&) const override;
  Matrix a_xx_p(double, const Vector& x, const Vector&,
                const Vector& p) const override;
  Matrix a_xu_p(double, const Vector&, const Vector&,
                const Vector&) const override;
  Matrix a_uu_p(double, const Vector&, const Vector&,
                const Vector&) const override;
  Matrix b_xx_w(double, const Vector&, const Vector&,
                const Matrix&) const override;
  Matrix b_xu_w(double, const Vector&, const Vector&,
                const Matrix& w) const override;
  Matrix b_uu_w(double, const Vector&, const Vector&,
                const Matrix&) const override;
  Matrix f_xx(double, const Vector&, const Vector&) const override;
  Matrix f_xu(double, const Vector&, const Vector&) const override;
  Matrix f_uu(double, const Vector&, const Vector&) const override;
  Matrix g_xx(const Vector&) const override;

  bool hamiltonian_u_quadratic(double t, const Vector& x, const Vector& p,
                               const Matrix& w, Vector& q,
                               Matrix& huu) const override;

  const BilinearParams& params() const { return params_; }

 private:
  int n_, m_;
  BilinearParams params_;
};

}  // namespace socv
