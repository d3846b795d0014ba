#include "socv/coefficients.hpp"

#include <cmath>

namespace socv {
namespace {

[[noreturn]] void missing_first() {
  throw CapabilityError("coefficient family lacks first derivatives");
}
[[noreturn]] void missing_second() {
  throw CapabilityError("coefficient family lacks second derivatives");
}

void check_symmetric(const Matrix& m, const char* name) {
  require((m - m.transpose()).lpNorm<Eigen::Infinity>() <=
              1e-10 * (1.0 + m.lpNorm<Eigen::Infinity>()),
          std::string(name) + " must be symmetric");
}

}  // namespace

// ---------------------------------------------------------------------------
// Base defaults
// ---------------------------------------------------------------------------

Matrix CoefficientFamily::a_x(double, const Vector&, const Vector&) const {
  missing_first();
}
Matrix CoefficientFamily::a_u(double, const Vector&, const Vector&) const {
  missing_first();
}
Matrix CoefficientFamily::b_x_col(double, const Vector&, const Vector&,
                                  int) const {
  missing_first();
}
Matrix CoefficientFamily::b_u_col(double, const Vector&, const Vector&,
                                  int) const {
  missing_first();
}
Vector CoefficientFamily::f_x(double, const Vector&, const Vector&) const {
  missing_first();
}
Vector CoefficientFamily::f_u(double, const Vector&, const Vector&) const {
  missing_first();
}
Vector CoefficientFamily::g_x(const Vector&) const { missing_first(); }

Vector CoefficientFamily::a_xx(double, const Vector&, const Vector&,
                               const Vector&, const Vector&) const {
  missing_second();
}
Vector CoefficientFamily::a_xu(double, const Vector&, const Vector&,
                               const Vector&, const Vector&) const {
  missing_second();
}
Vector CoefficientFamily::a_uu(double, const Vector&, const Vector&,
                               const Vector&, const Vector&) const {
  missing_second();
}
Matrix CoefficientFamily::b_xx(double, const Vector&, const Vector&,
                               const Vector&, const Vector&) const {
  missing_second();
}
Matrix CoefficientFamily::b_xu(double, const Vector&, const Vector&,
                               const Vector&, const Vector&) const {
  missing_second();
}
Matrix CoefficientFamily::b_uu(double, const Vector&, const Vector&,
                               const Vector&, const Vector&) const {
  missing_second();
}

Matrix CoefficientFamily::a_xx_p(double t, const Vector& x, const Vector& u,
                                 const Vector& p) const {
  const int n = state_dim();
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v =
          p.dot(a_xx(t, x, u, Vector::Unit(n, i), Vector::Unit(n, j)));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Matrix CoefficientFamily::a_xu_p(double t, const Vector& x, const Vector& u,
                                 const Vector& p) const {
  const int n = state_dim(), d = control_dim();
  Matrix out(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      out(i, j) =
          p.dot(a_xu(t, x, u, Vector::Unit(n, i), Vector::Unit(d, j)));
  return out;
}

Matrix CoefficientFamily::a_uu_p(double t, const Vector& x, const Vector& u,
                                 const Vector& p) const {
  const int d = control_dim();
  Matrix out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v =
          p.dot(a_uu(t, x, u, Vector::Unit(d, i), Vector::Unit(d, j)));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Matrix CoefficientFamily::b_xx_w(double t, const Vector& x, const Vector& u,
                                 const Matrix& w) const {
  const int n = state_dim();
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = w.cwiseProduct(b_xx(t, x, u, Vector::Unit(n, i),
                                           Vector::Unit(n, j)))
                           .sum();
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Matrix CoefficientFamily::b_xu_w(double t, const Vector& x, const Vector& u,
                                 const Matrix& w) const {
  const int n = state_dim(), d = control_dim();
  Matrix out(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      out(i, j) = w.cwiseProduct(b_xu(t, x, u, Vector::Unit(n, i),
                                      Vector::Unit(d, j)))
                      .sum();
  return out;
}

Matrix CoefficientFamily::b_uu_w(double t, const Vector& x, const Vector& u,
                                 const Matrix& w) const {
  const int d = control_dim();
  Matrix out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = w.cwiseProduct(b_uu(t, x, u, Vector::Unit(d, i),
                                           Vector::Unit(d, j)))
                           .sum();
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Matrix CoefficientFamily::f_xx(double, const Vector&, const Vector&) const {
  missing_second();
}
Matrix CoefficientFamily::f_xu(double, const Vector&, const Vector&) const {
  missing_second();
}
Matrix CoefficientFamily::f_uu(double, const Vector&, const Vector&) const {
  missing_second();
}
Matrix CoefficientFamily::g_xx(const Vector&) const { missing_second(); }

bool CoefficientFamily::hamiltonian_u_quadratic(double, const Vector&,
                                                const Vector&, const Matrix&,
                                                Vector&, Matrix&) const {
  return false;
}

Matrix CoefficientFamily::b_u_apply(double t, const Vector& x, const Vector& u,
                                    const Vector& v) const {
  const int n = state_dim(), m = noise_dim();
  Matrix out(n, m);
  for (int j = 0; j < m; ++j) out.col(j) = b_u_col(t, x, u, j) * v;
  return out;
}

Matrix CoefficientFamily::b_x_apply(double t, const Vector& x, const Vector& u,
                                    const Vector& y) const {
  const int n = state_dim(), m = noise_dim();
  Matrix out(n, m);
  for (int j = 0; j < m; ++j) out.col(j) = b_x_col(t, x, u, j) * y;
  return out;
}

Vector CoefficientFamily::b_u_adjoint(double t, const Vector& x,
                                      const Vector& u, const Matrix& w) const {
  Vector out = Vector::Zero(control_dim());
  for (int j = 0; j < noise_dim(); ++j)
    out += b_u_col(t, x, u, j).transpose() * w.col(j);
  return out;
}

Vector CoefficientFamily::b_x_adjoint(double t, const Vector& x,
                                      const Vector& u, const Matrix& w) const {
  Vector out = Vector::Zero(state_dim());
  for (int j = 0; j < noise_dim(); ++j)
    out += b_x_col(t, x, u, j).transpose() * w.col(j);
  return out;
}

// ---------------------------------------------------------------------------
// LQ family
// ---------------------------------------------------------------------------

LQCoefficients::LQCoefficients(int n, int m, int d, LQParams params)
    : n_(n), m_(m), d_(d), params_(std::move(params)) {
  auto& p = params_;
  require_dims(p.B.rows() == n && p.B.cols() == d, "LQ: B must be n x d");
  if (p.C.empty()) p.C.assign(m, Matrix::Zero(n, n));
  if (p.D.empty()) p.D.assign(m, Matrix::Zero(n, d));
  if (p.Sigma.size() == 0) p.Sigma = Matrix::Zero(n, m);
  require_dims(static_cast<int>(p.C.size()) == m &&
                   static_cast<int>(p.D.size()) == m,
               "LQ: need one C_j / D_j per noise channel");
  for (const auto& c : p.C)
    require_dims(c.rows() == n && c.cols() == n, "LQ: C_j must be n x n");
  for (const auto& dj : p.D)
    require_dims(dj.rows() == n && dj.cols() == d, "LQ: D_j must be n x d");
  require_dims(p.Sigma.rows() == n && p.Sigma.cols() == m,
               "LQ: Sigma must be n x m");
  require_dims(p.M.rows() == n && p.M.cols() == n, "LQ: M must be n x n");
  require_dims(p.R.rows() == d && p.R.cols() == d, "LQ: R must be d x d");
  require_dims(p.G.rows() == n && p.G.cols() == n, "LQ: G must be n x n");
  check_symmetric(p.M, "LQ M");
  check_symmetric(p.R, "LQ R");
  check_symmetric(p.G, "LQ G");
}

Vector LQCoefficients::a(double, const Vector&, const Vector& u) const {
  return params_.B * u;
}

Matrix LQCoefficients::b(double, const Vector& x, const Vector& u) const {
  Matrix out(n_, m_);
  for (int j = 0; j < m_; ++j)
    out.col(j) = params_.C[j] * x + params_.D[j] * u + params_.Sigma.col(j);
  return out;
}

double LQCoefficients::f(double, const Vector& x, const Vector& u) const {
  return 0.5 * (x.dot(params_.M * x) + u.dot(params_.R * u));
}

double LQCoefficients::g(const Vector& x) const {
  return 0.5 * x.dot(params_.G * x);
}

Matrix LQCoefficients::a_x(double, const Vector&, const Vector&) const {
  return Matrix::Zero(n_, n_);
}
Matrix LQCoefficients::a_u(double, const Vector&, const Vector&) const {
  return params_.B;
}
Matrix LQCoefficients::b_x_col(double, const Vector&, const Vector&,
                               int j) const {
  return params_.C[j];
}
Matrix LQCoefficients::b_u_col(double, const Vector&, const Vector&,
                               int j) const {
  return params_.D[j];
}
Vector LQCoefficients::f_x(double, const Vector& x, const Vector&) const {
  return params_.M * x;
}
Vector LQCoefficients::f_u(double, const Vector&, const Vector& u) const {
  return params_.R * u;
}
Vector LQCoefficients::g_x(const Vector& x) const { return params_.G * x; }

Vector LQCoefficients::a_xx(double, const Vector&, const Vector&,
                            const Vector&, const Vector&) const {
  return Vector::Zero(n_);
}
Vector LQCoefficients::a_xu(double, const Vector&, const Vector&,
                            const Vector&, const Vector&) const {
  return Vector::Zero(n_);
}
Vector LQCoefficients::a_uu(double, const Vector&, const Vector&,
                            const Vector&, const Vector&) const {
  return Vector::Zero(n_);
}
Matrix LQCoefficients::b_xx(double, const Vector&, const Vector&,
                            const Vector&, const Vector&) const {
  return Matrix::Zero(n_, m_);
}
Matrix LQCoefficients::b_xu(double, const Vector&, const Vector&,
                            const Vector&, const Vector&) const {
  return Matrix::Zero(n_, m_);
}
Matrix LQCoefficients::b_uu(double, const Vector&, const Vector&,
                            const Vector&, const Vector&) const {
  return Matrix::Zero(n_, m_);
}
Matrix LQCoefficients::a_xx_p(double, const Vector&, const Vector&,
                              const Vector&) const {
  return Matrix::Zero(n_, n_);
}
Matrix LQCoefficients::a_xu_p(double, const Vector&, const Vector&,
                              const Vector&) const {
  return Matrix::Zero(n_, d_);
}
Matrix LQCoefficients::a_uu_p(double, const Vector&, const Vector&,
                              const Vector&) const {
  return Matrix::Zero(d_, d_);
}
Matrix LQCoefficients::b_xx_w(double, const Vector&, const Vector&,
                              const Matrix&) const {
  return Matrix::Zero(n_, n_);
}
Matrix LQCoefficients::b_xu_w(double, const Vector&, const Vector&,
                              const Matrix&) const {
  return Matrix::Zero(n_, d_);
}
Matrix LQCoefficients::b_uu_w(double, const Vector&, const Vector&,
                              const Matrix&) const {
  return Matrix::Zero(d_, d_);
}
Matrix LQCoefficients::f_xx(double, const Vector&, const Vector&) const {
  return params_.M;
}
Matrix LQCoefficients::f_xu(double, const Vector&, const Vector&) const {
  return Matrix::Zero(n_, d_);
}
Matrix LQCoefficients::f_uu(double, const Vector&, const Vector&) const {
  return params_.R;
}
Matrix LQCoefficients::g_xx(const Vector&) const { return params_.G; }

bool LQCoefficients::hamiltonian_u_quadratic(double, const Vector&,
                                             const Vector& p, const Matrix& w,
                                             Vector& q, Matrix& huu) const {
  q = params_.B.transpose() * p;
  for (int j = 0; j < m_; ++j) q += params_.D[j].transpose() * w.col(j);
  huu = -params_.R;
  return true;
}

// ---------------------------------------------------------------------------
// Bilinear family
// ---------------------------------------------------------------------------

BilinearCoefficients::BilinearCoefficients(int n, int m, BilinearParams params)
    : n_(n), m_(m), params_(std::move(params)) {
  auto& p = params_;
  require_dims(p.A0.rows() == n && p.A0.cols() == n, "bilinear: A0 is n x n");
  require_dims(p.B.rows() == n && p.B.cols() == m, "bilinear: B is n x d=m");
  require_dims(static_cast<int>(p.Gamma.size()) == m &&
                   static_cast<int>(p.gamma.size()) == m,
               "bilinear: need Gamma_j / gamma_j per channel");
  for (const auto& gj : p.Gamma)
    require_dims(gj.rows() == n && gj.cols() == n, "bilinear: Gamma_j n x n");
  for (const auto& gj : p.gamma)
    require_dims(gj.size() == n, "bilinear: gamma_j length n");
  require_dims(p.M.rows() == n && p.M.cols() == n, "bilinear: M n x n");
  require_dims(p.R.rows() == m && p.R.cols() == m, "bilinear: R d x d");
  require_dims(p.G.rows() == n && p.G.cols() == n, "bilinear: G n x n");
  check_symmetric(p.M, "bilinear M");
  check_symmetric(p.R, "bilinear R");
  check_symmetric(p.G, "bilinear G");
}

Vector BilinearCoefficients::a(double, const Vector& x, const Vector& u) const {
  Vector out = params_.A0 * x + params_.B * u;
  if (params_.kappa != 0.0)
    out += params_.kappa * x.array().tanh().matrix();
  return out;
}

Matrix BilinearCoefficients::b(double, const Vector& x, const Vector& u) const {
  Matrix out(n_, m_);
  for (int j = 0; j < m_; ++j)
    out.col(j) = u[j] * (params_.Gamma[j] * x + params_.gamma[j]);
  return out;
}

double BilinearCoefficients::f(double, const Vector& x, const Vector& u) const {
  return 0.5 * (x.dot(params_.M * x) + u.dot(params_.R * u));
}

double BilinearCoefficients::g(const Vector& x) const {
  return 0.5 * x.dot(params_.G * x);
}

Matrix BilinearCoefficients::a_x(double, const Vector& x, const Vector&) const {
  Matrix out = params_.A0;
  if (params_.kappa != 0.0) {
    const Eigen::ArrayXd th = x.array().tanh();
    out += (params_.kappa * (1.0 - th * th)).matrix().asDiagonal();
  }
  return out;
}
Matrix BilinearCoefficients::a_u(double, const Vector&, const Vector&) const {
  return params_.B;
}
Matrix BilinearCoefficients::b_x_col(double, const Vector&, const Vector& u,
                                     int j) const {
  return u[j] * params_.Gamma[j];
}
Matrix BilinearCoefficients::b_u_col(double, const Vector& x, const Vector&,
                                     int j) const {
  Matrix out = Matrix::Zero(n_, m_);
  out.col(j) = params_.Gamma[j] * x + params_.gamma[j];
  return out;
}
Vector BilinearCoefficients::f_x(double, const Vector& x, const Vector&) const {
  return params_.M * x;
}
Vector BilinearCoefficients::f_u(double, const Vector&, const Vector& u) const {
  return params_.R * u;
}
Vector BilinearCoefficients::g_x(const Vector& x) const { return params_.G * x; }

Vector BilinearCoefficients::a_xx(double, const Vector& x, const Vector&,
                                  const Vector& y, const Vector& z) const {
  if (params_.kappa == 0.0) return Vector::Zero(n_);
  // d2/dx2 tanh = -2 tanh sech^2, diagonal per coordinate.
  const Eigen::ArrayXd th = x.array().tanh();
  const Eigen::ArrayXd curv = -2.0 * th * (1.0 - th * th) * params_.kappa;
  return (curv * y.array() * z.array()).matrix();
}
Vector BilinearCoefficients::a_xu(double, const Vector&, const Vector&,
                                  const Vector&, const Vector&) const {
  return Vector::Zero(n_);
}
Vector BilinearCoefficients::a_uu(double, const Vector&, const Vector&,
                                  const Vector&, const Vector&) const {
  return Vector::Zero(n_);
}
Matrix BilinearCoefficients::b_xx(double, const Vector&, const Vector&,
                                  const Vector&, const Vector&) const {
  return Matrix::Zero(n_, m_);
}
Matrix BilinearCoefficients::b_xu(double, const Vector&, const Vector&,
                                  const Vector& y, const Vector& v) const {
  Matrix out(n_, m_);
  for (int j = 0; j < m_; ++j) out.col(j) = v[j] * (params_.Gamma[j] * y);
  return out;
}
Matrix BilinearCoefficients::b_uu(double, const Vector&, const Vector&,
                                  const Vector&, const Vector&) const {
  return Matrix::Zero(n_, m_);
}
Matrix BilinearCoefficients::a_xx_p(double, const Vector& x, const Vector&,
                                    const Vector& p) const {
  if (params_.kappa == 0.0) return Matrix::Zero(n_, n_);
  const Eigen::ArrayXd th = x.array().tanh();
  const Eigen::ArrayXd curv = -2.0 * th * (1.0 - th * th) * params_.kappa;
  return (curv * p.array()).matrix().asDiagonal();
}
Matrix BilinearCoefficients::a_xu_p(double, const Vector&, const Vector&,
                                    const Vector&) const {
  return Matrix::Zero(n_, m_);
}
Matrix BilinearCoefficients::a_uu_p(double, const Vector&, const Vector&,
                                    const Vector&) const {
  return Matrix::Zero(m_, m_);
}
Matrix BilinearCoefficients::b_xx_w(double, const Vector&, const Vector&,
                                    const Matrix&) const {
  return Matrix::Zero(n_, n_);
}
Matrix BilinearCoefficients::b_xu_w(double, const Vector&, const Vector&,
                                    const Matrix& w) const {
  // (i, j) entry: <w_col_j, Gamma_j e_i> = (Gamma_j' w_col_j)_i.
  Matrix out(n_, m_);
  for (int j = 0; j < m_; ++j)
    out.col(j) = params_.Gamma[j].transpose() * w.col(j);
  return out;
}
Matrix BilinearCoefficients::b_uu_w(double, const Vector&, const Vector&,
                                    const Matrix&) const {
  return Matrix::Zero(m_, m_);
}
Matrix BilinearCoefficients::f_xx(double, const Vector&, const Vector&) const {
  return params_.M;
}
Matrix BilinearCoefficients::f_xu(double, const Vector&, const Vector&) const {
  return Matrix::Zero(n_, m_);
}
Matrix BilinearCoefficients::f_uu(double, const Vector&, const Vector&) const {
  return params_.R;
}
Matrix BilinearCoefficients::g_xx(const Vector&) const { return params_.G; }

bool BilinearCoefficients::hamiltonian_u_quadratic(double, const Vector& x,
                                                   const Vector& p,
                                                   const Matrix& w, Vector& q,
                                                   Matrix& huu) const {
  q = params_.B.transpose() * p;
  for (int j = 0; j < m_; ++j)
    q[j] += w.col(j).dot(params_.Gamma[j] * x + params_.gamma[j]);
  huu = -params_.R;
  return true;
}

}  // namespace socv
