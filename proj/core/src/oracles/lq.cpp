#include "socv/oracles/lq.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace socv::oracles {
namespace {

void check_psd(const Matrix& p, double tol, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
  if (eig.eigenvalues().minCoeff() < -tol) {
    throw DomainError(std::string(what) +
                      ": matrix lost positive semidefiniteness (min eig = " +
                      std::to_string(eig.eigenvalues().minCoeff()) + ")");
  }
}

}  // namespace

void LQData::validate() const {
  const int nn = n(), dd = d(), mm = m();
  require(nn >= 1 && dd >= 1 && mm >= 1, "LQData: positive dims required");
  require_dims(B.rows() == nn, "LQData: B rows");
  require_dims(M.rows() == nn && M.cols() == nn, "LQData: M shape");
  require_dims(R.rows() == dd && R.cols() == dd, "LQData: R shape");
  require_dims(G.rows() == nn && G.cols() == nn, "LQData: G shape");
  require_dims(Sigma.rows() == nn, "LQData: Sigma rows");
  require_dims(C.empty() || static_cast<int>(C.size()) == mm, "LQData: C count");
  require_dims(D.empty() || static_cast<int>(D.size()) == mm, "LQData: D count");
  Eigen::SelfAdjointEigenSolver<Matrix> eig_r(R);
  require(eig_r.eigenvalues().minCoeff() > 0.0, "LQData: R must be pd");
  check_psd(M, 1e-12, "LQData M");
  check_psd(G, 1e-12, "LQData G");
}

RiccatiSolution riccati_solve(const LQData& lq, int steps, double horizon,
                              int refine) {
  lq.validate();
  require(steps >= 1 && refine >= 1 && horizon > 0.0,
          "riccati_solve: bad grid");
  const int n = lq.n();
  const int m = lq.m();
  const Matrix a = lq.a_diag.asDiagonal();
  const bool has_c = !lq.C.empty();
  const bool has_d = !lq.D.empty();

  auto gain_of = [&](const Matrix& p) {
    Matrix r_eff = lq.R;
    Matrix s = lq.B.transpose() * p;  // d x n
    if (has_d) {
      for (int j = 0; j < m; ++j) {
        r_eff += lq.D[j].transpose() * p * lq.D[j];
        if (has_c) s += lq.D[j].transpose() * p * lq.C[j];
      }
    }
    return Matrix(r_eff.ldlt().solve(s));
  };
  auto rhs = [&](const Matrix& p) {
    // -dP/dt at value p.
    Matrix out = a.transpose() * p + p * a + lq.M;
    if (has_c) {
      for (int j = 0; j < m; ++j) out += lq.C[j].transpose() * p * lq.C[j];
    }
    Matrix s = lq.B.transpose() * p;
    Matrix r_eff = lq.R;
    if (has_d) {
      for (int j = 0; j < m; ++j) {
        r_eff += lq.D[j].transpose() * p * lq.D[j];
        if (has_c) s += lq.D[j].transpose() * p * lq.C[j];
      }
    }
    out -= s.transpose() * r_eff.ldlt().solve(s);
    return out;
  };

  const int fine = steps * refine;
  const double dt = horizon / fine;
  RiccatiSolution sol;
  sol.dt = horizon / steps;
  sol.value.assign(steps + 1, Matrix());
  sol.gain.assign(steps + 1, Matrix());
  sol.additive.assign(steps + 1, 0.0);

  Matrix p = lq.G;
  double c_acc = 0.0;
  sol.value[steps] = p;

  auto additive_rate = [&](const Matrix& pk) {
    // dc/dt backward: (1/2) sum_j sigma_j' P sigma_j.
    double rate = 0.0;
    for (int j = 0; j < lq.Sigma.cols(); ++j) {
      rate += 0.5 * lq.Sigma.col(j).dot(pk * lq.Sigma.col(j));
    }
    return rate;
  };

  for (int i = fine - 1; i >= 0; --i) {
    // RK4 backward step for -P' = rhs(P).
    const Matrix k1 = rhs(p);
    const Matrix k2 = rhs(p + 0.5 * dt * k1);
    const Matrix k3 = rhs(p + 0.5 * dt * k2);
    const Matrix k4 = rhs(p + dt * k3);
    const Matrix p_prev = p;
    p += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    p = 0.5 * (p + p.transpose());
    c_acc += 0.5 * dt * (additive_rate(p_prev) + additive_rate(p));
    if (i % refine == 0) {
      const int k = i / refine;
      check_psd(p, 1e-8 * (1.0 + p.norm()), "riccati_solve");
      sol.value[k] = p;
      sol.additive[k] = c_acc;
    }
  }

  // Feedback gains from the discrete dynamic-programming recursion of the
  // exponential-Euler chain x_{k+1} = Phi (x + dt B u + b(x, u) dW).
  const double dtc = sol.dt;
  const Vector phi = (lq.a_diag.array() * dtc).exp().matrix();
  Matrix pd = lq.G;
  sol.gain[steps] = gain_of(pd);
  for (int k = steps - 1; k >= 0; --k) {
    const Matrix pt = phi.asDiagonal() * pd * phi.asDiagonal();
    Matrix r_eff = lq.R + dtc * lq.B.transpose() * pt * lq.B;
    Matrix s = lq.B.transpose() * pt;  // d x n
    Matrix noise_q = Matrix::Zero(n, n);
    if (has_d || has_c) {
      for (int j = 0; j < m; ++j) {
        const Matrix cj = has_c ? lq.C[j] : Matrix::Zero(n, n);
        const Matrix dj = has_d ? lq.D[j] : Matrix::Zero(n, lq.d());
        r_eff += dj.transpose() * pt * dj;
        s += dj.transpose() * pt * cj;
        noise_q += cj.transpose() * pt * cj;
      }
    }
    const Matrix gain = r_eff.ldlt().solve(s);
    sol.gain[k] = gain;
    pd = dtc * lq.M + pt + dtc * noise_q - dtc * s.transpose() * gain;
    pd = 0.5 * (pd + pd.transpose());
  }
  return sol;
}

double lq_value(const LQData& lq, const RiccatiSolution& riccati, int step,
                const Vector& x) {
  require_dims(x.size() == lq.n(), "lq_value: state dim mismatch");
  return 0.5 * x.dot(riccati.value.at(step) * x) + riccati.additive.at(step);
}

FirstAdjoint analytic_first_adjoint_lq(const LQData& lq,
                                       const RiccatiSolution& riccati,
                                       const AdaptedField& xbar) {
  const int n = lq.n();
  const int m = lq.m();
  const int paths = xbar.paths();
  const int grid = xbar.steps();  // N + 1
  require(static_cast<int>(riccati.value.size()) == grid,
          "analytic_first_adjoint_lq: grid mismatch");
  FirstAdjoint out{AdaptedField::state_field(paths, grid, n),
                   AdaptedField::matrix_field(paths, grid - 1, n, m),
                   {}};
  for (int p = 0; p < paths; ++p) {
    for (int k = 0; k < grid; ++k) {
      out.p1.vec(p, k) = -(riccati.value[k] * xbar.vec(p, k));
      if (k < grid - 1) {
        out.q1.at(p, k) = -(riccati.value[k] * lq.Sigma);
      }
    }
  }
  return out;
}

std::vector<Matrix> second_adjoint_ode_oracle(const Vector& a_diag,
                                              const Matrix& a_x,
                                              const std::vector<Matrix>& b_x,
                                              const Matrix& hxx,
                                              const Matrix& g_term, int steps,
                                              double horizon, int refine) {
  const int n = static_cast<int>(a_diag.size());
  require_dims(a_x.rows() == n && hxx.rows() == n && g_term.rows() == n,
               "second_adjoint_ode_oracle: shape mismatch");
  const Matrix abar = Matrix(a_diag.asDiagonal()) + a_x;
  auto rhs = [&](const Matrix& p) {
    Matrix out = abar.transpose() * p + p * abar + hxx;
    for (const auto& bx : b_x) out += bx.transpose() * p * bx;
    return out;
  };
  const int fine = steps * refine;
  const double dt = horizon / fine;
  std::vector<Matrix> table(steps + 1);
  Matrix p = -g_term;
  table[steps] = p;
  for (int i = fine - 1; i >= 0; --i) {
    const Matrix k1 = rhs(p);
    const Matrix k2 = rhs(p + 0.5 * dt * k1);
    const Matrix k3 = rhs(p + 0.5 * dt * k2);
    const Matrix k4 = rhs(p + dt * k3);
    p += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    p = 0.5 * (p + p.transpose());
    if (i % refine == 0) table[i / refine] = p;
  }
  return table;
}

}  // namespace socv::oracles
