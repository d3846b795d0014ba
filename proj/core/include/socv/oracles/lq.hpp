#pragma once

#include "socv/adjoint.hpp"
#include "socv/types.hpp"

#include <vector>

namespace socv::oracles {

/// Test-problem parametrization of the linear-quadratic family, kept
/// independent of the coefficient classes on purpose: oracle arithmetic
/// never shares code paths with the modules it validates.
struct LQData {
  Vector a_diag;           // diagonal of A (the semigroup generator)
  Matrix B;                // n x d
  std::vector<Matrix> C;   // m entries n x n, state-multiplicative diffusion
  std::vector<Matrix> D;   // m entries n x d, control-multiplicative diffusion
  Matrix Sigma;            // n x m additive diffusion
  Matrix M;                // n x n >= 0
  Matrix R;                // d x d > 0
  Matrix G;                // n x n >= 0

  int n() const { return static_cast<int>(a_diag.size()); }
  int d() const { return static_cast<int>(B.cols()); }
  int m() const { return static_cast<int>(Sigma.cols()); }
  void validate() const;
};

/// Backward Riccati solution sampled on the solver grid (steps + 1 points).
/// `value` integrates the continuous Riccati equation (high-order, for value
/// benchmarks and the analytic adjoint); `gain` comes from the discrete
/// dynamic-programming recursion of the exponential-Euler chain, so the
/// feedback u = -K(t_k) x is optimal for the discretization the simulators
/// and checkers actually see. Both agree to O(dt).
struct RiccatiSolution {
  std::vector<Matrix> value;     // P(t_k), symmetric psd, continuous ODE
  std::vector<Matrix> gain;      // K(t_k); optimal feedback u = -K(t_k) x
  std::vector<double> additive;  // c(t_k): E-value correction from Sigma
  double dt = 0.0;
};

/// Solves the (stochastic) Riccati equation
///   -P' = A'P + PA + M + sum_j C_j'P C_j - (PB + sum_j C_j'P D_j) K,
///    K  = (R + sum_j D_j'P D_j)^{-1} (B'P + sum_j D_j'P C_j),  P(T) = G.
/// The value table uses classical RK4 on a grid refined `refine`-fold
/// relative to `steps`; it reduces to the classical Riccati ODE when
/// C = D = 0. Loss of positive semidefiniteness is reported. The linear
/// feedback is exactly optimal when D = 0 or Sigma = 0 (otherwise the
/// optimal control gains an affine term this oracle does not model).
RiccatiSolution riccati_solve(const LQData& lq, int steps, double horizon,
                              int refine = 8);

/// Value function (1/2) x'P(t)x + c(t) at a grid point index.
double lq_value(const LQData& lq, const RiccatiSolution& riccati, int step,
                const Vector& x);

/// Closed-form first adjoint for the additive-noise LQ problem at the
/// Riccati feedback: P1(t) = -P(t) xbar(t), Q1(t) = -P(t) Sigma.
FirstAdjoint analytic_first_adjoint_lq(const LQData& lq,
                                       const RiccatiSolution& riccati,
                                       const AdaptedField& xbar);

/// Dense-RK4 backward integration of
///   -P2' = Abar'P2 + P2 Abar + sum_j Cbar_j'P2 Cbar_j + Hxx,
///    P2(T) = -G_term,
/// sampled at the solver grid; the deterministic-coefficient oracle for the
/// second adjoint (Lyapunov ODE when Cbar = 0).
std::vector<Matrix> second_adjoint_ode_oracle(const Vector& a_diag,
                                              const Matrix& a_x,
                                              const std::vector<Matrix>& b_x,
                                              const Matrix& hxx,
                                              const Matrix& g_term, int steps,
                                              double horizon, int refine = 8);

}  // namespace socv::oracles
