#pragma once

#include "socv/fields.hpp"
#include "socv/forward.hpp"
#include "socv/regression.hpp"

#include <vector>

namespace socv {

/// Samples of the first adjoint pair. P1 lives on grid points 0..N, Q1 on
/// steps 0..N-1. Terminal condition P1(N) = -g_x(xbar(N)) holds samplewise.
/// p1_post holds the regressed continuation value S*(dt) E[P1_{k+1} | x_k];
/// it is the costate the discrete stationarity condition pairs with u_k
/// (P1_k itself already carries step k's running-cost gradient), and the
/// condition checkers read it wherever the Hamiltonian is differentiated
/// in the control.
struct FirstAdjoint {
  AdaptedField p1;       // state-shaped, N+1 steps
  AdaptedField p1_post;  // state-shaped, N steps (continuation values)
  AdaptedField q1;       // n x m,        N steps
  RegressionDiagnostics diagnostics;
};

/// Samples of the second adjoint pair. P2 is n x n on grid points 0..N with
/// P2(N) = -g_xx(xbar(N)); Q2 holds m blocks of n x n per step (layout
/// [Q2_1 .. Q2_m] side by side), symmetrized.
struct SecondAdjoint {
  AdaptedField p2;  // n x n,      N+1 steps
  AdaptedField q2;  // n x (n*m),  N steps
  RegressionDiagnostics diagnostics;

  Eigen::Map<const Matrix> q2_block(int path, int step, int j) const {
    const auto all = q2.at(path, step);
    const int n = p2.rows();
    return Eigen::Map<const Matrix>(all.data() + static_cast<size_t>(j) * n * n,
                                    n, n);
  }
};

/// Backward least-squares Monte Carlo sweep for the first adjoint equation:
/// per step, Q1_k regresses S*(dt) P1_{k+1} (x) dW_k / dt on the state, and
/// P1_k adds dt times the drift a_x' P1 + b_x* Q1 - f_x to the regressed
/// continuation value.
FirstAdjoint solve_first_adjoint(const ProblemSpec& spec,
                                 const AdaptedField& xbar,
                                 const AdaptedField& ubar,
                                 const NoiseEnsemble& noise,
                                 const RegressionConfig& reg = {},
                                 const ParallelConfig& par = {});

/// Backward sweep for the operator-valued second adjoint equation, applied
/// entrywise with the same regression machinery. The dt drift term is
/// sandwiched at the half step so the deterministic part integrates the
/// Lyapunov flow to second order.
SecondAdjoint solve_second_adjoint(const ProblemSpec& spec,
                                   const AdaptedField& xbar,
                                   const AdaptedField& ubar,
                                   const FirstAdjoint& first,
                                   const NoiseEnsemble& noise,
                                   const RegressionConfig& reg = {},
                                   const ParallelConfig& par = {});

/// Hamiltonian Hessian in x along the candidate pair: a_xx contracted with
/// P1 plus b_xx contracted with Q1 minus f_xx, per (path, step).
Matrix hamiltonian_xx(const ProblemSpec& spec, double t, const Vector& x,
                      const Vector& u, const Vector& p1, const Matrix& q1);

/// Finite-dimensional realization of the relaxed-transposition correction:
/// column j at (path, step) is Q2_j(step) x1(step) (or Q2_j' x1 when
/// transposed is set, the Qhat variant).
AdaptedField realize_q2_action(const SecondAdjoint& adj2,
                               const AdaptedField& x1, bool transposed = false);

/// Residual statistics of a duality-identity check over random trials.
struct IdentityCheckResult {
  std::vector<double> residuals;   // normalized, one per trial
  std::vector<double> std_errors;  // Monte Carlo stderr of each residual
  double max_residual = 0.0;
  double mean_residual = 0.0;
};

/// Draws random (t, eta, psi1, psi2), simulates the forward test process z
/// on the ensemble noise, and evaluates both sides of the first-adjoint
/// duality identity; residuals are |LHS-RHS| / (|LHS| + |RHS| + 1).
IdentityCheckResult check_transposition_identity(
    const ProblemSpec& spec, const AdaptedField& xbar, const AdaptedField& ubar,
    const FirstAdjoint& adj, const NoiseEnsemble& noise, int trials,
    uint64_t seed, const ParallelConfig& par = {});

/// Same for the second adjoint: random (t, xi_i, u_i, v_i), forward test
/// processes x1, x2, both sides of the relaxed-transposition identity with
/// the Q2 terms supplied by realize_q2_action.
IdentityCheckResult check_relaxed_transposition_identity(
    const ProblemSpec& spec, const AdaptedField& xbar, const AdaptedField& ubar,
    const FirstAdjoint& adj, const SecondAdjoint& adj2,
    const NoiseEnsemble& noise, int trials, uint64_t seed,
    const ParallelConfig& par = {});

}  // namespace socv
