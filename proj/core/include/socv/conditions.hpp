#pragma once

#include "socv/adjoint.hpp"
#include "socv/forward.hpp"

#include <memory>
#include <string>

namespace socv {

enum class Verdict { Pass, Violated, Inconclusive };

std::string to_string(Verdict v);

/// Outcome of one optimality-condition check. Integral conditions carry
/// (value, stderr); pointwise conditions carry residual aggregates and the
/// fraction of (path, step) cells above their tolerance.
struct ConditionReport {
  std::string id;
  Verdict verdict = Verdict::Pass;
  double value = 0.0;
  double std_error = 0.0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double violation_measure = 0.0;
  Vector step_trace;      // per-step aggregate for the CSV emitter
  std::string note;
  std::shared_ptr<AdaptedField> residual_field;  // where applicable
};

/// Default tolerances of the pointwise checks.
struct ConditionTolerances {
  double pointwise_cell = 5e-2;
  double pointwise_measure = 5e-2;
  double gap = 5e-2;
  double second_gap = 5e-2;
  double critical = 5e-2;
};

struct HamiltonianEval {
  double value = 0.0;
  Vector grad_u;
};

/// H(t,x,u,v,w) = <v, a> + <w, b>_HS - f and its u-gradient
/// a_u' v + b_u* w - f_u.
HamiltonianEval hamiltonian(const ProblemSpec& spec, double t, const Vector& x,
                            const Vector& u, const Vector& v, const Matrix& w);

/// H_u sampled per (path, step) along the candidate pair.
AdaptedField hamiltonian_u_field(const ProblemSpec& spec,
                                 const AdaptedField& xbar,
                                 const AdaptedField& ubar,
                                 const FirstAdjoint& adj,
                                 const NoiseEnsemble& noise);

/// S(t) = H_xu + a_u' P2 + b_u* P2 b_x, arranged d x n so that <S y1, v>
/// pairs a state direction with a control direction.
Matrix s_operator(const ProblemSpec& spec, double t, const Vector& x,
                  const Vector& u, const Vector& p1, const Matrix& q1,
                  const Matrix& p2);

/// Batched companion adjoint for integral-check error bands: same solver,
/// but the regressions are fit independently per path block so batch means
/// expose the coefficient noise. Compute once per candidate pair and share
/// across directions.
FirstAdjoint solve_error_adjoint(const ProblemSpec& spec,
                                 const AdaptedField& xbar,
                                 const AdaptedField& ubar,
                                 const NoiseEnsemble& noise,
                                 const RegressionConfig& reg = {},
                                 int batches = 16);

/// E int <H_u, v> dt with standard error; the necessary condition at an
/// optimum is value <= 0, so the verdict is Violated when value > 3 stderr.
/// The integrand pairs v with raw martingale representatives of (P1, Q1)
/// from `adj`; the stderr comes from batch means of the same integrand over
/// `error_adj` (solved with solve_error_adjoint), so the band covers
/// regression noise as well as path noise. With error_adj = nullptr a
/// companion adjoint is solved internally.
ConditionReport first_order_integral(const ProblemSpec& spec,
                                     const AdaptedField& xbar,
                                     const AdaptedField& ubar,
                                     const FirstAdjoint& adj,
                                     const AdaptedField& v,
                                     const NoiseEnsemble& noise,
                                     const RegressionConfig& reg = {},
                                     const FirstAdjoint* error_adj = nullptr);

/// Pointwise condition H_u[t] in N_U(ubar(t)): per-cell normal-cone
/// residuals, violation measure at the cell tolerance.
ConditionReport first_order_pointwise(const ProblemSpec& spec,
                                      const AdaptedField& xbar,
                                      const AdaptedField& ubar,
                                      const FirstAdjoint& adj,
                                      const NoiseEnsemble& noise,
                                      const ConditionTolerances& tol = {});

/// Maximality gap sup_{u in U} H(t, xbar, u, P1, Q1) - H at ubar, exact for
/// quadratic-in-u Hamiltonians, search ladder otherwise.
ConditionReport maximum_principle_gap(const ProblemSpec& spec,
                                      const AdaptedField& xbar,
                                      const AdaptedField& ubar,
                                      const FirstAdjoint& adj,
                                      const NoiseEnsemble& noise,
                                      const ConditionTolerances& tol = {});

/// Pointwise second-order inequality: sup over u of
/// <P1, da> + <Q1, db> - df + <P2 db, db>/2 with dphi = phi(t,xbar,u) -
/// phi[t].
ConditionReport pointwise_second_gap(const ProblemSpec& spec,
                                     const AdaptedField& xbar,
                                     const AdaptedField& ubar,
                                     const FirstAdjoint& adj,
                                     const SecondAdjoint& adj2,
                                     const NoiseEnsemble& noise,
                                     const ConditionTolerances& tol = {});

/// |<H_u, v>| per cell; v is critical iff the max is at most the critical
/// tolerance.
ConditionReport critical_cone_residual(const ProblemSpec& spec,
                                       const AdaptedField& xbar,
                                       const AdaptedField& ubar,
                                       const FirstAdjoint& adj,
                                       const AdaptedField& v,
                                       const NoiseEnsemble& noise,
                                       const ConditionTolerances& tol = {});

/// Second-order integral condition along (v, h): simulates y1 for v, takes
/// the Q2 terms from realize_q2_action at x1 = y1, and estimates
/// E int [ 2<H_u, h> + 2<S y1, v> + <H_uu v, v> + <P2 b_u v, b_u v>
///         + <b_u v, Qhat2(0, a_u v, b_u v)> + <Q2(0, a_u v, b_u v), b_u v> ].
/// Verdict is Inconclusive when v fails the criticality pre-check.
ConditionReport second_order_integral(const ProblemSpec& spec,
                                      const AdaptedField& xbar,
                                      const AdaptedField& ubar,
                                      const FirstAdjoint& adj,
                                      const SecondAdjoint& adj2,
                                      const AdaptedField& v,
                                      const AdaptedField& h,
                                      const NoiseEnsemble& noise,
                                      const ConditionTolerances& tol = {},
                                      const ParallelConfig& par = {});

}  // namespace socv
