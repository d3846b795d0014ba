#pragma once

#include "socv/fields.hpp"
#include "socv/noise.hpp"
#include "socv/parallel.hpp"
#include "socv/problem.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace socv {

/// Deterministic open-loop control: one d-vector per step, shared by paths.
struct OpenLoopControl {
  Matrix table;  // d x N
};

/// Per-path open-loop control, adapted by construction.
struct PerPathControl {
  AdaptedField field;  // control field with N steps
};

/// State feedback u_k = phi(t_k, x_k).
struct FeedbackControl {
  std::function<Vector(double, const Vector&)> phi;
};

using ControlLaw = std::variant<OpenLoopControl, PerPathControl, FeedbackControl>;

/// Forward state paths plus the control realized along them.
struct SimulationResult {
  AdaptedField state;    // N+1 steps (step 0 is x0)
  AdaptedField control;  // N steps
};

/// Monte Carlo estimate with its standard error.
struct CostEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Exponential-Euler mild-solution scheme:
///   x_{k+1} = S(dt) [ x_k + a(t_k, x_k, u_k) dt + b(t_k, x_k, u_k) dW_k ].
/// Throws SimulationError with the offending (path, step) on non-finite
/// values.
SimulationResult simulate_state(const ProblemSpec& spec, const ControlLaw& law,
                                const NoiseEnsemble& noise,
                                const ParallelConfig& par = {});

/// Sample mean over paths of sum_k f(t_k, x_k, u_k) dt + g(x_N).
CostEstimate evaluate_cost(const ProblemSpec& spec, const AdaptedField& state,
                           const AdaptedField& control,
                           const NoiseEnsemble& noise);
CostEstimate evaluate_cost(const ProblemSpec& spec, const ControlLaw& law,
                           const NoiseEnsemble& noise,
                           const ParallelConfig& par = {});

/// First variational equation along (xbar, ubar): drift a_x y1 + a_u v,
/// diffusion b_x y1 + b_u v, y1(0) = 0, same scheme and same noise.
AdaptedField simulate_first_variation(const ProblemSpec& spec,
                                      const AdaptedField& xbar,
                                      const AdaptedField& ubar,
                                      const AdaptedField& v,
                                      const NoiseEnsemble& noise,
                                      const ParallelConfig& par = {});

/// Second variational equation; requires the family's second derivatives and
/// the y1 produced by simulate_first_variation for the same (v, noise).
AdaptedField simulate_second_variation(const ProblemSpec& spec,
                                       const AdaptedField& xbar,
                                       const AdaptedField& ubar,
                                       const AdaptedField& v,
                                       const AdaptedField& h,
                                       const AdaptedField& y1,
                                       const NoiseEnsemble& noise,
                                       const ParallelConfig& par = {});

/// One row of the Taylor-expansion diagnostic: eps, sup-over-steps sample-L2
/// norms of r1 = dx/eps - y1 and r2 = (dx - eps y1)/eps^2 - y2/2, and Monte
/// Carlo noise-floor estimates for both norms.
struct ExpansionRow {
  double eps = 0.0;
  double r1_norm = 0.0;
  double r2_norm = 0.0;
  double r1_floor = 0.0;
  double r2_floor = 0.0;
};

/// Expansion residuals over a positive decreasing ladder, all on common
/// noise. Admissibility of ubar + eps v + eps^2 h is not required.
std::vector<ExpansionRow> expansion_residuals(const ProblemSpec& spec,
                                              const SimulationResult& base,
                                              const AdaptedField& v,
                                              const AdaptedField& h,
                                              const std::vector<double>& ladder,
                                              const NoiseEnsemble& noise,
                                              const ParallelConfig& par = {});

/// ubar + eps v + eps^2 h as a per-path control law.
ControlLaw perturbed_control(const AdaptedField& ubar, const AdaptedField& v,
                             const AdaptedField& h, double eps);

}  // namespace socv
