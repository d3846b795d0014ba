#pragma once

#include "socv/forward.hpp"

namespace socv::oracles {

/// First- and second-order difference quotients of the cost along
/// ubar + eps v + eps^2 h, all evaluated on one common noise ensemble:
///   q1 = [J(u_eps) - J(ubar)] / eps
///   q2 = [J(u_eps) - J(ubar) - eps dJ] / eps^2
/// with dJ the two-rung Richardson extrapolation of q1 (rungs eps, eps/2).
struct FiniteDiffResult {
  double q1 = 0.0;
  double q2 = 0.0;
  double dj = 0.0;
};

FiniteDiffResult finite_diff_expansion(const ProblemSpec& spec,
                                       const SimulationResult& base,
                                       const AdaptedField& v,
                                       const AdaptedField& h, double eps,
                                       const NoiseEnsemble& noise,
                                       const ParallelConfig& par = {});

/// Central second difference (J(ubar + eps v) - 2 J(ubar) + J(ubar - eps v))
/// / eps^2 on common noise; the direct estimate of d^2 J(v, v).
double second_difference_quotient(const ProblemSpec& spec,
                                  const SimulationResult& base,
                                  const AdaptedField& v, double eps,
                                  const NoiseEnsemble& noise,
                                  const ParallelConfig& par = {});

}  // namespace socv::oracles
