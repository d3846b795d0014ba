#include "socv/oracles/finite_diff.hpp"

namespace socv::oracles {
namespace {

double cost_at(const ProblemSpec& spec, const AdaptedField& ubar,
               const AdaptedField& v, const AdaptedField& h, double eps,
               const NoiseEnsemble& noise, const ParallelConfig& par) {
  return evaluate_cost(spec, perturbed_control(ubar, v, h, eps), noise, par)
      .value;
}

}  // namespace

FiniteDiffResult finite_diff_expansion(const ProblemSpec& spec,
                                       const SimulationResult& base,
                                       const AdaptedField& v,
                                       const AdaptedField& h, double eps,
                                       const NoiseEnsemble& noise,
                                       const ParallelConfig& par) {
  require(eps > 0.0, "finite_diff_expansion: eps must be positive");
  const double j0 = evaluate_cost(spec, base.state, base.control, noise).value;
  const double j_eps = cost_at(spec, base.control, v, h, eps, noise, par);
  const double j_half = cost_at(spec, base.control, v, h, 0.5 * eps, noise, par);

  FiniteDiffResult out;
  out.q1 = (j_eps - j0) / eps;
  const double q1_half = (j_half - j0) / (0.5 * eps);
  out.dj = 2.0 * q1_half - out.q1;  // two-rung Richardson
  out.q2 = (j_eps - j0 - eps * out.dj) / (eps * eps);
  return out;
}

double second_difference_quotient(const ProblemSpec& spec,
                                  const SimulationResult& base,
                                  const AdaptedField& v, double eps,
                                  const NoiseEnsemble& noise,
                                  const ParallelConfig& par) {
  require(eps > 0.0, "second_difference_quotient: eps must be positive");
  AdaptedField zero_h = v;
  zero_h.set_zero();
  const double j0 = evaluate_cost(spec, base.state, base.control, noise).value;
  const double jp = cost_at(spec, base.control, v, zero_h, eps, noise, par);
  const double jm = cost_at(spec, base.control, v, zero_h, -eps, noise, par);
  return (jp - 2.0 * j0 + jm) / (eps * eps);
}

}  // namespace socv::oracles
