#include "socv/forward.hpp"

#include <cmath>

namespace socv {

namespace {

Vector control_at(const ControlLaw& law, int path, int step, double t,
                  const Vector& x) {
  if (const auto* open = std::get_if<OpenLoopControl>(&law)) {
    return open->table.col(step);
  }
  if (const auto* per_path = std::get_if<PerPathControl>(&law)) {
    return per_path->field.vec(path, step);
  }
  return std::get<FeedbackControl>(law).phi(t, x);
}

void check_law(const ProblemSpec& spec, const ControlLaw& law,
               const NoiseEnsemble& noise) {
  if (const auto* open = std::get_if<OpenLoopControl>(&law)) {
    require_dims(open->table.rows() == spec.control_dim &&
                     open->table.cols() == noise.steps(),
                 "open-loop control table must be d x N");
  } else if (const auto* per_path = std::get_if<PerPathControl>(&law)) {
    require_dims(per_path->field.paths() == noise.paths() &&
                     per_path->field.steps() == noise.steps() &&
                     per_path->field.rows() == spec.control_dim,
                 "per-path control field shape mismatch");
  } else {
    require(std::get<FeedbackControl>(law).phi != nullptr,
            "feedback control has no callable");
  }
}

}  // namespace

SimulationResult simulate_state(const ProblemSpec& spec, const ControlLaw& law,
                                const NoiseEnsemble& noise,
                                const ParallelConfig& par) {
  spec.validate();
  check_law(spec, law, noise);
  require_dims(noise.noise_dim() == spec.noise_dim,
               "noise ensemble dimension mismatch");
  const int n = spec.state_dim();
  const int paths = noise.paths();
  const int steps = noise.steps();
  const double dt = noise.dt();
  const Vector sg = spec.space.semigroup_factors(dt);

  SimulationResult out{AdaptedField::state_field(paths, steps + 1, n),
                       AdaptedField::control_field(paths, steps,
                                                   spec.control_dim)};
  const auto& coeffs = *spec.coeffs;

  parallel_for(par, paths, [&](int lo, int hi) {
    Vector x(n);
    for (int p = lo; p < hi; ++p) {
      x = spec.x0;
      out.state.vec(p, 0) = x;
      for (int k = 0; k < steps; ++k) {
        const double t = k * dt;
        const Vector u = control_at(law, p, k, t, x);
        out.control.vec(p, k) = u;
        const Vector drift = coeffs.a(t, x, u);
        const Matrix diff = coeffs.b(t, x, u);
        if (!drift.allFinite() || !diff.allFinite()) {
          throw SimulationError("non-finite coefficient value", p, k);
        }
        x = sg.cwiseProduct(x + dt * drift + diff * noise.increments(p, k));
        if (!x.allFinite()) {
          throw SimulationError("non-finite state", p, k);
        }
        out.state.vec(p, k + 1) = x;
      }
    }
  });
  return out;
}

CostEstimate evaluate_cost(const ProblemSpec& spec, const AdaptedField& state,
                           const AdaptedField& control,
                           const NoiseEnsemble& noise) {
  const int paths = noise.paths();
  const int steps = noise.steps();
  const double dt = noise.dt();
  const auto& coeffs = *spec.coeffs;

  std::vector<double> per_path(paths);
  for (int p = 0; p < paths; ++p) {
    double acc = 0.0;
    for (int k = 0; k < steps; ++k) {
      acc += coeffs.f(k * dt, state.vec(p, k), control.vec(p, k)) * dt;
    }
    acc += coeffs.g(state.vec(p, steps));
    if (!std::isfinite(acc)) throw SimulationError("non-finite cost", p, steps);
    per_path[p] = acc;
  }

  double mean = 0.0;
  for (double c : per_path) mean += c;
  mean /= paths;
  double var = 0.0;
  for (double c : per_path) var += (c - mean) * (c - mean);
  var = paths > 1 ? var / (paths - 1) : 0.0;
  return {mean, std::sqrt(var / paths)};
}

CostEstimate evaluate_cost(const ProblemSpec& spec, const ControlLaw& law,
                           const NoiseEnsemble& noise,
                           const ParallelConfig& par) {
  const SimulationResult sim = simulate_state(spec, law, noise, par);
  return evaluate_cost(spec, sim.state, sim.control, noise);
}

AdaptedField simulate_first_variation(const ProblemSpec& spec,
                                      const AdaptedField& xbar,
                                      const AdaptedField& ubar,
                                      const AdaptedField& v,
                                      const NoiseEnsemble& noise,
                                      const ParallelConfig& par) {
  spec.validate();
  const int n = spec.state_dim();
  const int paths = noise.paths();
  const int steps = noise.steps();
  const double dt = noise.dt();
  require_dims(v.rows() == spec.control_dim && v.steps() == steps &&
                   v.paths() == paths,
               "first variation: direction field shape mismatch");
  const Vector sg = spec.space.semigroup_factors(dt);
  const auto& coeffs = *spec.coeffs;

  AdaptedField y1 = AdaptedField::state_field(paths, steps + 1, n);
  parallel_for(par, paths, [&](int lo, int hi) {
    for (int p = lo; p < hi; ++p) {
      Vector y = Vector::Zero(n);
      y1.vec(p, 0) = y;
      for (int k = 0; k < steps; ++k) {
        const double t = k * dt;
        const Vector x = xbar.vec(p, k);
        const Vector u = ubar.vec(p, k);
        const Vector dv = v.vec(p, k);
        const Vector drift = coeffs.a_x(t, x, u) * y + coeffs.a_u(t, x, u) * dv;
        const Matrix diff =
            coeffs.b_x_apply(t, x, u, y) + coeffs.b_u_apply(t, x, u, dv);
        y = sg.cwiseProduct(y + dt * drift + diff * noise.increments(p, k));
        if (!y.allFinite()) throw SimulationError("non-finite y1", p, k);
        y1.vec(p, k + 1) = y;
      }
    }
  });
  return y1;
}

AdaptedField simulate_second_variation(const ProblemSpec& spec,
                                       const AdaptedField& xbar,
                                       const AdaptedField& ubar,
                                       const AdaptedField& v,
                                       const AdaptedField& h,
                                       const AdaptedField& y1,
                                       const NoiseEnsemble& noise,
                                       const ParallelConfig& par) {
  spec.validate();
  if (!spec.coeffs->has_second_derivatives()) {
    throw CapabilityError(
        "simulate_second_variation: family lacks second derivatives");
  }
  const int n = spec.state_dim();
  const int paths = noise.paths();
  const int steps = noise.steps();
  const double dt = noise.dt();
  const Vector sg = spec.space.semigroup_factors(dt);
  const auto& coeffs = *spec.coeffs;

  AdaptedField y2 = AdaptedField::state_field(paths, steps + 1, n);
  parallel_for(par, paths, [&](int lo, int hi) {
    for (int p = lo; p < hi; ++p) {
      Vector y = Vector::Zero(n);
      y2.vec(p, 0) = y;
      for (int k = 0; k < steps; ++k) {
        const double t = k * dt;
        const Vector x = xbar.vec(p, k);
        const Vector u = ubar.vec(p, k);
        const Vector dv = v.vec(p, k);
        const Vector dh = h.vec(p, k);
        const Vector y1k = y1.vec(p, k);
        const Vector drift = coeffs.a_x(t, x, u) * y +
                             2.0 * (coeffs.a_u(t, x, u) * dh) +
                             coeffs.a_xx(t, x, u, y1k, y1k) +
                             2.0 * coeffs.a_xu(t, x, u, y1k, dv) +
                             coeffs.a_uu(t, x, u, dv, dv);
        const Matrix diff = coeffs.b_x_apply(t, x, u, y) +
                            2.0 * coeffs.b_u_apply(t, x, u, dh) +
                            coeffs.b_xx(t, x, u, y1k, y1k) +
                            2.0 * coeffs.b_xu(t, x, u, y1k, dv) +
                            coeffs.b_uu(t, x, u, dv, dv);
        y = sg.cwiseProduct(y + dt * drift + diff * noise.increments(p, k));
        if (!y.allFinite()) throw SimulationError("non-finite y2", p, k);
        y2.vec(p, k + 1) = y;
      }
    }
  });
  return y2;
}

ControlLaw perturbed_control(const AdaptedField& ubar, const AdaptedField& v,
                             const AdaptedField& h, double eps) {
  AdaptedField u = ubar;
  for (int p = 0; p < u.paths(); ++p) {
    for (int k = 0; k < u.steps(); ++k) {
      u.vec(p, k) += eps * v.vec(p, k) + eps * eps * h.vec(p, k);
    }
  }
  return PerPathControl{std::move(u)};
}

namespace {

/// sup-over-steps sample-L2 norm of a residual field plus a delta-method
/// noise floor (stderr of the estimate at the sup-attaining step).
void residual_norm(const AdaptedField& r, double& norm, double& floor) {
  const int paths = r.paths();
  int argmax = 0;
  const Vector by_step = r.sample_l2_by_step();
  norm = by_step.maxCoeff(&argmax);
  if (norm == 0.0) {
    floor = 0.0;
    return;
  }
  double mean_sq = 0.0;
  for (int p = 0; p < paths; ++p) mean_sq += r.at(p, argmax).squaredNorm();
  mean_sq /= paths;
  double var = 0.0;
  for (int p = 0; p < paths; ++p) {
    const double s = r.at(p, argmax).squaredNorm() - mean_sq;
    var += s * s;
  }
  var = paths > 1 ? var / (paths - 1) : 0.0;
  floor = std::sqrt(var / paths) / (2.0 * norm);
}

}  // namespace

std::vector<ExpansionRow> expansion_residuals(const ProblemSpec& spec,
                                              const SimulationResult& base,
                                              const AdaptedField& v,
                                              const AdaptedField& h,
                                              const std::vector<double>& ladder,
                                              const NoiseEnsemble& noise,
                                              const ParallelConfig& par) {
  require(!ladder.empty(), "expansion_residuals: empty ladder");
  for (size_t i = 0; i + 1 < ladder.size(); ++i) {
    require(ladder[i] > ladder[i + 1] && ladder[i + 1] > 0.0,
            "expansion_residuals: ladder must be positive decreasing");
  }

  const AdaptedField y1 =
      simulate_first_variation(spec, base.state, base.control, v, noise, par);
  const AdaptedField y2 = simulate_second_variation(
      spec, base.state, base.control, v, h, y1, noise, par);

  const int paths = noise.paths();
  const int steps1 = noise.steps() + 1;
  const int n = spec.state_dim();
  std::vector<ExpansionRow> rows;
  rows.reserve(ladder.size());
  for (double eps : ladder) {
    const SimulationResult pert = simulate_state(
        spec, perturbed_control(base.control, v, h, eps), noise, par);
    AdaptedField r1 = AdaptedField::state_field(paths, steps1, n);
    AdaptedField r2 = AdaptedField::state_field(paths, steps1, n);
    for (int p = 0; p < paths; ++p) {
      for (int k = 0; k < steps1; ++k) {
        const Vector dx = pert.state.vec(p, k) - base.state.vec(p, k);
        r1.vec(p, k) = dx / eps - y1.vec(p, k);
        r2.vec(p, k) =
            (dx - eps * y1.vec(p, k)) / (eps * eps) - 0.5 * y2.vec(p, k);
      }
    }
    ExpansionRow row;
    row.eps = eps;
    residual_norm(r1, row.r1_norm, row.r1_floor);
    residual_norm(r2, row.r2_norm, row.r2_floor);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace socv
