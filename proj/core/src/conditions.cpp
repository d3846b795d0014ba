#include "socv/conditions.hpp"

#include "socv/hilbert.hpp"
#include "socv/umax.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace socv {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Violated:
      return "violated";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

HamiltonianEval hamiltonian(const ProblemSpec& spec, double t, const Vector& x,
                            const Vector& u, const Vector& v, const Matrix& w) {
  const auto& coeffs = *spec.coeffs;
  HamiltonianEval out;
  out.value = v.dot(coeffs.a(t, x, u)) + hs_inner(w, coeffs.b(t, x, u)) -
              coeffs.f(t, x, u);
  out.grad_u = coeffs.a_u(t, x, u).transpose() * v +
               coeffs.b_u_adjoint(t, x, u, w) - coeffs.f_u(t, x, u);
  return out;
}

AdaptedField hamiltonian_u_field(const ProblemSpec& spec,
                                 const AdaptedField& xbar,
                                 const AdaptedField& ubar,
                                 const FirstAdjoint& adj,
                                 const NoiseEnsemble& noise) {
  const int paths = noise.paths();
  const int steps = noise.steps();
  const double dt = noise.dt();
  const auto& coeffs = *spec.coeffs;
  AdaptedField hu =
      AdaptedField::control_field(paths, steps, spec.control_dim);
  for (int p = 0; p < paths; ++p) {
    for (int k = 0; k < steps; ++k) {
      const double t = k * dt;
      const Vector x = xbar.vec(p, k);
      const Vector u = ubar.vec(p, k);
      // Control pairings read the continuation costate (see FirstAdjoint).
      hu.vec(p, k) = coeffs.a_u(t, x, u).transpose() * adj.p1_post.vec(p, k) +
                     coeffs.b_u_adjoint(t, x, u, adj.q1.at(p, k)) -
                     coeffs.f_u(t, x, u);
    }
  }
  return hu;
}

Matrix s_operator(const ProblemSpec& spec, double t, const Vector& x,
                  const Vector& u, const Vector& p1, const Matrix& q1,
                  const Matrix& p2) {
  const auto& coeffs = *spec.coeffs;
  // H_xu is stored n x d (rows = x index); the operator pairs state
  // directions into control covectors, so it enters transposed.
  const Matrix hxu = coeffs.a_xu_p(t, x, u, p1) + coeffs.b_xu_w(t, x, u, q1) -
                     coeffs.f_xu(t, x, u);
  Matrix s = hxu.transpose() + coeffs.a_u(t, x, u).transpose() * p2;
  for (int j = 0; j < spec.noise_dim; ++j) {
    s += coeffs.b_u_col(t, x, u, j).transpose() * p2 *
         coeffs.b_x_col(t, x, u, j);
  }
  return s;
}

namespace {

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& samples) {
  const size_t count = samples.size();
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var = count > 1 ? var / static_cast<double>(count - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(count))};
}

/// Fraction of cells whose adjacent-cone residual at ubar exceeds the
/// membership-scale tolerance; used to annotate direction fields.
double tangency_violation_fraction(const ControlSet& set,
                                   const AdaptedField& ubar,
                                   const AdaptedField& v) {
  long bad = 0, total = 0;
  for (int p = 0; p < ubar.paths(); ++p) {
    for (int k = 0; k < ubar.steps(); ++k) {
      ++total;
      const Vector u = set.project(ubar.vec(p, k));
      if (set.adjacent_cone_residual(u, v.vec(p, k)) > 1e-7) ++bad;
    }
  }
  return static_cast<double>(bad) / static_cast<double>(total);
}

void integral_verdict(ConditionReport& report) {
  if (report.value > 3.0 * report.std_error) {
    report.verdict = Verdict::Violated;
  } else {
    report.verdict = Verdict::Pass;
    if (std::abs(report.value) <= 3.0 * report.std_error) {
      report.note += report.note.empty() ? "" : "; ";
      report.note += "within Monte Carlo noise";
    }
  }
}

}  // namespace

namespace {

/// Per-path integral of <H_u, v> dt with H_u assembled from the raw
/// martingale representatives of (P1, Q1): same expectation as the fitted
/// field by the tower property, but the dispersion reflects the actual
/// Monte Carlo noise of the estimate.
std::vector<double> raw_pairing_integral(const ProblemSpec& spec,
                                         const AdaptedField& xbar,
                                         const AdaptedField& ubar,
                                         const FirstAdjoint& adj,
                                         const AdaptedField& v,
                                         const NoiseEnsemble& noise,
                                         Vector* trace_out) {
  const int paths = noise.paths();
  const int steps = noise.steps();
  const double dt = noise.dt();
  const auto& coeffs = *spec.coeffs;
  const Vector sg = spec.space.semigroup_factors(dt);
  std::vector<double> per_path(paths, 0.0);
  Vector trace = Vector::Zero(steps);
  for (int p = 0; p < paths; ++p) {
    double acc = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double t = k * dt;
      const Vector x = xbar.vec(p, k);
      const Vector u = ubar.vec(p, k);
      const Vector raw_p1 = sg.cwiseProduct(adj.p1.vec(p, k + 1));
      const Vector centered = raw_p1 - adj.p1_post.vec(p, k);
      const auto dw = noise.increments(p, k);
      Vector hu_cell = coeffs.a_u(t, x, u).transpose() * raw_p1 -
                       coeffs.f_u(t, x, u);
      for (int j = 0; j < spec.noise_dim; ++j) {
        hu_cell += coeffs.b_u_col(t, x, u, j).transpose() *
                   (centered * (dw[j] / dt));
      }
      const double cell = hu_cell.dot(v.vec(p, k));
      acc += cell * dt;
      trace[k] += cell;
    }
    per_path[p] = acc;
  }
  trace /= paths;
  if (trace_out) *trace_out = trace;
  return per_path;
}

}  // namespace

FirstAdjoint solve_error_adjoint(const ProblemSpec& spec,
                                 const AdaptedField& xbar,
                                 const AdaptedField& ubar,
                                 const NoiseEnsemble& noise,
                                 const RegressionConfig& reg, int batches) {
  RegressionConfig batched = reg;
  batched.batches = std::max(batches, 2);
  return solve_first_adjoint(spec, xbar, ubar, noise, batched);
}

ConditionReport first_order_integral(const ProblemSpec& spec,
                                     const AdaptedField& xbar,
                                     const AdaptedField& ubar,
                                     const FirstAdjoint& adj,
                                     const AdaptedField& v,
                                     const NoiseEnsemble& noise,
                                     const RegressionConfig& reg,
                                     const FirstAdjoint* error_adj) {
  spec.validate();
  const int paths = noise.paths();
  const int steps = noise.steps();
  require_dims(v.paths() == paths && v.steps() == steps &&
                   v.rows() == spec.control_dim,
               "first_order_integral: direction field shape mismatch");

  Vector trace;
  const std::vector<double> per_path =
      raw_pairing_integral(spec, xbar, ubar, adj, v, noise, &trace);

  ConditionReport report;
  report.id = "first_order_integral";
  report.value = mean_stderr(per_path).mean;
  report.step_trace = trace;

  // Error band from batch means over block-independent fits.
  FirstAdjoint companion;
  if (!error_adj) {
    companion = solve_error_adjoint(spec, xbar, ubar, noise, reg);
    error_adj = &companion;
  }
  const std::vector<double> batched =
      raw_pairing_integral(spec, xbar, ubar, *error_adj, v, noise, nullptr);
  const PolynomialBasis basis(spec.state_dim(), reg.degree);
  const auto blocks = regression_batches(paths, basis.size(), 16);
  std::vector<double> block_means;
  block_means.reserve(blocks.size());
  for (const auto& [lo, hi] : blocks) {
    double acc = 0.0;
    for (int p = lo; p < hi; ++p) acc += batched[p];
    block_means.push_back(acc / (hi - lo));
  }
  report.std_error = block_means.size() >= 2
                         ? mean_stderr(block_means).std_error
                         : mean_stderr(per_path).std_error;

  const double tangency =
      tangency_violation_fraction(spec.control_set, ubar, v);
  if (tangency > 0.0) {
    report.note = "tangency violated on " + std::to_string(tangency) +
                  " of cells";
  }
  integral_verdict(report);
  return report;
}

ConditionReport first_order_pointwise(const ProblemSpec& spec,
                                      const AdaptedField& xbar,
                                      const AdaptedField& ubar,
                                      const FirstAdjoint& adj,
                                      const NoiseEnsemble& noise,
                                      const ConditionTolerances& tol) {
  spec.validate();
  const int paths = noise.paths();
  const int steps = noise.steps();
  const AdaptedField hu = hamiltonian_u_field(spec, xbar, ubar, adj, noise);

  auto field = std::make_shared<AdaptedField>(
      AdaptedField::scalar_field(paths, steps));
  long violated = 0;
  double max_res = 0.0, sum_res = 0.0;
  Vector trace = Vector::Zero(steps);
  for (int p = 0; p < paths; ++p) {
    for (int k = 0; k < steps; ++k) {
      const double res = spec.control_set.normal_cone_residual(
          ubar.vec(p, k), hu.vec(p, k));
      field->scalar(p, k) = res;
      max_res = std::max(max_res, res);
      sum_res += res;
      trace[k] += res;
      if (res > tol.pointwise_cell) ++violated;
    }
  }
  trace /= paths;

  ConditionReport report;
  report.id = "first_order_pointwise";
  report.max_residual = max_res;
  report.mean_residual = sum_res / (static_cast<double>(paths) * steps);
  report.violation_measure =
      static_cast<double>(violated) / (static_cast<double>(paths) * steps);
  report.step_trace = trace;
  report.residual_field = field;
  report.verdict = report.violation_measure <= tol.pointwise_measure
                       ? Verdict::Pass
                       : Verdict::Violated;
  return report;
}

namespace {

/// Per-cell Hamiltonian maximization. Uses the family's exact quadratic
/// structure when available, otherwise a bounded search ladder.
double hamiltonian_gap_cell(const ProblemSpec& spec, double t, const Vector& x,
                            const Vector& u, const Vector& p1,
                            const Matrix& q1) {
  const auto& coeffs = *spec.coeffs;
  Vector q;
  Matrix h;
  if (coeffs.hamiltonian_u_quadratic(t, x, p1, q1, q, h)) {
    const MaximizeResult max = maximize_quadratic(spec.control_set, q, h);
    if (max.unbounded) {
      throw CapabilityError(
          "maximum_principle_gap: Hamiltonian unbounded above on U");
    }
    const double at_ubar = q.dot(u) + 0.5 * u.dot(h * u);
    return std::max(0.0, max.value - at_ubar);
  }
  const double at_ubar = hamiltonian(spec, t, x, u, p1, q1).value;
  const MaximizeResult max =
      maximize_on_set(spec.control_set, [&](const Vector& cand) {
        return hamiltonian(spec, t, x, cand, p1, q1).value;
      });
  return std::max(0.0, max.value - at_ubar);
}

ConditionReport gap_report(const NoiseEnsemble& noise, double cell_tol,
                           const std::string& id,
                           const std::function<double(int, int, double)>& gap) {
  const int paths = noise.paths();
  const int steps = noise.steps();
  const double dt = noise.dt();
  auto field = std::make_shared<AdaptedField>(
      AdaptedField::scalar_field(paths, steps));
  double max_gap = 0.0, sum = 0.0;
  long violated = 0;
  Vector trace = Vector::Zero(steps);
  for (int p = 0; p < paths; ++p) {
    for (int k = 0; k < steps; ++k) {
      const double g = gap(p, k, k * dt);
      field->scalar(p, k) = g;
      max_gap = std::max(max_gap, g);
      sum += g;
      trace[k] += g;
      if (g > cell_tol) ++violated;
    }
  }
  trace /= paths;

  ConditionReport report;
  report.id = id;
  report.max_residual = max_gap;
  report.mean_residual = sum / (static_cast<double>(paths) * steps);
  report.violation_measure =
      static_cast<double>(violated) / (static_cast<double>(paths) * steps);
  report.step_trace = trace;
  report.residual_field = field;
  report.verdict = max_gap <= cell_tol ? Verdict::Pass : Verdict::Violated;
  return report;
}

}  // namespace

ConditionReport maximum_principle_gap(const ProblemSpec& spec,
                                      const AdaptedField& xbar,
                                      const AdaptedField& ubar,
                                      const FirstAdjoint& adj,
                                      const NoiseEnsemble& noise,
                                      const ConditionTolerances& tol) {
  spec.validate();
  return gap_report(noise, tol.gap, "max_principle",
                    [&](int p, int k, double t) {
                      return hamiltonian_gap_cell(spec, t, xbar.vec(p, k),
                                                  ubar.vec(p, k),
                                                  adj.p1_post.vec(p, k),
                                                  adj.q1.at(p, k));
                    });
}

ConditionReport pointwise_second_gap(const ProblemSpec& spec,
                                     const AdaptedField& xbar,
                                     const AdaptedField& ubar,
                                     const FirstAdjoint& adj,
                                     const SecondAdjoint& adj2,
                                     const NoiseEnsemble& noise,
                                     const ConditionTolerances& tol) {
  spec.validate();
  const auto& coeffs = *spec.coeffs;
  const int m = spec.noise_dim;

  auto cell = [&](int p, int k, double t) -> double {
    const Vector x = xbar.vec(p, k);
    const Vector u = ubar.vec(p, k);
    const Vector p1 = adj.p1_post.vec(p, k);
    const Matrix q1 = adj.q1.at(p, k);
    const Matrix p2 = adj2.p2.at(p, k);

    Vector q;
    Matrix h;
    if (coeffs.hamiltonian_u_quadratic(t, x, p1, q1, q, h) &&
        coeffs.b_affine_in_u()) {
      // expr(u') = H(u') - H(u) + <P2 b_u (u'-u), b_u (u'-u)> / 2 is an
      // exact quadratic; maximize it in absolute coordinates.
      Matrix h2 = h;
      for (int j = 0; j < m; ++j) {
        const Matrix buj = coeffs.b_u_col(t, x, u, j);
        h2 += buj.transpose() * p2 * buj;
      }
      h2 = 0.5 * (h2 + h2.transpose());
      // Gradient of expr at u' equals H_u at u' plus the P2 correction;
      // in absolute form the linear term is Hu(ubar) - H2 ubar.
      const Vector hu = q + h * u;
      const Vector q2 = hu - h2 * u;
      const MaximizeResult max = maximize_quadratic(spec.control_set, q2, h2);
      if (max.unbounded) {
        throw CapabilityError(
            "pointwise_second_gap: expression unbounded above on U");
      }
      const double at_ubar = q2.dot(u) + 0.5 * u.dot(h2 * u);
      return std::max(0.0, max.value - at_ubar);
    }

    const Vector a0 = coeffs.a(t, x, u);
    const Matrix b0 = coeffs.b(t, x, u);
    const double f0 = coeffs.f(t, x, u);
    const MaximizeResult max =
        maximize_on_set(spec.control_set, [&](const Vector& cand) {
          const Vector da = coeffs.a(t, x, cand) - a0;
          const Matrix db = coeffs.b(t, x, cand) - b0;
          const double df = coeffs.f(t, x, cand) - f0;
          return p1.dot(da) + hs_inner(q1, db) - df +
                 0.5 * hs_inner(p2 * db, db);
        });
    return std::max(0.0, max.value);
  };

  return gap_report(noise, tol.second_gap, "pointwise_second_gap", cell);
}

ConditionReport critical_cone_residual(const ProblemSpec& spec,
                                       const AdaptedField& xbar,
                                       const AdaptedField& ubar,
                                       const FirstAdjoint& adj,
                                       const AdaptedField& v,
                                       const NoiseEnsemble& noise,
                                       const ConditionTolerances& tol) {
  spec.validate();
  const int paths = noise.paths();
  const int steps = noise.steps();
  const AdaptedField hu = hamiltonian_u_field(spec, xbar, ubar, adj, noise);

  auto field = std::make_shared<AdaptedField>(
      AdaptedField::scalar_field(paths, steps));
  double max_res = 0.0, sum = 0.0;
  Vector trace = Vector::Zero(steps);
  long violated = 0;
  for (int p = 0; p < paths; ++p) {
    for (int k = 0; k < steps; ++k) {
      const double res = std::abs(hu.vec(p, k).dot(v.vec(p, k)));
      field->scalar(p, k) = res;
      max_res = std::max(max_res, res);
      sum += res;
      trace[k] += res;
      if (res > tol.critical) ++violated;
    }
  }
  trace /= paths;

  ConditionReport report;
  report.id = "critical_cone";
  report.max_residual = max_res;
  report.mean_residual = sum / (static_cast<double>(paths) * steps);
  report.violation_measure =
      static_cast<double>(violated) / (static_cast<double>(paths) * steps);
  report.step_trace = trace;
  report.residual_field = field;
  report.verdict =
      max_res <= tol.critical ? Verdict::Pass : Verdict::Violated;
  return report;
}

ConditionReport second_order_integral(const ProblemSpec& spec,
                                      const AdaptedField& xbar,
                                      const AdaptedField& ubar,
                                      const FirstAdjoint& adj,
                                      const SecondAdjoint& adj2,
                                      const AdaptedField& v,
                                      const AdaptedField& h,
                                      const NoiseEnsemble& noise,
                                      const ConditionTolerances& tol,
                                      const ParallelConfig& par) {
  spec.validate();
  const int paths = noise.paths();
  const int steps = noise.steps();
  const double dt = noise.dt();
  const auto& coeffs = *spec.coeffs;

  ConditionReport report;
  report.id = "second_order_integral";

  // Pre-checks: criticality of v and admissibility of (v, h), reported.
  const ConditionReport crit =
      critical_cone_residual(spec, xbar, ubar, adj, v, noise, tol);
  long h_bad = 0, cells = 0;
  for (int p = 0; p < paths; ++p) {
    for (int k = 0; k < steps; ++k) {
      ++cells;
      const Vector u = spec.control_set.project(ubar.vec(p, k));
      try {
        if (spec.control_set.second_adjacent_residual(u, v.vec(p, k),
                                                      h.vec(p, k), 1e-6) >
            1e-6)
          ++h_bad;
      } catch (const NotTangentError&) {
        ++h_bad;
      }
    }
  }
  if (h_bad > 0) {
    report.note = "second-order admissibility violated on " +
                  std::to_string(static_cast<double>(h_bad) / cells) +
                  " of cells";
  }

  const AdaptedField hu = hamiltonian_u_field(spec, xbar, ubar, adj, noise);
  const AdaptedField y1 =
      simulate_first_variation(spec, xbar, ubar, v, noise, par);
  const AdaptedField q2y = realize_q2_action(adj2, y1, false);
  const AdaptedField q2y_hat = realize_q2_action(adj2, y1, true);

  std::vector<double> per_path(paths, 0.0);
  Vector trace = Vector::Zero(steps);
  for (int p = 0; p < paths; ++p) {
    double acc = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double t = k * dt;
      const Vector x = xbar.vec(p, k);
      const Vector u = ubar.vec(p, k);
      const Vector vk = v.vec(p, k);
      const Vector hk = h.vec(p, k);
      const Vector p1 = adj.p1_post.vec(p, k);
      const Matrix q1 = adj.q1.at(p, k);
      const Matrix p2 = adj2.p2.at(p, k);
      const Vector y1k = y1.vec(p, k);

      const Matrix huu = coeffs.a_uu_p(t, x, u, p1) +
                         coeffs.b_uu_w(t, x, u, q1) - coeffs.f_uu(t, x, u);
      const Matrix s = s_operator(spec, t, x, u, p1, q1, p2);
      const Matrix buv = coeffs.b_u_apply(t, x, u, vk);

      double cell = 2.0 * hu.vec(p, k).dot(hk);
      cell += 2.0 * vk.dot(s * y1k);
      cell += vk.dot(huu * vk);
      cell += hs_inner(p2 * buv, buv);
      cell += hs_inner(buv, q2y_hat.at(p, k));
      cell += hs_inner(q2y.at(p, k), buv);

      acc += cell * dt;
      trace[k] += cell;
    }
    per_path[p] = acc;
  }
  trace /= paths;

  const auto stats = mean_stderr(per_path);
  report.value = stats.mean;
  report.std_error = stats.std_error;
  report.step_trace = trace;

  if (crit.max_residual > tol.critical) {
    report.verdict = Verdict::Inconclusive;
    report.note += report.note.empty() ? "" : "; ";
    report.note += "direction not critical (max |<H_u, v>| = " +
                   std::to_string(crit.max_residual) + ")";
    return report;
  }
  integral_verdict(report);
  return report;
}

}  // namespace socv
