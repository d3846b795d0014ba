// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion runs at its stated size and tolerance.

#include "socv/conditions.hpp"
#include "socv/oracles/cone_oracle.hpp"
#include "socv/oracles/finite_diff.hpp"
#include "socv/oracles/lq.hpp"
#include "socv/scenario.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace socv;

namespace {

#ifndef SOCV_TEST_DATA_DIR
#define SOCV_TEST_DATA_DIR "tests/data"
#endif

int g_failures = 0;

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

void report(const char* id, bool pass, const std::string& details) {
  std::printf("%-4s %s  %s\n", id, pass ? "PASS" : "FAIL", details.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ControlLaw riccati_feedback(const oracles::RiccatiSolution& riccati, double dt,
                            int steps) {
  return FeedbackControl{[&riccati, dt, steps](double t, const Vector& x) {
    int k = static_cast<int>(std::lround(t / dt));
    k = std::min(std::max(k, 0), steps - 1);
    return Vector(-(riccati.gain[k] * x));
  }};
}

AdaptedField unit_direction_field(const NoiseEnsemble& noise, int d,
                                  uint64_t seed, int index) {
  AdaptedField v = AdaptedField::control_field(noise.paths(), noise.steps(), d);
  double norm_sq = 0.0;
  for (int k = 0; k < noise.steps(); ++k) {
    Vector col(d);
    for (int i = 0; i < d; ++i)
      col[i] = counter_gaussian(seed, 0x41630000 + index, k, i);
    norm_sq += col.squaredNorm();
    for (int p = 0; p < noise.paths(); ++p) v.vec(p, k) = col;
  }
  const double scale = 1.0 / std::sqrt(norm_sq * noise.dt());
  for (int p = 0; p < noise.paths(); ++p)
    for (int k = 0; k < noise.steps(); ++k) v.vec(p, k) *= scale;
  return v;
}

const std::string kDataDir = SOCV_TEST_DATA_DIR;

/// The AC1 problem (additive-noise LQ regulator), loaded from the same
/// scenario file the CLI run uses.
struct Ac1Problem {
  ScenarioConfig cfg;
  ProblemSpec spec;
  oracles::LQData lq;
  oracles::RiccatiSolution riccati;

  explicit Ac1Problem(int steps = 64)
      : cfg(load_scenario(kDataDir + "/ac1.cfg")),
        spec((cfg.steps = steps, cfg.build_problem())),
        lq(cfg.build_lq_data()),
        riccati(oracles::riccati_solve(lq, steps, cfg.horizon)) {}
};

// --------------------------------------------------------------------------
// AC1: first- and pointwise conditions hold at a certified optimum
// --------------------------------------------------------------------------

void ac1() {
  try {
    Ac1Problem prob;
    const int steps = 64, paths = 8192;
    const NoiseEnsemble noise(paths, steps, prob.cfg.m, 1.0, prob.cfg.seed);
    const auto sim = simulate_state(
        prob.spec, riccati_feedback(prob.riccati, noise.dt(), steps), noise);
    const auto adj =
        solve_first_adjoint(prob.spec, sim.state, sim.control, noise);

    bool pass = true;
    std::string details;
    double worst_ratio = 0.0;
    for (int i = 0; i < 5; ++i) {
      const AdaptedField v = unit_direction_field(noise, prob.cfg.d, 2024, i);
      const auto rep = first_order_integral(prob.spec, sim.state, sim.control,
                                            adj, v, noise);
      const double ratio = std::abs(rep.value) / (3.0 * rep.std_error);
      worst_ratio = std::max(worst_ratio, ratio);
      if (std::abs(rep.value) > 3.0 * rep.std_error) pass = false;
    }
    details += fmt("integral worst |value|/3se=%.2f", worst_ratio);

    const auto pw =
        first_order_pointwise(prob.spec, sim.state, sim.control, adj, noise);
    details += fmt("; pointwise measure=%.4f", pw.violation_measure);
    if (pw.violation_measure > 0.05) pass = false;

    const auto mp =
        maximum_principle_gap(prob.spec, sim.state, sim.control, adj, noise);
    details += fmt("; max gap=%.4g", mp.max_residual);
    if (mp.max_residual > 5e-2) pass = false;

    // The scenario runner must agree end to end: exit status 0.
    ScenarioConfig cfg = load_scenario(kDataDir + "/ac1.cfg");
    cfg.out_dir = "acceptance_out/ac1";
    const auto run = run_scenario(cfg);
    details += fmt("; scenario exit=%d", run.exit_status);
    if (run.exit_status != 0) pass = false;

    report("AC1", pass, details);
  } catch (const std::exception& e) {
    report("AC1", false, e.what());
  }
}

// --------------------------------------------------------------------------
// AC2: violation detection at a shifted control
// --------------------------------------------------------------------------

void ac2() {
  try {
    ScenarioConfig cfg = load_scenario(kDataDir + "/ac2.cfg");
    cfg.out_dir = "acceptance_out/ac2";
    const auto run = run_scenario(cfg);
    bool pass = run.exit_status == 2;
    double value = 0.0, se = 0.0;
    for (const auto& rep : run.reports) {
      if (rep.id == "first_order_integral") {
        value = rep.value;
        se = rep.std_error;
        if (rep.verdict != Verdict::Violated) pass = false;
      }
    }
    report("AC2", pass,
           fmt("value=%.4g vs 3se=%.4g; exit=%d", value, 3.0 * se,
               run.exit_status));
  } catch (const std::exception& e) {
    report("AC2", false, e.what());
  }
}

// --------------------------------------------------------------------------
// AC3: transposition identity, with Monte Carlo convergence in P
// --------------------------------------------------------------------------

void ac3() {
  try {
    Ac1Problem prob;
    const int steps = 64;
    auto run_at = [&](int paths) {
      const NoiseEnsemble noise(paths, steps, prob.cfg.m, 1.0, prob.cfg.seed);
      const auto sim = simulate_state(
          prob.spec, riccati_feedback(prob.riccati, noise.dt(), steps), noise);
      const auto adj =
          solve_first_adjoint(prob.spec, sim.state, sim.control, noise);
      return check_transposition_identity(prob.spec, sim.state, sim.control,
                                          adj, noise, 32, 777);
    };
    const auto base = run_at(8192);
    const auto fine = run_at(4 * 8192);
    const double ratio = fine.max_residual / base.max_residual;
    const bool pass = base.max_residual <= 5e-2 && ratio <= 0.6;
    report("AC3", pass,
           fmt("max residual=%.4g (P=8192), %.4g (P=32768), ratio=%.2f",
               base.max_residual, fine.max_residual, ratio));
  } catch (const std::exception& e) {
    report("AC3", false, e.what());
  }
}

// --------------------------------------------------------------------------
// AC4: relaxed transposition identity with multiplicative noise
// --------------------------------------------------------------------------

void ac4() {
  try {
    const int n = 2, m = 1, d = 1, steps = 64, paths = 8192;
    LQParams params;
    params.B = Matrix::Identity(n, d).eval();
    params.C = {(Matrix(2, 2) << 0.3, 0.0, 0.05, 0.25).finished()};
    params.D = {(Matrix(2, 1) << 0.2, 0.1).finished()};
    params.Sigma = Matrix::Zero(n, m);
    params.M = Matrix::Identity(n, n);
    params.R = Matrix::Identity(d, d);
    params.G = 0.5 * Matrix::Identity(n, n);
    Vector lambda(2);
    lambda << -0.5, -1.0;
    Vector x0(2);
    x0 << 1.0, 0.8;
    ProblemSpec spec{TruncatedSpace(lambda),
                     m,
                     d,
                     std::make_shared<LQCoefficients>(n, m, d, params),
                     ControlSet::whole_space(d),
                     1.0,
                     x0};

    oracles::LQData lq;
    lq.a_diag = lambda;
    lq.B = params.B;
    lq.C = params.C;
    lq.D = params.D;
    lq.Sigma = params.Sigma;
    lq.M = params.M;
    lq.R = params.R;
    lq.G = params.G;
    const auto riccati = oracles::riccati_solve(lq, steps, 1.0);

    const NoiseEnsemble noise(paths, steps, m, 1.0, 99);
    const auto sim = simulate_state(
        spec, riccati_feedback(riccati, noise.dt(), steps), noise);
    const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
    const auto adj2 =
        solve_second_adjoint(spec, sim.state, sim.control, adj, noise);
    const auto check = check_relaxed_transposition_identity(
        spec, sim.state, sim.control, adj, adj2, noise, 32, 888);
    report("AC4", check.max_residual <= 5e-2,
           fmt("max residual=%.4g over 32 trials (P=8192, N=64)",
               check.max_residual));
  } catch (const std::exception& e) {
    report("AC4", false, e.what());
  }
}

// --------------------------------------------------------------------------
// AC5: expansion residuals shrink along the eps ladder
// --------------------------------------------------------------------------

void ac5() {
  try {
    const int n = 2, m = 2, steps = 64, paths = 4096;
    BilinearParams params;
    params.A0 = Matrix::Zero(n, n);
    params.B = Matrix::Identity(n, m).eval();
    params.kappa = 0.5;
    params.Gamma = {(Matrix(2, 2) << 0.4, 0.1, 0.0, 0.3).finished(),
                    (Matrix(2, 2) << 0.2, 0.0, 0.1, 0.25).finished()};
    params.gamma = {0.15 * Vector::Ones(n), 0.1 * Vector::Ones(n)};
    params.M = Matrix::Identity(n, n);
    params.R = Matrix::Identity(m, m);
    params.G = Matrix::Identity(n, n);
    Vector lambda(2);
    lambda << -0.5, -1.0;
    ProblemSpec spec{TruncatedSpace(lambda),
                     m,
                     m,
                     std::make_shared<BilinearCoefficients>(n, m, params),
                     ControlSet::whole_space(m),
                     1.0,
                     Vector::Ones(n)};

    const NoiseEnsemble noise(paths, steps, m, 1.0, 31415);
    const auto sim = simulate_state(
        spec, OpenLoopControl{Matrix::Constant(m, steps, 0.3)}, noise);

    AdaptedField v = AdaptedField::control_field(paths, steps, m);
    AdaptedField h = AdaptedField::control_field(paths, steps, m);
    for (int p = 0; p < paths; ++p) {
      for (int k = 0; k < steps; ++k) {
        v.vec(p, k) << std::cos(0.3 * k), std::sin(0.2 * k) + 0.4;
        h.vec(p, k) << 0.25, -0.2;
      }
    }
    std::vector<double> ladder;
    for (int r = 3; r <= 8; ++r) ladder.push_back(std::ldexp(1.0, -r));
    const auto rows = expansion_residuals(spec, sim, v, h, ladder, noise);

    bool pass = true;
    for (size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].r1_norm > 3.0 * rows[i].r1_floor &&
          rows[i].r1_norm > 0.7 * rows[i - 1].r1_norm) {
        pass = false;
      }
      if (rows[i].r2_norm > 3.0 * rows[i].r2_floor &&
          rows[i].r2_norm > 0.7 * rows[i - 1].r2_norm) {
        pass = false;
      }
    }
    report("AC5", pass,
           fmt("r1: %.3g -> %.3g, r2: %.3g -> %.3g over eps 2^-3..2^-8",
               rows.front().r1_norm, rows.back().r1_norm, rows.front().r2_norm,
               rows.back().r2_norm));
  } catch (const std::exception& e) {
    report("AC5", false, e.what());
  }
}

// --------------------------------------------------------------------------
// AC6: second-order integral condition at the optimum vs the
//      common-noise second-difference oracle
// --------------------------------------------------------------------------

void ac6() {
  try {
    Ac1Problem prob;  // M, R positive definite, unconstrained
    const int steps = 64, paths = 8192;
    const NoiseEnsemble noise(paths, steps, prob.cfg.m, 1.0, prob.cfg.seed);
    const auto sim = simulate_state(
        prob.spec, riccati_feedback(prob.riccati, noise.dt(), steps), noise);
    const auto adj =
        solve_first_adjoint(prob.spec, sim.state, sim.control, noise);
    const auto adj2 =
        solve_second_adjoint(prob.spec, sim.state, sim.control, adj, noise);

    bool pass = true;
    double worst_value = -1e300, worst_gap = 0.0;
    for (int i = 0; i < 5; ++i) {
      const AdaptedField v = unit_direction_field(noise, prob.cfg.d, 60660, i);
      AdaptedField h = v;
      h.set_zero();
      const auto crit = critical_cone_residual(prob.spec, sim.state,
                                               sim.control, adj, v, noise);
      if (crit.verdict != Verdict::Pass) pass = false;
      const auto rep = second_order_integral(prob.spec, sim.state, sim.control,
                                             adj, adj2, v, h, noise);
      worst_value = std::max(worst_value, rep.value - 3.0 * rep.std_error);
      if (rep.value > 3.0 * rep.std_error) pass = false;
      if (rep.verdict != Verdict::Pass) pass = false;

      const double d2j = oracles::second_difference_quotient(prob.spec, sim, v,
                                                             0.1, noise);
      const double target = -d2j;
      const double gap = std::abs(rep.value - target);
      const double allowed =
          std::max(0.05 * std::abs(target), 3.0 * rep.std_error);
      worst_gap = std::max(worst_gap, gap / allowed);
      if (gap > allowed) pass = false;
    }
    report("AC6", pass,
           fmt("worst (value-3se)=%.4g; worst |value+d2J|/allowed=%.2f",
               worst_value, worst_gap));
  } catch (const std::exception& e) {
    report("AC6", false, e.what());
  }
}

// --------------------------------------------------------------------------
// AC7: cone toolkit against the brute-force oracle
// --------------------------------------------------------------------------

void ac7() {
  try {
    std::mt19937 gen(4242);
    std::normal_distribution<double> normal;
    const auto ladder = default_eps_ladder();
    bool pass = true;
    double worst = 0.0;
    std::string failure;

    auto rand_vec = [&](int d, double scale = 1.0) {
      Vector v(d);
      for (int i = 0; i < d; ++i) v[i] = scale * normal(gen);
      return v;
    };
    // Snap near-zero components so the fixed ladder sees the limiting
    // behavior of tangent directions instead of sub-resolution transients.
    auto snap = [](Vector v) {
      for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) < 1e-3) v[i] = 0.0;
      }
      return v;
    };

    auto check_case = [&](const ControlSet& set, const Vector& u,
                          const Vector& v, const Vector& h,
                          const char* family) {
      const auto table = oracles::brute_force_cone(set, u, v, h, ladder);
      const double first_limit =
          oracles::extrapolate_limit(table.eps, table.first);
      const double analytic_first = set.adjacent_cone_residual(u, v);
      double gap = std::abs(analytic_first - first_limit);
      if (gap > 1e-4) {
        pass = false;
        failure = fmt("%s first-order gap %.3g", family, gap);
      }
      worst = std::max(worst, gap);
      if (analytic_first <= 1e-9) {  // tangent v: compare second order too
        const double second_limit =
            oracles::extrapolate_limit(table.eps, table.second);
        const double analytic_second = set.second_adjacent_residual(u, v, h);
        gap = std::abs(analytic_second - second_limit);
        if (gap > 1e-4) {
          pass = false;
          failure = fmt("%s second-order gap %.3g", family, gap);
        }
        worst = std::max(worst, gap);
      }
    };

    for (int trial = 0; trial < 20; ++trial) {
      {  // box
        const ControlSet set =
            ControlSet::box(-Vector::Ones(3), Vector::Ones(3));
        const Vector u = set.project(rand_vec(3, 1.2));
        const Vector v = snap(set.project_tangent(u, rand_vec(3)));
        check_case(set, u, v, snap(rand_vec(3)), "box");
      }
      {  // ball
        const ControlSet set = ControlSet::ball(rand_vec(2, 0.3), 1.0);
        const Vector u = set.project(set.center() + 2.0 * rand_vec(2));
        const Vector v = set.project_tangent(u, rand_vec(2));
        check_case(set, u, v, rand_vec(2), "ball");
      }
      {  // halfspace
        const ControlSet set =
            ControlSet::halfspace(rand_vec(2).normalized(), 0.2);
        const Vector u = set.project(rand_vec(2, 2.0));
        const Vector v = set.project_tangent(u, rand_vec(2));
        check_case(set, u, v, rand_vec(2), "halfspace");
      }
      {  // polytope: bounded intersection around an interior point
        Matrix a(4, 2);
        Vector b(4);
        const Vector center = rand_vec(2, 0.2);
        for (int i = 0; i < 4; ++i) {
          const double angle = 0.5 * M_PI * i + 0.3 * normal(gen);
          a.row(i) << std::cos(angle), std::sin(angle);
          b[i] = a.row(i).dot(center) + 0.5 + 0.5 * std::abs(normal(gen));
        }
        const ControlSet set = ControlSet::polytope(a, b);
        const Vector u = set.project(center + rand_vec(2, 2.0));
        const Vector v = snap(set.project_tangent(u, rand_vec(2)));
        check_case(set, u, v, snap(rand_vec(2)), "polytope");
      }
      {  // finite
        std::vector<Vector> pts;
        for (int i = 0; i < 5; ++i) pts.push_back(rand_vec(2, 2.0));
        const ControlSet set = ControlSet::finite(pts);
        const Vector u = set.project(rand_vec(2, 2.0));
        check_case(set, u, Vector::Zero(2), rand_vec(2), "finite");
        const Vector v = rand_vec(2);
        const auto table =
            oracles::brute_force_cone(set, u, v, Vector::Zero(2), ladder);
        const double limit =
            oracles::extrapolate_limit(table.eps, table.first);
        const double gap = std::abs(set.adjacent_cone_residual(u, v) - limit);
        worst = std::max(worst, gap);
        if (gap > 1e-4) {
          pass = false;
          failure = fmt("finite gap %.3g", gap);
        }
      }
    }

    // Trivial cone examples hold exactly.
    const ControlSet box2 = ControlSet::box(Vector::Zero(2), Vector::Ones(2));
    const ControlSet box1 = ControlSet::box(Vector::Zero(1), Vector::Ones(1));
    Vector u05(2), vneg(2);
    u05 << 0.0, 0.5;
    vneg << -1.0, 0.0;
    bool trivia = true;
    trivia &= box2.adjacent_cone_residual(
                  (Vector(2) << 0.5, 0.5).finished(),
                  (Vector(2) << 9e5, -7e5).finished()) == 0.0;
    trivia &= std::abs(box2.adjacent_cone_residual(u05, vneg) - 1.0) < 1e-14;
    trivia &= box1.normal_cone_residual(Vector::Zero(1), -Vector::Ones(1)) ==
              0.0;
    trivia &= std::abs(box1.normal_cone_residual(Vector::Zero(1),
                                                 Vector::Ones(1)) -
                       1.0) < 1e-14;
    trivia &= box1.second_adjacent_residual(Vector::Zero(1), Vector::Ones(1),
                                            -7.0 * Vector::Ones(1)) == 0.0;
    trivia &= std::abs(box1.second_adjacent_residual(Vector::Zero(1),
                                                     Vector::Zero(1),
                                                     -Vector::Ones(1)) -
                       1.0) < 1e-14;
    trivia &= (box2.project((Vector(2) << 2.0, -1.0).finished()) -
               (Vector(2) << 1.0, 0.0).finished())
                  .norm() == 0.0;
    trivia &= (ControlSet::ball(Vector::Zero(2), 1.0)
                   .project((Vector(2) << 3.0, 0.0).finished()) -
               (Vector(2) << 1.0, 0.0).finished())
                  .norm() == 0.0;
    if (!trivia) {
      pass = false;
      failure = "trivial examples";
    }
    report("AC7", pass,
           pass ? fmt("20 cases/family, worst oracle gap=%.3g", worst)
                : failure);
  } catch (const std::exception& e) {
    report("AC7", false, e.what());
  }
}

// --------------------------------------------------------------------------
// AC8: adjoint solvers against the analytic oracles
// --------------------------------------------------------------------------

void ac8() {
  try {
    // First adjoint vs the closed-form LQ oracle, at N and 2N.
    auto discrepancy = [&](int steps, double& std_error) {
      Ac1Problem prob(steps);
      const int paths = 8192;
      const NoiseEnsemble noise(paths, steps, prob.cfg.m, 1.0, prob.cfg.seed);
      const auto sim = simulate_state(
          prob.spec, riccati_feedback(prob.riccati, noise.dt(), steps), noise);
      const auto solver =
          solve_first_adjoint(prob.spec, sim.state, sim.control, noise);
      const auto oracle =
          oracles::analytic_first_adjoint_lq(prob.lq, prob.riccati, sim.state);
      double sup = 0.0;
      int argmax = 0;
      for (int k = 0; k <= steps; ++k) {
        double acc = 0.0;
        for (int p = 0; p < paths; ++p) {
          acc += (solver.p1.vec(p, k) - oracle.p1.vec(p, k)).squaredNorm();
        }
        const double norm = std::sqrt(acc / paths);
        if (norm > sup) {
          sup = norm;
          argmax = k;
        }
      }
      // Delta-method stderr of the sup-step norm estimate.
      double mean_sq = 0.0;
      for (int p = 0; p < paths; ++p) {
        mean_sq += (solver.p1.vec(p, argmax) - oracle.p1.vec(p, argmax))
                       .squaredNorm();
      }
      mean_sq /= paths;
      double var = 0.0;
      for (int p = 0; p < paths; ++p) {
        const double s = (solver.p1.vec(p, argmax) - oracle.p1.vec(p, argmax))
                             .squaredNorm() -
                         mean_sq;
        var += s * s;
      }
      var /= (paths - 1);
      std_error = sup > 0 ? std::sqrt(var / paths) / (2.0 * sup) : 0.0;
      return sup;
    };

    double se64 = 0.0, se128 = 0.0;
    const double disc64 = discrepancy(64, se64);
    const double disc128 = discrepancy(128, se128);
    const double c64 = std::max(0.0, disc64 - 3.0 * se64) * 64.0;
    const double c128 = std::max(0.0, disc128 - 3.0 * se128) * 128.0;
    // disc <= 3 se + C dt holds by the definition of the fitted C; the
    // criterion is that C stays stable when the mesh is refined.
    bool pass = c128 <= std::max(2.0 * c64, c64 + 1.0);

    // Second adjoint vs the Lyapunov ODE oracle (deterministic case).
    const int n = 2, m = 1, d = 1, steps2 = 256;
    LQParams params;
    params.B = Matrix::Identity(n, d).eval();
    params.Sigma = (Matrix(2, 1) << 0.4, 0.2).finished();
    params.M = (Matrix(2, 2) << 1.0, 0.3, 0.3, 1.0).finished();
    params.R = Matrix::Identity(d, d);
    params.G = 0.7 * Matrix::Identity(n, n);
    Vector lambda(2);
    lambda << -0.4, -1.2;
    ProblemSpec spec{TruncatedSpace(lambda),
                     m,
                     d,
                     std::make_shared<LQCoefficients>(n, m, d, params),
                     ControlSet::whole_space(d),
                     1.0,
                     Vector::Ones(n)};
    const NoiseEnsemble noise(256, steps2, m, 1.0, 616);
    const auto sim =
        simulate_state(spec, OpenLoopControl{Matrix::Zero(d, steps2)}, noise);
    const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
    const auto adj2 =
        solve_second_adjoint(spec, sim.state, sim.control, adj, noise);
    const auto oracle = oracles::second_adjoint_ode_oracle(
        lambda, Matrix::Zero(n, n), {}, -params.M, params.G, steps2, 1.0);
    double lyap_worst = 0.0;
    for (int k = 0; k <= steps2; ++k) {
      for (int p = 0; p < 256; p += 85) {
        const double rel = (adj2.p2.at(p, k) - oracle[k]).norm() /
                           (1.0 + oracle[k].norm());
        lyap_worst = std::max(lyap_worst, rel);
      }
    }
    if (lyap_worst > 1e-3) pass = false;

    report("AC8", pass,
           fmt("P1 disc %.4g (N=64, C=%.2f) vs %.4g (N=128, C=%.2f); "
               "Lyapunov rel err=%.2g",
               disc64, c64, disc128, c128, lyap_worst));
  } catch (const std::exception& e) {
    report("AC8", false, e.what());
  }
}

// --------------------------------------------------------------------------
// AC9: bitwise determinism across runs and parallelism levels
// --------------------------------------------------------------------------

void ac9() {
  try {
    ScenarioConfig cfg = load_scenario(kDataDir + "/ac1.cfg");

    cfg.out_dir = "acceptance_out/ac9_run1";
    const auto run1 = run_scenario(cfg);
    cfg.out_dir = "acceptance_out/ac9_run2";
    const auto run2 = run_scenario(cfg);

    ScenarioOverrides threaded;
    threaded.threads = 4;
    threaded.out_dir = "acceptance_out/ac9_run3";
    const auto run3 = run_scenario(cfg, threaded);

    const bool pass = run1.exit_status == 0 &&
                      slurp(run1.report_path) == slurp(run2.report_path) &&
                      slurp(run1.csv_path) == slurp(run2.csv_path) &&
                      slurp(run1.report_path) == slurp(run3.report_path) &&
                      slurp(run1.csv_path) == slurp(run3.csv_path);
    report("AC9", pass,
           fmt("summary %zu bytes, csv %zu bytes; reruns and threads=4 agree",
               slurp(run1.report_path).size(), slurp(run1.csv_path).size()));
  } catch (const std::exception& e) {
    report("AC9", false, e.what());
  }
}

}  // namespace

int main() {
  ac1();
  ac2();
  ac3();
  ac4();
  ac5();
  ac6();
  ac7();
  ac8();
  ac9();
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  }
  return g_failures;
}
