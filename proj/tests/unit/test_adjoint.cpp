#include "socv/adjoint.hpp"

#include "helpers.hpp"
#include "socv/oracles/lq.hpp"

#include <doctest.h>

#include <cmath>

using namespace socv;
using namespace socv::testing;

namespace {

/// f_x = 1 (scalar), everything else flat: P1(t) = -(T - t).
class UnitGradientCost : public DriftFreeFamily {
 public:
  UnitGradientCost() : DriftFreeFamily(1, 1, 1) {}
  Vector f_x(double, const Vector&, const Vector&) const override {
    return Vector::Ones(1);
  }
};

/// Linear terminal cost g(x) = <c, x>: P1 = -c is a constant martingale.
class LinearTerminalCost : public DriftFreeFamily {
 public:
  LinearTerminalCost(Vector c, int m)
      : DriftFreeFamily(static_cast<int>(c.size()), m, 1), c_(std::move(c)) {}
  double g(const Vector& x) const override { return c_.dot(x); }
  Vector g_x(const Vector&) const override { return c_; }

 private:
  Vector c_;
};

LQParams additive_lq(int n, int m, int d) {
  LQParams p;
  p.B = Matrix::Identity(n, d);
  p.Sigma = Matrix::Zero(n, m);
  for (int i = 0; i < n && i < m; ++i) p.Sigma(i, i) = 0.3;
  p.M = Matrix::Identity(n, n);
  p.R = Matrix::Identity(d, d);
  p.G = 0.5 * Matrix::Identity(n, n);
  return p;
}

oracles::LQData to_lq_data(const LQParams& p, const Vector& eigenvalues) {
  oracles::LQData data;
  data.a_diag = eigenvalues;
  data.B = p.B;
  data.C = p.C;
  data.D = p.D;
  data.Sigma = p.Sigma;
  data.M = p.M;
  data.R = p.R;
  data.G = p.G;
  return data;
}

ControlLaw riccati_feedback(const oracles::RiccatiSolution& riccati,
                            double dt, int steps) {
  return FeedbackControl{[&riccati, dt, steps](double t, const Vector& x) {
    int k = static_cast<int>(std::lround(t / dt));
    k = std::min(std::max(k, 0), steps - 1);
    return Vector(-(riccati.gain[k] * x));
  }};
}

}  // namespace

TEST_CASE("first adjoint: constant martingale for linear terminal cost") {
  Vector c(2);
  c << 1.5, -0.5;
  auto spec = make_problem(std::make_shared<LinearTerminalCost>(c, 1),
                           Vector::Zero(2), Vector::Ones(2), 1.0,
                           ControlSet::whole_space(1));
  const NoiseEnsemble noise(4096, 32, 1, 1.0, 7);
  const auto sim = simulate_state(spec, zero_control(1, 32), noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);

  for (int p = 0; p < noise.paths(); p += 101) {
    for (int k = 0; k <= 32; ++k) {
      CHECK((adj.p1.vec(p, k) + c).norm() <= 1e-6);  // ridge-level drift
    }
  }
  // Q1 is pure regression noise around zero.
  CHECK(adj.q1.sup_sample_l2() <= 0.12 * c.norm());
}

TEST_CASE("first adjoint: deterministic running-cost integral") {
  auto spec = make_problem(std::make_shared<UnitGradientCost>(),
                           Vector::Zero(1), Vector::Ones(1), 1.0,
                           ControlSet::whole_space(1));
  const int steps = 16;
  const NoiseEnsemble noise(256, steps, 1, 1.0, 13);
  const auto sim = simulate_state(spec, zero_control(1, steps), noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
  const double dt = noise.dt();
  for (int p = 0; p < 256; p += 37) {
    for (int k = 0; k <= steps; ++k) {
      CHECK(adj.p1.vec(p, k)[0] ==
            doctest::Approx(-(1.0 - k * dt)).epsilon(1e-6));
    }
  }
}

TEST_CASE("terminal conditions hold samplewise without tolerance") {
  const int n = 2, m = 1, d = 1, steps = 12, paths = 64;
  LQParams params;
  params.B = Matrix::Identity(n, d).eval();
  params.C = {0.2 * Matrix::Identity(n, n)};
  params.D = {0.1 * Matrix::Identity(n, d).eval()};
  params.Sigma = Matrix::Zero(n, m);
  params.M = Matrix::Identity(n, n);
  params.R = Matrix::Identity(d, d);
  params.G = (Matrix(2, 2) << 0.8, 0.2, 0.2, 0.6).finished();
  auto spec = make_lq_problem(n, m, d, params, -Vector::Ones(n),
                              Vector::Ones(n), 1.0, ControlSet::whole_space(d));
  const NoiseEnsemble noise(paths, steps, m, 1.0, 111);
  const auto sim = simulate_state(
      spec, OpenLoopControl{Matrix::Constant(d, steps, 0.3)}, noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
  const auto adj2 =
      solve_second_adjoint(spec, sim.state, sim.control, adj, noise);
  for (int p = 0; p < paths; ++p) {
    const Vector gx = spec.coeffs->g_x(sim.state.vec(p, steps));
    CHECK((adj.p1.vec(p, steps) + gx).norm() == 0.0);
    const Matrix gxx = spec.coeffs->g_xx(sim.state.vec(p, steps));
    CHECK((adj2.p2.at(p, steps) + gxx).norm() == 0.0);
  }
}

TEST_CASE("first adjoint matches the analytic LQ oracle at the optimum") {
  const int n = 2, m = 2, d = 2, steps = 64, paths = 8192;
  const LQParams params = additive_lq(n, m, d);
  Vector lambda(2);
  lambda << -0.5, -1.0;
  Vector x0(2);
  x0 << 1.0, -0.5;
  auto spec =
      make_lq_problem(n, m, d, params, lambda, x0, 1.0, ControlSet::whole_space(d));
  const auto lq = to_lq_data(params, lambda);
  const auto riccati = oracles::riccati_solve(lq, steps, 1.0);
  const NoiseEnsemble noise(paths, steps, m, 1.0, 2024);
  const auto sim = simulate_state(
      spec, riccati_feedback(riccati, noise.dt(), steps), noise);

  const auto solver = solve_first_adjoint(spec, sim.state, sim.control, noise);
  const auto oracle = oracles::analytic_first_adjoint_lq(lq, riccati, sim.state);

  double sup_gap = 0.0;
  for (int k = 0; k <= steps; ++k) {
    double acc = 0.0;
    for (int p = 0; p < paths; ++p) {
      acc += (solver.p1.vec(p, k) - oracle.p1.vec(p, k)).squaredNorm();
    }
    sup_gap = std::max(sup_gap, std::sqrt(acc / paths));
  }
  // O(dt) scheme bias plus Monte Carlo noise.
  CHECK(sup_gap <= 0.05 + 3.0 / std::sqrt(static_cast<double>(paths)));
}

TEST_CASE("transposition identity: zero data gives zero residual") {
  Vector c(1);
  c << 0.0;
  auto spec = make_problem(std::make_shared<LinearTerminalCost>(c, 1),
                           Vector::Zero(1), Vector::Zero(1), 1.0,
                           ControlSet::whole_space(1));
  const NoiseEnsemble noise(128, 8, 1, 1.0, 3);
  const auto sim = simulate_state(spec, zero_control(1, 8), noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
  // g_x = 0 and f_x = 0 force P1 = Q1 = 0, so both sides vanish for any
  // random trial data.
  const auto check =
      check_transposition_identity(spec, sim.state, sim.control, adj, noise,
                                   8, 99);
  CHECK(check.max_residual <= 1e-12);
}

TEST_CASE("transposition identity: constant-coefficient analytic case") {
  Vector c(2);
  c << 1.0, 0.5;
  auto spec = make_problem(std::make_shared<LinearTerminalCost>(c, 2),
                           Vector::Zero(2), Vector::Ones(2), 1.0,
                           ControlSet::whole_space(1));
  const NoiseEnsemble noise(8192, 32, 2, 1.0, 17);
  const auto sim = simulate_state(spec, zero_control(1, 32), noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
  const auto check = check_transposition_identity(spec, sim.state, sim.control,
                                                  adj, noise, 16, 5);
  for (size_t i = 0; i < check.residuals.size(); ++i) {
    CHECK(check.residuals[i] <= 1e-6 + 5.0 * check.std_errors[i]);
  }
}

TEST_CASE("transposition identity on the LQ problem at desk scale") {
  const int n = 2, m = 2, d = 2, steps = 64, paths = 8192;
  const LQParams params = additive_lq(n, m, d);
  Vector lambda(2);
  lambda << -0.5, -1.0;
  auto spec = make_lq_problem(n, m, d, params, lambda, Vector::Ones(2), 1.0,
                              ControlSet::whole_space(d));
  const auto riccati =
      oracles::riccati_solve(to_lq_data(params, lambda), steps, 1.0);
  const NoiseEnsemble noise(paths, steps, m, 1.0, 4242);
  const auto sim = simulate_state(
      spec, riccati_feedback(riccati, noise.dt(), steps), noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
  const auto check = check_transposition_identity(spec, sim.state, sim.control,
                                                  adj, noise, 32, 11);
  CHECK(check.max_residual <= 5e-2);
}

TEST_CASE("duality pairing with the first variation") {
  const int n = 2, m = 2, d = 2, steps = 64, paths = 8192;
  const LQParams params = additive_lq(n, m, d);
  Vector lambda(2);
  lambda << -0.5, -1.0;
  auto spec = make_lq_problem(n, m, d, params, lambda, Vector::Ones(2), 1.0,
                              ControlSet::whole_space(d));
  const NoiseEnsemble noise(paths, steps, m, 1.0, 515);
  const auto sim = simulate_state(
      spec, OpenLoopControl{Matrix::Constant(d, steps, 0.2)}, noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);

  AdaptedField v = AdaptedField::control_field(paths, steps, d);
  for (int p = 0; p < paths; ++p)
    for (int k = 0; k < steps; ++k)
      v.vec(p, k) = Vector::Constant(d, std::sin(0.2 * k) + 0.3);
  const auto y1 =
      simulate_first_variation(spec, sim.state, sim.control, v, noise);

  // E<P1(T), y1(T)> vs E int <P1, a_u v> + <Q1, b_u v> + <f_x, y1> dt.
  const double dt = noise.dt();
  const auto& coeffs = *spec.coeffs;
  std::vector<double> lhs(paths), rhs(paths);
  for (int p = 0; p < paths; ++p) {
    lhs[p] = adj.p1.vec(p, steps).dot(y1.vec(p, steps));
    double acc = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double t = k * dt;
      const Vector x = sim.state.vec(p, k);
      const Vector u = sim.control.vec(p, k);
      const Vector av = coeffs.a_u(t, x, u) * v.vec(p, k);
      const Matrix bv = coeffs.b_u_apply(t, x, u, v.vec(p, k));
      acc += (adj.p1_post.vec(p, k).dot(av) +
              bv.cwiseProduct(adj.q1.at(p, k)).sum() +
              coeffs.f_x(t, x, u).dot(y1.vec(p, k))) *
             dt;
    }
    rhs[p] = acc;
  }
  double mean = 0.0;
  for (int p = 0; p < paths; ++p) mean += lhs[p] - rhs[p];
  mean /= paths;
  double var = 0.0;
  for (int p = 0; p < paths; ++p) {
    const double dd = lhs[p] - rhs[p] - mean;
    var += dd * dd;
  }
  var /= (paths - 1);
  const double stderr_combined = std::sqrt(var / paths);
  // 3 combined standard errors plus an O(dt) quadrature allowance.
  CHECK(std::abs(mean) <= 3.0 * stderr_combined + 0.5 * dt);
}

TEST_CASE("second adjoint: flat data stays exactly zero") {
  LQParams params = additive_lq(1, 1, 1);
  params.M = Matrix::Zero(1, 1);
  params.G = Matrix::Zero(1, 1);
  auto spec = make_lq_problem(1, 1, 1, params, -Vector::Ones(1),
                              Vector::Ones(1), 1.0, ControlSet::whole_space(1));
  const NoiseEnsemble noise(512, 16, 1, 1.0, 23);
  const auto sim = simulate_state(spec, zero_control(1, 16), noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
  const auto adj2 =
      solve_second_adjoint(spec, sim.state, sim.control, adj, noise);
  for (int p = 0; p < 512; p += 61) {
    for (int k = 0; k <= 16; ++k) {
      CHECK(adj2.p2.at(p, k).norm() == 0.0);
    }
    for (int k = 0; k < 16; ++k) {
      CHECK(adj2.q2.at(p, k).norm() == 0.0);
    }
  }
}

TEST_CASE("second adjoint solves the Lyapunov ODE in the deterministic case") {
  const int n = 2, m = 1, d = 1, steps = 256;
  LQParams params;
  params.B = Matrix::Identity(n, d).eval();
  params.Sigma = Matrix::Zero(n, m);
  params.Sigma(0, 0) = 0.4;
  params.Sigma(1, 0) = 0.2;
  params.M = Matrix::Identity(n, n);
  params.M(0, 1) = params.M(1, 0) = 0.3;
  params.R = Matrix::Identity(d, d);
  params.G = 0.7 * Matrix::Identity(n, n);
  Vector lambda(2);
  lambda << -0.4, -1.2;
  auto spec = make_lq_problem(n, m, d, params, lambda, Vector::Ones(2), 1.0,
                              ControlSet::whole_space(d));
  const NoiseEnsemble noise(256, steps, m, 1.0, 29);
  const auto sim = simulate_state(spec, zero_control(d, steps), noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
  const auto adj2 =
      solve_second_adjoint(spec, sim.state, sim.control, adj, noise);

  // Hxx = -M, a_x = 0, b_x = 0: -P2' = A'P2 + P2 A - M, P2(T) = -G.
  const auto oracle = oracles::second_adjoint_ode_oracle(
      lambda, Matrix::Zero(n, n), {}, -params.M, params.G, steps, 1.0);
  double worst = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const Matrix gap = adj2.p2.at(0, k) - oracle[k];
    worst = std::max(worst, gap.norm() / (1.0 + oracle[k].norm()));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("second adjoint matches the scalar multiplicative backward ODE") {
  const int n = 1, m = 1, d = 1, steps = 128;
  LQParams params;
  params.B = Matrix::Identity(1, 1);
  params.C = {0.5 * Matrix::Identity(1, 1)};
  params.D = {0.2 * Matrix::Identity(1, 1)};
  params.Sigma = Matrix::Zero(1, 1);
  params.M = Matrix::Identity(1, 1);
  params.R = Matrix::Identity(1, 1);
  params.G = 0.5 * Matrix::Identity(1, 1);
  auto spec = make_lq_problem(n, m, d, params, -Vector::Ones(1),
                              Vector::Ones(1), 1.0, ControlSet::whole_space(1));
  const NoiseEnsemble noise(2048, steps, m, 1.0, 31);
  const auto sim = simulate_state(
      spec, OpenLoopControl{Matrix::Constant(1, steps, 0.1)}, noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
  const auto adj2 =
      solve_second_adjoint(spec, sim.state, sim.control, adj, noise);

  const auto oracle = oracles::second_adjoint_ode_oracle(
      -Vector::Ones(1), Matrix::Zero(1, 1), {params.C[0]}, -params.M,
      params.G, steps, 1.0);
  double worst = 0.0;
  for (int k = 0; k <= steps; ++k) {
    worst = std::max(worst, std::abs(adj2.p2.at(0, k)(0, 0) - oracle[k](0, 0)) /
                                (1.0 + std::abs(oracle[k](0, 0))));
  }
  CHECK(worst <= 2e-3);
}

TEST_CASE("P2 stays symmetric along the backward sweep") {
  const int n = 2, m = 1, d = 1, steps = 32;
  LQParams params;
  params.B = Matrix::Identity(n, d).eval();
  params.C = {0.3 * Matrix::Identity(n, n)};
  params.D = {0.1 * Matrix::Identity(n, d).eval()};
  params.Sigma = Matrix::Zero(n, m);
  params.M = Matrix::Identity(n, n);
  params.M(0, 1) = params.M(1, 0) = 0.2;
  params.R = Matrix::Identity(d, d);
  params.G = Matrix::Identity(n, n);
  auto spec = make_lq_problem(n, m, d, params, -0.5 * Vector::Ones(n),
                              Vector::Ones(n), 1.0, ControlSet::whole_space(d));
  const NoiseEnsemble noise(1024, steps, m, 1.0, 37);
  const auto sim = simulate_state(
      spec, OpenLoopControl{Matrix::Constant(d, steps, 0.2)}, noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
  const auto adj2 =
      solve_second_adjoint(spec, sim.state, sim.control, adj, noise);
  for (int p = 0; p < 1024; p += 97) {
    for (int k = 0; k <= steps; ++k) {
      const Matrix p2 = adj2.p2.at(p, k);
      CHECK((p2 - p2.transpose()).norm() <= 1e-8 * (1.0 + p2.norm()));
    }
  }
}

TEST_CASE("realize_q2_action: trivial contractions") {
  SecondAdjoint adj2{AdaptedField::matrix_field(2, 5, 1, 1),
                     AdaptedField::matrix_field(2, 4, 1, 1),
                     {}};
  AdaptedField x1 = AdaptedField::state_field(2, 5, 1);

  // Q2 = 0 gives the zero field.
  for (int p = 0; p < 2; ++p)
    for (int k = 0; k < 5; ++k) x1.vec(p, k)[0] = 1.0 + k;
  auto zero_action = realize_q2_action(adj2, x1);
  CHECK(zero_action.sup_sample_l2() == 0.0);

  // Constant scalar contraction q * w.
  const double q = 2.5, w = -1.25;
  for (int p = 0; p < 2; ++p) {
    for (int k = 0; k < 4; ++k) adj2.q2.at(p, k)(0, 0) = q;
    for (int k = 0; k < 5; ++k) x1.vec(p, k)[0] = w;
  }
  auto action = realize_q2_action(adj2, x1);
  for (int p = 0; p < 2; ++p) {
    for (int k = 0; k < 4; ++k) {
      CHECK(action.at(p, k)(0, 0) == doctest::Approx(q * w).epsilon(1e-15));
    }
  }
  // x1 = 0 gives the zero field.
  x1.set_zero();
  auto null_action = realize_q2_action(adj2, x1, true);
  CHECK(null_action.sup_sample_l2() == 0.0);
}

TEST_CASE("relaxed transposition: flat second-order data zeroes both sides") {
  LQParams params = additive_lq(1, 1, 1);
  params.M = Matrix::Zero(1, 1);
  params.G = Matrix::Zero(1, 1);
  auto spec = make_lq_problem(1, 1, 1, params, -Vector::Ones(1),
                              Vector::Ones(1), 1.0, ControlSet::whole_space(1));
  const NoiseEnsemble noise(256, 8, 1, 1.0, 41);
  const auto sim = simulate_state(spec, zero_control(1, 8), noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
  const auto adj2 =
      solve_second_adjoint(spec, sim.state, sim.control, adj, noise);
  const auto check = check_relaxed_transposition_identity(
      spec, sim.state, sim.control, adj, adj2, noise, 8, 3);
  CHECK(check.max_residual <= 1e-12);
}

TEST_CASE("relaxed transposition identity on a multiplicative LQ problem") {
  const int n = 2, m = 1, d = 1, steps = 64, paths = 8192;
  LQParams params;
  params.B = Matrix::Identity(n, d).eval();
  params.C = {0.3 * Matrix::Identity(n, n)};
  params.D = {0.2 * Matrix::Identity(n, d).eval()};
  params.Sigma = Matrix::Zero(n, m);
  params.M = Matrix::Identity(n, n);
  params.R = Matrix::Identity(d, d);
  params.G = 0.5 * Matrix::Identity(n, n);
  Vector lambda(2);
  lambda << -0.5, -1.0;
  auto spec = make_lq_problem(n, m, d, params, lambda, Vector::Ones(n), 1.0,
                              ControlSet::whole_space(d));
  const NoiseEnsemble noise(paths, steps, m, 1.0, 4711);
  const auto sim = simulate_state(
      spec, OpenLoopControl{Matrix::Constant(d, steps, 0.1)}, noise);
  const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
  const auto adj2 =
      solve_second_adjoint(spec, sim.state, sim.control, adj, noise);
  const auto check = check_relaxed_transposition_identity(
      spec, sim.state, sim.control, adj, adj2, noise, 16, 13);
  CHECK(check.max_residual <= 5e-2);
}

TEST_CASE("Q2 reduction: symmetric blocks collapse the paired terms") {
  // With x1 = y1 and symmetric Q2_j, <b_u v, Qhat2 y1> + <Q2 y1, b_u v>
  // equals 2 sum_j <Q2_j y1, (b_u v)_j>.
  const int n = 2, m = 2;
  SecondAdjoint adj2{AdaptedField::matrix_field(1, 3, n, n),
                     AdaptedField::matrix_field(1, 2, n, n * m),
                     {}};
  AdaptedField y1 = AdaptedField::state_field(1, 3, n);
  Matrix q0(n, n), q1(n, n);
  q0 << 1.0, 0.5, 0.5, -2.0;
  q1 << 0.3, -0.1, -0.1, 0.8;
  for (int k = 0; k < 2; ++k) {
    adj2.q2.at(0, k).block(0, 0, n, n) = q0;
    adj2.q2.at(0, k).block(0, n, n, n) = q1;
  }
  y1.vec(0, 0) << 1.0, -1.0;
  y1.vec(0, 1) << 0.4, 2.0;

  Matrix buv(n, m);
  buv << 0.7, -0.2, 1.1, 0.9;

  const auto q2y = realize_q2_action(adj2, y1, false);
  const auto q2y_hat = realize_q2_action(adj2, y1, true);
  for (int k = 0; k < 2; ++k) {
    const double paired = buv.cwiseProduct(q2y_hat.at(0, k)).sum() +
                          q2y.at(0, k).cwiseProduct(buv).sum();
    const double collapsed = 2.0 * ((q0 * y1.vec(0, k)).dot(buv.col(0)) +
                                    (q1 * y1.vec(0, k)).dot(buv.col(1)));
    CHECK(paired == doctest::Approx(collapsed).epsilon(1e-12));
  }
}
