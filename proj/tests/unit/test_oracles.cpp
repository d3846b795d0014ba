#include "socv/oracles/cone_oracle.hpp"
#include "socv/oracles/finite_diff.hpp"
#include "socv/oracles/lq.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace socv;
using namespace socv::testing;

namespace {

oracles::LQData scalar_lq(double a, double b, double m, double r, double g,
                          double sigma) {
  oracles::LQData lq;
  lq.a_diag = Vector::Constant(1, a);
  lq.B = Matrix::Constant(1, 1, b);
  lq.Sigma = Matrix::Constant(1, 1, sigma);
  lq.M = Matrix::Constant(1, 1, m);
  lq.R = Matrix::Constant(1, 1, r);
  lq.G = Matrix::Constant(1, 1, g);
  return lq;
}

}  // namespace

TEST_CASE("riccati: zero cost data gives zero value and gains") {
  auto lq = scalar_lq(-1.0, 1.0, 0.0, 1.0, 0.0, 0.5);
  const auto sol = oracles::riccati_solve(lq, 32, 1.0);
  for (const auto& p : sol.value) CHECK(p.norm() == 0.0);
  for (const auto& k : sol.gain) CHECK(k.norm() == 0.0);
}

TEST_CASE("riccati: scalar benchmark P(0) = tanh(1)") {
  // A = 0, B = M = R = 1, G = 0, T = 1: -P' = 1 - P^2, P(1) = 0, so
  // P(t) = tanh(1 - t).
  auto lq = scalar_lq(0.0, 1.0, 1.0, 1.0, 0.0, 0.0);
  const auto sol = oracles::riccati_solve(lq, 512, 1.0, 8);  // fine grid 4096
  CHECK(std::abs(sol.value.front()(0, 0) - 0.761594155955765) <= 1e-6);
  // Interior sample against the closed form.
  CHECK(std::abs(sol.value[256](0, 0) - std::tanh(0.5)) <= 1e-6);
}

TEST_CASE("riccati: explicit zero C and D matches the empty-default path") {
  auto lq = scalar_lq(-0.7, 1.0, 1.0, 1.0, 0.5, 0.3);
  auto lq_zero = lq;
  lq_zero.C = {Matrix::Zero(1, 1)};
  lq_zero.D = {Matrix::Zero(1, 1)};
  const auto a = oracles::riccati_solve(lq, 64, 1.0);
  const auto b = oracles::riccati_solve(lq_zero, 64, 1.0);
  for (size_t k = 0; k < a.value.size(); ++k) {
    CHECK(std::abs(a.value[k](0, 0) - b.value[k](0, 0)) <= 1e-10);
    CHECK(std::abs(a.gain[k](0, 0) - b.gain[k](0, 0)) <= 1e-10);
  }
}

TEST_CASE("riccati: value stays positive semidefinite on random data") {
  std::mt19937 gen(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3, m = 2, d = 2;
    oracles::LQData lq;
    lq.a_diag = -Vector::Ones(n) * (1.0 + trial * 0.3);
    Matrix bb(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) bb(i, j) = normal(gen);
    lq.B = bb;
    lq.Sigma = Matrix::Zero(n, m);
    Matrix mh(n, n);
    for (int i = 0; i < n * n; ++i) mh(i / n, i % n) = normal(gen);
    lq.M = mh * mh.transpose();
    lq.R = Matrix::Identity(d, d);
    Matrix gh(n, n);
    for (int i = 0; i < n * n; ++i) gh(i / n, i % n) = 0.4 * normal(gen);
    lq.G = gh * gh.transpose();
    for (int j = 0; j < m; ++j) {
      lq.C.push_back(0.2 * Matrix::Identity(n, n));
      lq.D.push_back(0.1 * bb);
    }
    const auto sol = oracles::riccati_solve(lq, 32, 1.0);
    for (const auto& p : sol.value) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
    }
  }
}

TEST_CASE("riccati value function predicts the simulated optimal cost") {
  const int n = 2, m = 2, d = 2, steps = 64, paths = 8192;
  LQParams params;
  params.B = Matrix::Identity(n, d).eval();
  params.Sigma = 0.3 * Matrix::Identity(n, m).eval();
  params.M = Matrix::Identity(n, n);
  params.R = Matrix::Identity(d, d);
  params.G = 0.5 * Matrix::Identity(n, n);
  Vector lambda(2);
  lambda << -0.5, -1.0;
  Vector x0(2);
  x0 << 1.0, -0.4;
  auto spec = make_lq_problem(n, m, d, params, lambda, x0, 1.0,
                              ControlSet::whole_space(d));

  oracles::LQData lq;
  lq.a_diag = lambda;
  lq.B = params.B;
  lq.Sigma = params.Sigma;
  lq.M = params.M;
  lq.R = params.R;
  lq.G = params.G;
  const auto sol = oracles::riccati_solve(lq, steps, 1.0);

  const NoiseEnsemble noise(paths, steps, m, 1.0, 313);
  const double dt = noise.dt();
  const ControlLaw law = FeedbackControl{[&sol, dt, steps](double t,
                                                           const Vector& x) {
    int k = static_cast<int>(std::lround(t / dt));
    k = std::min(std::max(k, 0), steps - 1);
    return Vector(-(sol.gain[k] * x));
  }};
  const auto cost = evaluate_cost(spec, law, noise);
  const double predicted = oracles::lq_value(lq, sol, 0, x0);
  // O(dt) weak bias of the scheme plus Monte Carlo noise.
  CHECK(std::abs(cost.value - predicted) <=
        3.0 * cost.std_error + 3.0 * dt * std::abs(predicted));
}

TEST_CASE("analytic first adjoint: trivial cases") {
  auto lq = scalar_lq(-1.0, 1.0, 0.0, 1.0, 0.0, 0.4);
  const auto sol = oracles::riccati_solve(lq, 8, 1.0);
  AdaptedField xbar = AdaptedField::state_field(2, 9, 1);
  for (int k = 0; k <= 8; ++k) xbar.vec(0, k)[0] = 1.0 + k;  // path 1 stays 0
  const auto adj = oracles::analytic_first_adjoint_lq(lq, sol, xbar);
  // M = G = 0 forces P = 0, so P1 = 0 everywhere.
  CHECK(adj.p1.sup_sample_l2() == 0.0);

  auto lq2 = scalar_lq(-1.0, 1.0, 1.0, 1.0, 0.5, 0.4);
  const auto sol2 = oracles::riccati_solve(lq2, 8, 1.0);
  const auto adj2 = oracles::analytic_first_adjoint_lq(lq2, sol2, xbar);
  for (int k = 0; k <= 8; ++k) {
    CHECK(adj2.p1.vec(1, k)[0] == 0.0);  // zero path keeps P1 = 0
    CHECK(adj2.p1.vec(0, k)[0] ==
          doctest::Approx(-(sol2.value[k](0, 0) * (1.0 + k))).epsilon(1e-12));
  }
}

TEST_CASE("finite differences: zero directions give zero quotients") {
  LQParams params;
  params.B = Matrix::Identity(1, 1);
  params.Sigma = 0.3 * Matrix::Identity(1, 1);
  params.M = Matrix::Identity(1, 1);
  params.R = Matrix::Identity(1, 1);
  params.G = Matrix::Identity(1, 1);
  auto spec = make_lq_problem(1, 1, 1, params, -Vector::Ones(1),
                              Vector::Ones(1), 1.0, ControlSet::whole_space(1));
  const NoiseEnsemble noise(64, 8, 1, 1.0, 17);
  const auto sim = simulate_state(spec, zero_control(1, 8), noise);
  AdaptedField v = AdaptedField::control_field(64, 8, 1);
  AdaptedField h = v;
  const auto fd = oracles::finite_diff_expansion(spec, sim, v, h, 0.1, noise);
  CHECK(fd.q1 == 0.0);
  CHECK(fd.q2 == 0.0);
}

TEST_CASE("finite differences: second quotient is eps-free for LQ costs") {
  LQParams params;
  params.B = Matrix::Identity(1, 1);
  params.Sigma = 0.3 * Matrix::Identity(1, 1);
  params.M = Matrix::Identity(1, 1);
  params.R = Matrix::Identity(1, 1);
  params.G = Matrix::Identity(1, 1);
  auto spec = make_lq_problem(1, 1, 1, params, -Vector::Ones(1),
                              Vector::Ones(1), 1.0, ControlSet::whole_space(1));
  const NoiseEnsemble noise(256, 16, 1, 1.0, 19);
  const auto sim = simulate_state(spec, zero_control(1, 16), noise);
  AdaptedField v = AdaptedField::control_field(256, 16, 1);
  for (int p = 0; p < 256; ++p)
    for (int k = 0; k < 16; ++k) v.vec(p, k)[0] = 1.0;
  AdaptedField h = v;
  h.set_zero();
  // With h = 0, J(eps) is an exact quadratic in eps on common noise.
  const auto fd1 = oracles::finite_diff_expansion(spec, sim, v, h, 0.2, noise);
  const auto fd2 = oracles::finite_diff_expansion(spec, sim, v, h, 0.05, noise);
  CHECK(fd1.q2 == doctest::Approx(fd2.q2).epsilon(1e-8));

  const double d2q = oracles::second_difference_quotient(spec, sim, v, 0.1,
                                                         noise);
  CHECK(2.0 * fd1.q2 == doctest::Approx(d2q).epsilon(1e-7));
}

TEST_CASE("brute-force cone tables: trivial rows") {
  const ControlSet box =
      ControlSet::box(Vector::Zero(2), Vector::Ones(2));
  const auto ladder = default_eps_ladder();

  Vector interior(2), v(2), h(2);
  interior << 0.5, 0.5;
  v << 1.0, -1.0;
  h << 0.2, 0.2;
  const auto table = oracles::brute_force_cone(box, interior, v, h, ladder);
  for (double d : table.first) CHECK(d == 0.0);
  for (double d : table.second) CHECK(d == 0.0);

  Vector edge(2), out(2);
  edge << 0.0, 0.5;
  out << -1.0, 0.0;
  const auto table2 = oracles::brute_force_cone(box, edge, out, h, ladder);
  for (double d : table2.first) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(box.adjacent_cone_residual(edge, out) ==
        doctest::Approx(oracles::extrapolate_limit(table2.eps, table2.first))
            .epsilon(1e-10));
}

TEST_CASE("brute-force cone oracle agrees with analytic residuals") {
  std::mt19937 gen(23);
  std::normal_distribution<double> normal;
  const auto ladder = default_eps_ladder();

  // Polytope family, random cases.
  Matrix a(4, 2);
  a << 1, 0, 0, 1, -1, 0, 0, -1;
  Vector b = Vector::Ones(4);
  const ControlSet poly = ControlSet::polytope(a, b);
  for (int trial = 0; trial < 20; ++trial) {
    Vector raw(2), v(2);
    raw << 2.0 * normal(gen), 2.0 * normal(gen);
    v << normal(gen), normal(gen);
    const Vector u = poly.project(raw);
    const double analytic = poly.adjacent_cone_residual(u, v);
    const auto table =
        oracles::brute_force_cone(poly, u, v, Vector::Zero(2), ladder);
    const double limit = oracles::extrapolate_limit(table.eps, table.first);
    CHECK(std::abs(analytic - limit) <= 1e-4);
  }

  // Dense-sampling cross-check of the exact ball projection.
  const ControlSet ball = ControlSet::ball(Vector::Zero(2), 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vector p(2);
    p << 2.0 * normal(gen), 2.0 * normal(gen);
    const double exact = ball.distance(p);
    const double sampled = oracles::sampled_distance(ball, p, 600);
    CHECK(std::abs(exact - sampled) <= 5e-3);
  }
}
