#include "socv/adjoint.hpp"

#include "socv/oracles/lq.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace socv;

void BM_FirstAdjointSweep(benchmark::State& state) {
  const int paths = static_cast<int>(state.range(0));
  const int n = 4, m = 2, d = 2, steps = 64;
  LQParams params;
  params.B = Matrix::Identity(n, d);
  params.Sigma = 0.3 * Matrix::Identity(n, m);
  params.M = Matrix::Identity(n, n);
  params.R = Matrix::Identity(d, d);
  params.G = 0.5 * Matrix::Identity(n, n);
  ProblemSpec spec{TruncatedSpace(-Vector::Ones(n)),
                   m,
                   d,
                   std::make_shared<LQCoefficients>(n, m, d, params),
                   ControlSet::whole_space(d),
                   1.0,
                   Vector::Ones(n)};
  const NoiseEnsemble noise(paths, steps, m, 1.0, 42);
  const auto sim =
      simulate_state(spec, OpenLoopControl{Matrix::Zero(d, steps)}, noise);
  for (auto _ : state) {
    const auto adj = solve_first_adjoint(spec, sim.state, sim.control, noise);
    benchmark::DoNotOptimize(adj.p1.scalar(0, 0));
  }
  state.SetItemsProcessed(state.iterations() * paths * steps);
}
BENCHMARK(BM_FirstAdjointSweep)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_RiccatiSolve(benchmark::State& state) {
  oracles::LQData lq;
  lq.a_diag = -Vector::Ones(4);
  lq.B = Matrix::Identity(4, 2);
  lq.Sigma = 0.3 * Matrix::Identity(4, 2);
  lq.M = Matrix::Identity(4, 4);
  lq.R = Matrix::Identity(2, 2);
  lq.G = 0.5 * Matrix::Identity(4, 4);
  for (auto _ : state) {
    const auto sol = oracles::riccati_solve(lq, 64, 1.0);
    benchmark::DoNotOptimize(sol.value.front()(0, 0));
  }
}
BENCHMARK(BM_RiccatiSolve)->Unit(benchmark::kMillisecond);

}  // namespace
