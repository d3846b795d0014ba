#include "socv/forward.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace socv;

ProblemSpec lq_problem(int n, int m, int d) {
  LQParams params;
  params.B = Matrix::Identity(n, d);
  params.Sigma = 0.3 * Matrix::Identity(n, m);
  params.M = Matrix::Identity(n, n);
  params.R = Matrix::Identity(d, d);
  params.G = 0.5 * Matrix::Identity(n, n);
  return ProblemSpec{TruncatedSpace(-Vector::Ones(n)),
                     m,
                     d,
                     std::make_shared<LQCoefficients>(n, m, d, params),
                     ControlSet::whole_space(d),
                     1.0,
                     Vector::Ones(n)};
}

void BM_SimulateState(benchmark::State& state) {
  const int paths = static_cast<int>(state.range(0));
  const auto spec = lq_problem(4, 2, 2);
  const NoiseEnsemble noise(paths, 64, 2, 1.0, 42);
  const ControlLaw law = OpenLoopControl{Matrix::Zero(2, 64)};
  for (auto _ : state) {
    const auto sim = simulate_state(spec, law, noise);
    benchmark::DoNotOptimize(sim.state.scalar(0, 0));
  }
  state.SetItemsProcessed(state.iterations() * paths * 64);
}
BENCHMARK(BM_SimulateState)->Arg(1024)->Arg(4096);

void BM_FirstVariation(benchmark::State& state) {
  const int paths = 1024;
  const auto spec = lq_problem(4, 2, 2);
  const NoiseEnsemble noise(paths, 64, 2, 1.0, 42);
  const auto sim = simulate_state(spec, OpenLoopControl{Matrix::Zero(2, 64)},
                                  noise);
  AdaptedField v = AdaptedField::control_field(paths, 64, 2);
  for (int p = 0; p < paths; ++p)
    for (int k = 0; k < 64; ++k) v.vec(p, k) = Vector::Ones(2);
  for (auto _ : state) {
    const auto y1 =
        simulate_first_variation(spec, sim.state, sim.control, v, noise);
    benchmark::DoNotOptimize(y1.scalar(0, 0));
  }
  state.SetItemsProcessed(state.iterations() * paths * 64);
}
BENCHMARK(BM_FirstVariation);

}  // namespace
