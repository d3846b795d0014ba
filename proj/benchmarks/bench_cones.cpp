#include "socv/cones.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using socv::ControlSet;
using socv::Matrix;
using socv::Vector;

void BM_BoxNormalConeResidual(benchmark::State& state) {
  const ControlSet box = ControlSet::box(-Vector::Ones(4), Vector::Ones(4));
  std::mt19937 gen(1);
  std::normal_distribution<double> normal;
  Vector u(4), xi(4);
  for (int i = 0; i < 4; ++i) u[i] = 0.5 * normal(gen);
  u = box.project(u);
  for (auto _ : state) {
    for (int i = 0; i < 4; ++i) xi[i] = normal(gen);
    benchmark::DoNotOptimize(box.normal_cone_residual(u, xi));
  }
}
BENCHMARK(BM_BoxNormalConeResidual);

void BM_PolytopeProject(benchmark::State& state) {
  Matrix a(6, 3);
  a << 1, 0, 0, 0, 1, 0, 0, 0, 1, -1, 0, 0, 0, -1, 0, 0, 0, -1;
  const socv::Vector b = Vector::Ones(6);
  std::mt19937 gen(2);
  std::normal_distribution<double> normal;
  Vector u(3);
  for (auto _ : state) {
    for (int i = 0; i < 3; ++i) u[i] = 2.0 * normal(gen);
    benchmark::DoNotOptimize(socv::project_polyhedron(a, b, u));
  }
}
BENCHMARK(BM_PolytopeProject);

}  // namespace
