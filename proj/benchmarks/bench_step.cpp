#include <benchmark/benchmark.h>

#include "obflow/scenarios.hpp"
#include "obflow/stepper.hpp"

using namespace obflow;

static void BM_Dg0Step(benchmark::State& state) {
  const SimplicialMesh mesh = build_structured_mesh(8, 8);
  const Dg0Scheme scheme(mesh, SpaceTag::VEL_P2, FluidParams{1.0, 1.0, 0.5, 0.0},
                         RegParams{0.1, {}});
  Scenario sc;
  sc.kind = Scenario::Kind::RandomSpd;
  const DiscreteStateDG0 init = make_initial_dg0(scheme, sc, Rect{});
  PressureField p{SpaceTag::PRES_P0, std::vector<double>(mesh.num_elements(), 0.0)};
  const LoadVector f(scheme.velocity_space().ndof(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(scheme.step(init, p, f, 0.1, SolverOpts{}));
}
BENCHMARK(BM_Dg0Step)->Unit(benchmark::kMillisecond);

static void BM_Fem1Step(benchmark::State& state) {
  const SimplicialMesh mesh = build_structured_mesh(8, 8);
  const Fem1Scheme scheme(mesh, SpaceTag::VEL_P2, FluidParams{1.0, 1.0, 0.5, 0.01},
                          RegParams{0.1, {}});
  Scenario sc;
  sc.kind = Scenario::Kind::RandomSpd;
  const DiscreteStateFEM1 init = make_initial_fem1(scheme, sc, Rect{}, 0.1);
  PressureField p{SpaceTag::PRES_P1, std::vector<double>(mesh.num_vertices(), 0.0)};
  const LoadVector f(scheme.velocity_space().ndof(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(scheme.step(init, p, f, 0.1, SolverOpts{}));
}
BENCHMARK(BM_Fem1Step)->Unit(benchmark::kMillisecond);
