#include <benchmark/benchmark.h>

#include "obflow/lambda.hpp"
#include "obflow/props.hpp"
#include "obflow/scenarios.hpp"
#include "obflow/scheme_dg0.hpp"
#include "obflow/scheme_fem1.hpp"

using namespace obflow;

namespace {
const FluidParams kDg0{1.0, 1.0, 0.5, 0.0};
const FluidParams kFem1{1.0, 1.0, 0.5, 0.01};
}  // namespace

static void BM_Dg0Residual(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SimplicialMesh mesh = build_structured_mesh(n, n);
  const Dg0Scheme scheme(mesh, SpaceTag::VEL_P2, kDg0, RegParams{0.1, {}});
  Scenario sc;
  sc.kind = Scenario::Kind::RandomSpd;
  const DiscreteStateDG0 s = make_initial_dg0(scheme, sc, Rect{});
  PressureField p{SpaceTag::PRES_P0, std::vector<double>(mesh.num_elements(), 0.0)};
  const LoadVector f(scheme.velocity_space().ndof(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(scheme.residual(s, s, p, f, 0.1));
  state.SetComplexityN(mesh.num_elements());
}
BENCHMARK(BM_Dg0Residual)->Arg(8)->Arg(16)->Arg(32)->Complexity();

static void BM_Fem1Residual(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SimplicialMesh mesh = build_structured_mesh(n, n);
  const Fem1Scheme scheme(mesh, SpaceTag::VEL_P2, kFem1, RegParams{0.1, {}});
  Scenario sc;
  sc.kind = Scenario::Kind::RandomSpd;
  const DiscreteStateFEM1 s = make_initial_fem1(scheme, sc, Rect{}, 0.1);
  PressureField p{SpaceTag::PRES_P1, std::vector<double>(mesh.num_vertices(), 0.0)};
  const LoadVector f(scheme.velocity_space().ndof(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(scheme.residual(s, s, p, f, 0.1));
  state.SetComplexityN(mesh.num_elements());
}
BENCHMARK(BM_Fem1Residual)->Arg(8)->Arg(16)->Arg(32)->Complexity();

static void BM_LambdaTensor(benchmark::State& state) {
  const SimplicialMesh mesh = build_structured_mesh(8, 8);
  std::uint64_t seed = 3;
  StressFieldP1 sig;
  sig.value.reserve(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v)
    sig.value.push_back(random_spd(2, seed, 0.1, 4.0));
  const StressCalculus calc = StressCalculus::regularized(RegParams{0.1, {}});
  for (auto _ : state)
    for (int k = 0; k < mesh.num_elements(); ++k)
      benchmark::DoNotOptimize(lambda_tensor(mesh, k, sig, calc));
}
BENCHMARK(BM_LambdaTensor);
