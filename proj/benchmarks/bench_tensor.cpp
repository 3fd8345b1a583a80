#include <benchmark/benchmark.h>

#include "obflow/props.hpp"
#include "obflow/tensor.hpp"

using namespace obflow;

static void BM_SpectralDecompose2(benchmark::State& state) {
  std::uint64_t seed = 1;
  const SymMat m = random_symmetric(2, seed);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(m));
}
BENCHMARK(BM_SpectralDecompose2);

static void BM_SpectralDecompose3(benchmark::State& state) {
  std::uint64_t seed = 1;
  const SymMat m = random_symmetric(3, seed);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(m));
}
BENCHMARK(BM_SpectralDecompose3);

static void BM_BetaMatrix(benchmark::State& state) {
  std::uint64_t seed = 1;
  const SymMat m = random_symmetric(2, seed);
  const StressCalculus calc = StressCalculus::regularized(RegParams{0.1, 10.0});
  for (auto _ : state) benchmark::DoNotOptimize(calc.beta(m));
}
BENCHMARK(BM_BetaMatrix);

static void BM_EntropyTrace(benchmark::State& state) {
  std::uint64_t seed = 1;
  const SymMat m = random_symmetric(2, seed);
  const RegParams reg{0.1, {}};
  for (auto _ : state) benchmark::DoNotOptimize(entropy_trace(m, reg));
}
BENCHMARK(BM_EntropyTrace);
