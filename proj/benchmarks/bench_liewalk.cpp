#include <benchmark/benchmark.h>

#include "liewalk/spectra.hpp"
#include "liewalk/synthesis.hpp"

namespace {

using namespace liewalk;

void BM_HaarSUd(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(haar_sud(d, rng));
}
BENCHMARK(BM_HaarSUd)->Arg(4)->Arg(16)->Arg(64);

void BM_ChainStep(benchmark::State& state) {
  WalkConfig cfg;
  cfg.d = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  ChainState s = initial_state(cfg.d);
  for (auto _ : state) {
    advance(s, sample_step(cfg, rng), cfg.repair_interval);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_ChainStep)->Arg(6)->Arg(32);

void BM_MixingTime(benchmark::State& state) {
  WalkConfig cfg;
  cfg.d = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(mixing_time(cfg, 0.1, 2000, 100000, rng));
  }
}
BENCHMARK(BM_MixingTime)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Degree2Exact(benchmark::State& state) {
  WalkConfig cfg;
  cfg.d = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(degree2_transfer(cfg));
}
BENCHMARK(BM_Degree2Exact)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

const GeneratorRegistry& atoms() {
  static const GeneratorRegistry reg = GeneratorRegistry::build(2, LocalMeasure::two_axis(0.5));
  return reg;
}

void BM_SolovayKitaevD2(benchmark::State& state) {
  const NetApproximator net(atoms());
  SkOptions o;
  o.c_sk = 5.0;
  Rng rng(4);
  const auto depth = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sk_refine(haar_su2(rng), net, depth, o));
}
BENCHMARK(BM_SolovayKitaevD2)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_CompileD3(benchmark::State& state) {
  static const GeneratorRegistry reg = GeneratorRegistry::build(3, LocalMeasure::haar());
  Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(compile(haar_sud(3, rng), reg, 1e-3));
}
BENCHMARK(BM_CompileD3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
