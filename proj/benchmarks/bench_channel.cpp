#include <benchmark/benchmark.h>

#include "csda/channel.hpp"

namespace {

void BM_RngU64(benchmark::State& state) {
  csda::RngStream rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.next_u64());
  }
}
BENCHMARK(BM_RngU64);

void BM_SampleRician(benchmark::State& state) {
  csda::RngStream rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(csda::sample_rician(5.0, rng).power());
  }
}
BENCHMARK(BM_SampleRician);

void BM_SimulateWindow(benchmark::State& state) {
  const csda::ScenarioConfig cfg = csda::scenario_preset("gateway");
  const csda::PhaseAngle psi(240);
  const std::size_t length = static_cast<std::size_t>(state.range(0));
  const bool interfered = state.range(1) != 0;
  std::optional<csda::InterferenceSpec> spec;
  if (interfered) {
    spec = csda::InterferenceSpec{csda::InterferenceModel::kModel2, -110.0, 0.5};
  }
  std::uint64_t stream = 0;
  for (auto _ : state) {
    csda::RngStream rng(7, stream++);
    benchmark::DoNotOptimize(
        csda::simulate_window(cfg, psi, spec, length, rng));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(length));
}
BENCHMARK(BM_SimulateWindow)->Args({1000, 0})->Args({1000, 1});

}  // namespace

BENCHMARK_MAIN();
