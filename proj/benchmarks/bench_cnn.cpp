#include <benchmark/benchmark.h>

#include <vector>

#include "csda/cnn.hpp"

namespace {

struct BatchFixture {
  csda::CnnConfig config;
  csda::ParamSet params;
  std::vector<double> values;
  std::vector<int> labels;
  std::size_t rows;

  BatchFixture(std::size_t length, std::size_t rows_in)
      : config{length, 64, 5, 128, 2}, params(), rows(rows_in) {
    csda::RngStream rng(3, 0);
    params = csda::init_params(config, rng);
    values.resize(rows * length);
    labels.resize(rows);
    for (auto& v : values) v = rng.uniform() * 2.0 - 1.0;
    for (std::size_t r = 0; r < rows; ++r) {
      labels[r] = static_cast<int>(rng.next_u64() % 2);
    }
  }
};

void BM_Conv1dForward(benchmark::State& state) {
  csda::RngStream rng(5, 0);
  std::vector<double> input(1000);
  for (auto& v : input) v = rng.uniform();
  std::vector<double> kernels(64 * 5), biases(64);
  for (auto& v : kernels) v = rng.uniform() - 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        csda::conv1d_forward(input, kernels, biases, 64, 5));
  }
}
BENCHMARK(BM_Conv1dForward);

void BM_BackwardBatch(benchmark::State& state) {
  const BatchFixture fx(static_cast<std::size_t>(state.range(0)), 32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        csda::backward(fx.params, fx.values, fx.labels, fx.rows));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 32);
}
BENCHMARK(BM_BackwardBatch)->Arg(256)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_AdamStep(benchmark::State& state) {
  const BatchFixture fx(1000, 1);
  csda::ParamSet params = fx.params;
  csda::ParamSet grads = csda::ParamSet::zeros(fx.config);
  for (std::size_t i = 0; i < grads.data.size(); ++i) {
    grads.data[i] = static_cast<double>(i % 13) * 1e-4;
  }
  csda::AdamState adam = csda::AdamState::for_params(params);
  for (auto _ : state) {
    csda::adam_step(params, grads, adam, 1e-3);
    benchmark::DoNotOptimize(params.data.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(params.size()));
}
BENCHMARK(BM_AdamStep)->Unit(benchmark::kMillisecond);

}  // namespace
