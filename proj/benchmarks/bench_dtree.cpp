#include <benchmark/benchmark.h>

#include "csda/dtree.hpp"
#include "csda/rng.hpp"

namespace {

csda::WindowMatrix synthetic_matrix(std::size_t rows, std::size_t cols) {
  csda::WindowMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.values.resize(rows * cols);
  m.labels.resize(rows);
  m.window_ids.resize(rows);
  csda::RngStream rng(11, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const int label = static_cast<int>(r % 2);
    m.labels[r] = label;
    for (std::size_t c = 0; c < cols; ++c) {
      double v = rng.uniform() * 4.0 - 2.0;
      // Interfered rows carry occasional deep dips, like gated samples.
      if (label == 1 && rng.bernoulli(0.5)) v -= 3.0 + rng.uniform() * 25.0;
      m.values[r * cols + c] = v;
    }
  }
  return m;
}

void BM_DtreeFit(benchmark::State& state) {
  const auto m = synthetic_matrix(static_cast<std::size_t>(state.range(0)),
                                  static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(csda::DecisionTree::fit(m));
  }
}
BENCHMARK(BM_DtreeFit)
    ->Args({200, 100})
    ->Args({1000, 1000})
    ->Unit(benchmark::kMillisecond);

void BM_DtreePredict(benchmark::State& state) {
  const auto m = synthetic_matrix(2000, 1000);
  const csda::DecisionTree tree = csda::DecisionTree::fit(m);
  std::size_t r = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree.predict(m.row(r)));
    r = (r + 1) % m.rows;
  }
}
BENCHMARK(BM_DtreePredict);

}  // namespace
