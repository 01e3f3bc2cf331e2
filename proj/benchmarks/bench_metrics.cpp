#include <benchmark/benchmark.h>

#include "nids/metrics.hpp"
#include "nids/random.hpp"

namespace {

void BM_Roc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  nids::SplitMix64 rng(3);
  std::vector<std::uint8_t> y(n);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<std::uint8_t>(rng.below(2));
    s[i] = rng.uniform();
  }
  const nids::LabelVector labels(y);
  for (auto _ : state) benchmark::DoNotOptimize(nids::roc(labels, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Roc)->Arg(1 << 10)->Arg(1 << 16)->Arg(1 << 20);

void BM_Pearson(benchmark::State& state) {
  const auto cols = static_cast<std::size_t>(state.range(0));
  nids::SplitMix64 rng(4);
  nids::FeatureMatrix m(20000, std::vector<std::string>(cols, "c"));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(nids::pearson(m));
}
BENCHMARK(BM_Pearson)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
