#include <benchmark/benchmark.h>

#include <numeric>

#include "bench_support.hpp"
#include "nids/forest.hpp"

namespace {

void BM_BestSplit(benchmark::State& state) {
  const auto p = bench::make_problem(static_cast<std::size_t>(state.range(0)), 16);
  std::vector<std::size_t> rows(p.x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const std::vector<std::size_t> features{0, 3, 7, 11};
  for (auto _ : state) benchmark::DoNotOptimize(nids::best_split(p.x, p.y, rows, features));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BestSplit)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 17);

void BM_FitTree(benchmark::State& state) {
  const auto p = bench::make_problem(static_cast<std::size_t>(state.range(0)), 40);
  nids::ForestConfig cfg;
  const auto weights = nids::bootstrap_counts(p.x.rows(), 7);
  for (auto _ : state) benchmark::DoNotOptimize(nids::fit_tree(p.x, p.y, cfg, 7, weights));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitTree)->Arg(1 << 12)->Arg(1 << 15)->Unit(benchmark::kMillisecond);

void BM_PredictForest(benchmark::State& state) {
  const auto p = bench::make_problem(1 << 14, 20);
  nids::ForestConfig cfg;
  cfg.n_trees = 20;
  const auto model = nids::fit_forest(p.x, p.y, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(nids::predict_proba_forest(model, p.x));
  state.SetItemsProcessed(state.iterations() * p.x.rows());
}
BENCHMARK(BM_PredictForest)->Unit(benchmark::kMillisecond);

}  // namespace
