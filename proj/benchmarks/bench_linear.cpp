#include <benchmark/benchmark.h>

#include "bench_support.hpp"
#include "nids/linear.hpp"

namespace {

void BM_ObjectiveGradient(benchmark::State& state) {
  const auto p = bench::make_problem(static_cast<std::size_t>(state.range(0)), 64);
  const nids::LogisticObjective obj(p.x, p.y, nids::Penalty::L2, 1e-4, 1);
  std::vector<double> params(p.x.cols() + 1, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(obj.gradient(params));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ObjectiveGradient)->Arg(1 << 12)->Arg(1 << 16);

void BM_FitLogistic(benchmark::State& state) {
  const auto p = bench::make_problem(1 << 14, 32);
  nids::LogisticConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(nids::fit_logistic(p.x, p.y, cfg));
}
BENCHMARK(BM_FitLogistic)->Unit(benchmark::kMillisecond);

}  // namespace
