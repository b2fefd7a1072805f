#include <benchmark/benchmark.h>

#include <string>

#include "mcfuse/evaluate.hpp"
#include "mcfuse/lexical/paths.hpp"
#include "mcfuse/merge.hpp"
#include "mcfuse/optimize.hpp"
#include "mcfuse/random.hpp"
#include "mcfuse/simulate.hpp"

namespace {

using namespace mcfuse;

SyntheticDataset dataset(std::size_t modules, std::size_t m) {
  GenerativeSpec spec;
  spec.k = 4;
  spec.m = m;
  for (std::size_t i = 0; i < modules; ++i) spec.module_accuracies.push_back(0.4 + 0.1 * static_cast<double>(i % 5));
  return gen_calibrated_independent(spec);
}

void BM_MergeAll(benchmark::State& state, Rule rule) {
  const auto ds = training_view(rule, dataset(static_cast<std::size_t>(state.range(0)), 1000).forecasts, 1e-5);
  const WeightVector w(rule, ds.module_ids(), std::vector<double>(ds.modules(), 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(merge_all(ds, w));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK_CAPTURE(BM_MergeAll, mixture, Rule::mixture)->Arg(4)->Arg(16);
BENCHMARK_CAPTURE(BM_MergeAll, logarithmic, Rule::logarithmic)->Arg(4)->Arg(16);
BENCHMARK_CAPTURE(BM_MergeAll, product, Rule::product)->Arg(4)->Arg(16);

void BM_LogLikelihood(benchmark::State& state) {
  const auto ds = dataset(static_cast<std::size_t>(state.range(0)), 1000);
  const WeightVector w(Rule::product, ds.forecasts.module_ids(), std::vector<double>(ds.forecasts.modules(), 0.7));
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(w, ds.forecasts, ds.answers));
}
BENCHMARK(BM_LogLikelihood)->Arg(4)->Arg(16);

void BM_Optimize(benchmark::State& state) {
  const auto ds = dataset(4, 1000);
  OptimizerParams params;
  params.restarts = 2;
  for (auto _ : state) benchmark::DoNotOptimize(optimize(Rule::product, ds.forecasts, ds.answers, params));
}
BENCHMARK(BM_Optimize)->Unit(benchmark::kMillisecond);

void BM_ClopperPearson(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(clopper_pearson(n * 3 / 4, n));
}
BENCHMARK(BM_ClopperPearson)->Arg(80)->Arg(10000);

void BM_BfsPaths(benchmark::State& state) {
  const auto nodes = static_cast<std::size_t>(state.range(0));
  lexical::ThesaurusGraph graph;
  Rng rng(5);
  for (std::size_t e = 0; e < 4 * nodes; ++e) {
    const auto a = uniform_index(rng, nodes), b = uniform_index(rng, nodes);
    if (a != b) {
      graph.add_edge("w" + std::to_string(a), lexical::kLinkKinds[e % lexical::kLinkKinds.size()],
                     "w" + std::to_string(b));
    }
  }
  std::size_t q = 0;
  for (auto _ : state) {
    const auto x = "w" + std::to_string(q % nodes), y = "w" + std::to_string((q * 7 + 3) % nodes);
    benchmark::DoNotOptimize(lexical::bfs_paths(graph, x, y));
    ++q;
  }
}
BENCHMARK(BM_BfsPaths)->Arg(100)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
