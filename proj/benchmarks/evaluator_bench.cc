#include <benchmark/benchmark.h>

#include <vector>

#include "rulekg/evaluator.h"
#include "synthetic.h"

namespace rulekg {
namespace {

void BM_RankTail(benchmark::State& state) {
  const int n = static_cast<int>(state.range(1));
  const KnowledgeGraph g = bench::InverseGraph(n, 8, 4 * n);
  const ModelParams p = InitParams(g, 50, static_cast<ModelKind>(state.range(0)), 1);
  Ranker ranker(p, Norm::kL1, &g);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ranker.Rank(g.triples()[i++ % g.size()], Side::kTail));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_RankTail)->ArgsProduct({{0, 1, 2}, {1000, 40000}});

void BM_RankAll(benchmark::State& state) {
  const KnowledgeGraph g = bench::InverseGraph(10000, 8, 40000);
  const ModelParams p = InitParams(g, 50, ModelKind::kTransE, 1);
  const std::vector<Triple> test(g.triples().begin(), g.triples().begin() + 500);
  for (auto _ : state) benchmark::DoNotOptimize(RankAll(p, test, g, Norm::kL1));
}
BENCHMARK(BM_RankAll)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace rulekg
