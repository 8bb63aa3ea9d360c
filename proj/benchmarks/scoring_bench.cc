#include <benchmark/benchmark.h>

#include "rulekg/model.h"
#include "rulekg/scoring.h"
#include "rulekg/trainer.h"
#include "rulekg/miner.h"
#include "synthetic.h"

namespace rulekg {
namespace {

ModelKind KindArg(const benchmark::State& state) { return static_cast<ModelKind>(state.range(0)); }

void BM_ScoreTriple(benchmark::State& state) {
  const int d = static_cast<int>(state.range(1));
  const ModelParams p = InitParams(1000, 10, d, KindArg(state), 1);
  Rng rng(2);
  std::vector<Triple> triples;
  for (int i = 0; i < 1024; ++i) {
    triples.push_back({static_cast<EntityId>(UniformIndex(rng, 1000)),
                       static_cast<RelationId>(UniformIndex(rng, 10)),
                       static_cast<EntityId>(UniformIndex(rng, 1000))});
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ScoreTriple(p, triples[i++ & 1023], Norm::kL1));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ScoreTriple)->ArgsProduct({{0, 1, 2}, {20, 50, 100}});

void BM_RuleGradient(benchmark::State& state) {
  const ModelParams p = InitParams(100, 4, 50, KindArg(state), 1);
  const TrainingSample sample(
      GroundRule::Transitivity({0, 0, 1}, {1, 1, 2}, {0, 2, 2}));
  SparseGradient grad;
  for (auto _ : state) {
    grad.Clear();
    benchmark::DoNotOptimize(AccumulateScoreGradient(p, sample, Norm::kL1, 1.0, grad));
  }
}
BENCHMARK(BM_RuleGradient)->DenseRange(0, 2);

void BM_SgdEpoch(benchmark::State& state) {
  const KnowledgeGraph g = bench::InverseGraph(2000, 8, 20000);
  const auto grounds = Ground(MineRules(g, {}), g, GroundingMode::kNovel);
  const auto samples = MakeTrainingSet(g, grounds);
  const NegativePool pool(g, grounds);
  TrainConfig config;
  config.kind = KindArg(state);
  ModelParams p = InitParams(g, config.dim, config.kind, 1);
  Rng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SgdEpoch(p, samples, pool, config, 0.01, rng));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples.size()));
}
BENCHMARK(BM_SgdEpoch)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace rulekg
