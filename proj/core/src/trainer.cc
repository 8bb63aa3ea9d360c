#include "rulekg/trainer.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "rulekg/miner.h"

namespace rulekg {
namespace {

constexpr int kMaxRedraws = 100;

void ClampL2(std::span<double> v, double limit) {
  double sq = 0;
  for (double x : v) sq += x * x;
  if (sq > limit * limit) {
    const double s = limit / std::sqrt(sq);
    for (double& x : v) x *= s;
  }
}

void UnitNormalize(std::span<double> v) {
  double sq = 0;
  for (double x : v) sq += x * x;
  if (sq > 0) {
    const double s = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= s;
  }
}

Triple Replace(Triple t, EntityId from, EntityId to) {
  if (t.head == from) t.head = to;
  if (t.tail == from) t.tail = to;
  return t;
}

// Corrupts `sample` with entity `to`. `head_side` picks the entity to replace.
TrainingSample Corrupt(const TrainingSample& sample, bool head_side, EntityId to) {
  if (sample.is_triple()) {
    const Triple& t = sample.triple();
    return Replace(t, head_side ? t.head : t.tail, to);
  }
  const GroundRule& g = sample.rule();
  std::array<Triple, 3> ts{};
  std::copy(g.triples().begin(), g.triples().end(), ts.begin());
  if (g.type() == RuleType::kTransitivity) {
    // e2 stays fixed, so only the e1 or e3 slots move.
    if (head_side) {
      ts[0].head = to;
      ts[2].head = to;
    } else {
      ts[1].tail = to;
      ts[2].tail = to;
    }
  } else {
    const EntityId from = head_side ? ts[0].head : ts[0].tail;
    ts[0] = Replace(ts[0], from, to);
    ts[1] = Replace(ts[1], from, to);
  }
  return GroundRule::Make(g.type(), std::span<const Triple>(ts.data(), RuleArity(g.type())),
                          g.concept_id());
}

void RenormalizeTouchedNormals(ModelParams& params, const SparseGradient& grad) {
  for (const auto& e : grad.entries()) {
    if (e.block == Block::kNormal) UnitNormalize(params.normal(e.id));
  }
}

struct RunState {
  double loss = 0;
  bool finite = true;
};

// Single-threaded pass over order[begin, end).
void RunRange(ModelParams& params, std::span<const TrainingSample> samples,
              std::span<const std::size_t> order, const NegativePool& pool,
              const TrainConfig& config, double learning_rate, Rng& rng, RunState& state) {
  SparseGradient grad;
  const int batch = std::max(1, config.batch_size);
  int in_batch = 0;
  auto flush = [&] {
    if (in_batch == 0) return;
    if (!grad.empty()) {
      grad.ApplyTo(params, learning_rate / in_batch);
      if (params.has_normals()) RenormalizeTouchedNormals(params, grad);
    }
    grad.Clear();
    in_batch = 0;
  };
  for (std::size_t idx : order) {
    const TrainingSample& pos = samples[idx];
    const TrainingSample neg = SampleNegative(pos, pool, rng);
    const double loss = HingeGradient(params, pos, neg, config.margin, config.norm, grad);
    if (!std::isfinite(loss)) {
      state.finite = false;
      return;
    }
    state.loss += loss;
    if (++in_batch == batch) flush();
  }
  flush();
}

}  // namespace

void ValidateConfig(const TrainConfig& config) {
  if (config.dim < 1) throw std::invalid_argument("dim must be at least 1");
  if (!(config.margin > 0)) throw std::invalid_argument("margin must be positive");
  if (!(config.learning_rate >= 0) || !(config.learning_rate2 >= 0)) {
    throw std::invalid_argument("learning rates must be non-negative");
  }
  if (config.epochs < 0 || config.epochs2 < 0) {
    throw std::invalid_argument("epoch counts must be non-negative");
  }
  if (config.batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (config.threads < 1) throw std::invalid_argument("threads must be at least 1");
}

std::vector<TrainingSample> MakeTrainingSet(std::span<const Triple> triples,
                                            std::span<const GroundRule> grounds) {
  std::vector<TrainingSample> out;
  out.reserve(triples.size() + grounds.size());
  for (const Triple& t : triples) out.emplace_back(t);
  for (const GroundRule& g : grounds) out.emplace_back(g);
  return out;
}

std::vector<TrainingSample> MakeTrainingSet(const KnowledgeGraph& graph,
                                            std::span<const GroundRule> grounds) {
  return MakeTrainingSet(graph.triples(), grounds);
}

NegativePool::NegativePool(const KnowledgeGraph& graph, std::span<const GroundRule> grounds)
    : graph_(&graph) {
  rules_.reserve(grounds.size());
  for (const GroundRule& g : grounds) rules_.insert(KeyOf(g));
}

bool IsKnownPositive(const TrainingSample& original, const TrainingSample& corrupted,
                     const NegativePool& pool) {
  const KnowledgeGraph& graph = pool.graph();
  if (original.is_triple()) return graph.Contains(corrupted.triple());
  const auto before = original.rule().triples();
  const auto after = corrupted.rule().triples();
  for (std::size_t i = 0; i < after.size(); ++i) {
    if (after[i] != before[i] && graph.Contains(after[i])) return true;
  }
  if (std::equal(before.begin(), before.end(), after.begin())) return true;
  return pool.ContainsRule(corrupted.rule());
}

TrainingSample SampleNegative(const TrainingSample& sample, const NegativePool& pool, Rng& rng) {
  const std::int32_t n = pool.num_entities();
  if (n < 2) throw std::invalid_argument("negative sampling needs at least 2 entities");
  const bool head_side = FairCoin(rng);
  TrainingSample draw = sample;
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    const auto e = static_cast<EntityId>(UniformIndex(rng, static_cast<std::uint64_t>(n)));
    draw = Corrupt(sample, head_side, e);
    if (!IsKnownPositive(sample, draw, pool)) break;
  }
  return draw;
}

double HingeTerm(const ModelParams& params, const TrainingSample& positive,
                 const TrainingSample& negative, double margin, Norm norm) {
  if (positive.kind() != negative.kind()) {
    throw std::invalid_argument("positive and negative samples differ in kind");
  }
  return std::max(0.0, margin + Score(params, positive, norm) - Score(params, negative, norm));
}

void ProjectNorms(ModelParams& params) {
  for (EntityId e = 0; e < params.num_entities(); ++e) ClampL2(params.entity(e), 1.0);
  for (RelationId r = 0; r < params.num_relations(); ++r) ClampL2(params.relation(r), 1.0);
  if (params.has_normals()) {
    for (RelationId r = 0; r < params.num_relations(); ++r) UnitNormalize(params.normal(r));
  }
  const double limit = std::sqrt(static_cast<double>(params.dim()));
  for (const auto& [c, m] : params.concepts()) ClampL2(params.EnsureConcept(c), limit);
}

double SgdEpoch(ModelParams& params, std::span<const TrainingSample> samples,
                const NegativePool& pool, const TrainConfig& config, double learning_rate,
                Rng& rng) {
  if (samples.empty()) {
    ProjectNorms(params);
    return 0.0;
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Shuffle(order.data(), order.size(), rng);

  double total = 0;
  bool finite = true;
  const int threads = std::min<int>(config.threads, static_cast<int>(samples.size()));
  if (threads <= 1) {
    RunState state;
    RunRange(params, samples, order, pool, config, learning_rate, rng, state);
    total = state.loss;
    finite = state.finite;
  } else {
    // Workers share `params` without locks; lost updates are tolerated.
    std::vector<RunState> states(threads);
    std::vector<Rng> rngs;
    const std::uint64_t base = rng();
    for (int w = 0; w < threads; ++w) {
      rngs.emplace_back(DeriveSeed(base, "worker" + std::to_string(w)));
    }
    std::vector<std::thread> workers;
    const std::size_t chunk = (order.size() + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const std::size_t begin = std::min(order.size(), w * chunk);
      const std::size_t end = std::min(order.size(), begin + chunk);
      workers.emplace_back([&, w, begin, end] {
        RunRange(params, samples, std::span<const std::size_t>(order).subspan(begin, end - begin),
                 pool, config, learning_rate, rngs[w], states[w]);
      });
    }
    for (auto& t : workers) t.join();
    for (const RunState& s : states) {
      total += s.loss;
      finite = finite && s.finite;
    }
  }
  if (!finite || !std::isfinite(total)) {
    throw std::runtime_error("training loss became non-finite at learning rate " +
                             std::to_string(learning_rate) + "; lower the learning rate");
  }
  ProjectNorms(params);
  return total / static_cast<double>(samples.size());
}

ModelParams Train(const KnowledgeGraph& graph, std::span<const GroundRule> grounds,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  ValidateConfig(config);
  ModelParams params = InitParams(graph, config.dim, config.kind, DeriveSeed(config.seed, "init"));
  return Train(std::move(params), graph, grounds, config, on_epoch);
}

ModelParams Train(ModelParams params, const KnowledgeGraph& graph,
                  std::span<const GroundRule> grounds, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  ValidateConfig(config);
  if (params.kind() != config.kind || params.dim() != config.dim) {
    throw std::invalid_argument("initial parameters do not match the configured model");
  }
  std::vector<GroundRule> phase1_rules;
  std::vector<GroundRule> antisymmetry;
  for (const GroundRule& g : grounds) {
    (g.type() == RuleType::kAntisymmetry ? antisymmetry : phase1_rules).push_back(g);
    if (g.concept_id() != kUnknownConcept) params.EnsureConcept(g.concept_id());
  }
  const NegativePool pool(graph, grounds);
  std::vector<TrainingSample> samples = MakeTrainingSet(graph, phase1_rules);
  Rng rng(DeriveSeed(config.seed, "train"));

  auto run_phase = [&](int phase, int epochs, double lr) {
    for (int epoch = 1; epoch <= epochs; ++epoch) {
      const auto start = std::chrono::steady_clock::now();
      const double loss = SgdEpoch(params, samples, pool, config, lr, rng);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      if (on_epoch) on_epoch(EpochLog{epoch, phase, loss, elapsed.count()}, params);
    }
  };
  run_phase(1, config.epochs, config.learning_rate);
  // Phase 2 only differs from phase 1 when antisymmetry groundings exist.
  if (!antisymmetry.empty()) {
    for (const GroundRule& g : antisymmetry) samples.emplace_back(g);
    run_phase(2, config.epochs2, config.learning_rate2);
  }
  return params;
}

std::vector<Triple> InferredTriples(std::span<const Rule> rules, const KnowledgeGraph& graph) {
  std::vector<Triple> out;
  for (const Rule& rule : rules) {
    for (const Triple& t : GetNewTriples(rule, graph)) {
      if (!graph.Contains(t)) out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace rulekg
