#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_set>
#include <vector>

#include "rulekg/graph.h"
#include "rulekg/model.h"
#include "rulekg/random.h"
#include "rulekg/rules.h"
#include "rulekg/scoring.h"

namespace rulekg {

struct TrainConfig {
  ModelKind kind = ModelKind::kTransE;
  int dim = 50;
  double margin = 2.0;
  // Phase 1 (triples, inference and transitivity groundings).
  double learning_rate = 0.01;
  int epochs = 1000;
  // Phase 2 adds the antisymmetry groundings.
  double learning_rate2 = 0.01;
  int epochs2 = 1000;
  Norm norm = Norm::kL1;
  int batch_size = 1;
  std::uint64_t seed = 1;
  // More than one thread switches to lock-free shared updates; results are
  // then no longer bit-reproducible.
  int threads = 1;
};

// Throws std::invalid_argument naming the first bad field.
void ValidateConfig(const TrainConfig& config);

// F: the triples followed by the ground rules, each tagged by its gate.
std::vector<TrainingSample> MakeTrainingSet(std::span<const Triple> triples,
                                            std::span<const GroundRule> grounds);
std::vector<TrainingSample> MakeTrainingSet(const KnowledgeGraph& graph,
                                            std::span<const GroundRule> grounds);

// Membership oracle for corrupted samples: the training triples and the
// original groundings.
class NegativePool {
 public:
  NegativePool(const KnowledgeGraph& graph, std::span<const GroundRule> grounds);

  const KnowledgeGraph& graph() const { return *graph_; }
  std::int32_t num_entities() const { return graph_->num_entities(); }
  bool ContainsRule(const GroundRule& rule) const { return rules_.contains(KeyOf(rule)); }

 private:
  const KnowledgeGraph* graph_;
  std::unordered_set<GroundRuleKey, GroundRuleKeyHash> rules_;
};

// Corrupts the head side or the tail side (fair coin) with a uniform entity,
// replacing every occurrence of the chosen entity. Transitivity groundings
// only corrupt e1 or e3. A draw is rejected when a changed triple is in the
// graph or the corrupted grounding is an original one; after 100 rejections
// the last draw is returned.
TrainingSample SampleNegative(const TrainingSample& sample, const NegativePool& pool, Rng& rng);

// True when the corruption would be rejected by SampleNegative.
bool IsKnownPositive(const TrainingSample& original, const TrainingSample& corrupted,
                     const NegativePool& pool);

// [margin + s(pos) - s(neg)]_+ with the gate of the shared kind.
double HingeTerm(const ModelParams& params, const TrainingSample& positive,
                 const TrainingSample& negative, double margin, Norm norm);

// Entity and relation vectors to L2 norm <= 1, normals to unit length,
// concept matrices to Frobenius norm <= sqrt(d).
void ProjectNorms(ModelParams& params);

// One shuffled pass over `samples` at rate `learning_rate`, followed by
// ProjectNorms. Returns the mean hinge value. Throws std::runtime_error on a
// non-finite loss.
double SgdEpoch(ModelParams& params, std::span<const TrainingSample> samples,
                const NegativePool& pool, const TrainConfig& config, double learning_rate,
                Rng& rng);

struct EpochLog {
  int epoch;
  int phase;
  double mean_loss;
  double seconds;
};

using EpochCallback = std::function<void(const EpochLog&, const ModelParams&)>;

// Two-phase schedule: phase 1 over triples and inference/transitivity
// groundings, phase 2 over everything including antisymmetry groundings,
// starting from the phase-1 parameters. Without groundings this is plain
// base-model training.
ModelParams Train(const KnowledgeGraph& graph, std::span<const GroundRule> grounds,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});
// Continues from `params`.
ModelParams Train(ModelParams params, const KnowledgeGraph& graph,
                  std::span<const GroundRule> grounds, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Triples the rules generate that the graph does not contain, sorted. Used to
// build the augmented training set of the "pre" mode.
std::vector<Triple> InferredTriples(std::span<const Rule> rules, const KnowledgeGraph& graph);

}  // namespace rulekg
