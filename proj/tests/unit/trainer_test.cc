#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fixtures.h"
#include "mining_oracle.h"
#include "rulekg/miner.h"
#include "rulekg/trainer.h"

namespace rulekg {
namespace {

using testing::GraphOf;

double L2(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST(MakeTrainingSet, Concatenates) {
  std::vector<Triple> triples;
  for (int i = 0; i < 10; ++i) triples.push_back({i, 0, i + 1});
  const auto f = MakeTrainingSet(triples, {});
  ASSERT_EQ(f.size(), 10u);
  for (const auto& s : f) EXPECT_EQ(s.kind(), SampleKind::kTriple);

  const std::vector<GroundRule> rules = {GroundRule::Antisymmetry({0, 0, 1}, {1, 1, 0}),
                                         GroundRule::Inference({0, 0, 1}, {0, 1, 1})};
  const auto g = MakeTrainingSet(std::span<const Triple>(), rules);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].kind(), SampleKind::kAntisymmetry);
  EXPECT_EQ(g[1].kind(), SampleKind::kInference);
}

TEST(SampleNegative, TripleHeadCorruption) {
  const KnowledgeGraph g = GraphOf({{"a", "r", "b"}, {"c", "r", "x"}});
  const NegativePool pool(g, {});
  Rng rng(1);
  std::set<Triple> seen;
  for (int i = 0; i < 200; ++i) {
    const auto neg = SampleNegative(Triple{0, 0, 1}, pool, rng).triple();
    EXPECT_FALSE(g.Contains(neg));
    EXPECT_EQ(neg.relation, 0);
    EXPECT_TRUE(neg.head == 0 || neg.tail == 1);
    seen.insert(neg);
  }
  // Head replacements (c,r,b) and tail replacements both appear.
  EXPECT_TRUE(seen.contains(Triple{2, 0, 1}));
  EXPECT_TRUE(seen.contains(Triple{0, 0, 3}));
}

TEST(SampleNegative, AntisymmetryReplacesBothOccurrences) {
  const KnowledgeGraph g = GraphOf({{"a", "r1", "b"}, {"b", "r2", "a"}, {"c", "r1", "c"}});
  const auto rule = GroundRule::Antisymmetry({0, 0, 1}, {1, 1, 0});
  const NegativePool pool(g, std::vector<GroundRule>{rule});
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const GroundRule neg = SampleNegative(rule, pool, rng).rule();
    const Triple f = neg.triple(0), b = neg.triple(1);
    EXPECT_EQ(f.head, b.tail);
    EXPECT_EQ(f.tail, b.head);
    EXPECT_TRUE((f.head == 0) != (f.tail == 1)) << "exactly one side changes";
  }
}

TEST(SampleNegative, TransitivityKeepsTheMiddleEntity) {
  const KnowledgeGraph g = GraphOf({{"a", "r1", "b"}, {"b", "r2", "c"}, {"a", "r3", "c"},
                                    {"d", "r1", "e"}});
  const auto rule = GroundRule::Transitivity({0, 0, 1}, {1, 1, 2}, {0, 2, 2});
  const NegativePool pool(g, std::vector<GroundRule>{rule});
  Rng rng(3);
  bool head_seen = false, tail_seen = false;
  for (int i = 0; i < 100; ++i) {
    const GroundRule neg = SampleNegative(rule, pool, rng).rule();
    EXPECT_EQ(neg.triple(0).tail, 1);
    EXPECT_EQ(neg.triple(1).head, 1);
    if (neg.triple(0).head != 0) {
      head_seen = true;
      EXPECT_EQ(neg.triple(2).head, neg.triple(0).head);
      EXPECT_EQ(neg.triple(1).tail, 2);
    } else {
      tail_seen = true;
      EXPECT_NE(neg.triple(2).tail, 2);
      EXPECT_EQ(neg.triple(1).tail, neg.triple(2).tail);
    }
  }
  EXPECT_TRUE(head_seen && tail_seen);
}

TEST(SampleNegative, NeedsTwoEntities) {
  const KnowledgeGraph g = GraphOf({{"a", "r", "a"}});
  const NegativePool pool(g, {});
  Rng rng(1);
  EXPECT_THROW(SampleNegative(Triple{0, 0, 0}, pool, rng), std::invalid_argument);
}

TEST(SampleNegative, AuditOfAcceptedDraws) {
  // Independent membership test: changed triples must be absent from the
  // graph and the corrupted grounding must not be an original one.
  Rng rng(77);
  std::mt19937_64 graph_rng(5);
  const KnowledgeGraph g = testing::RandomGraph(graph_rng, 60, 4, 120);
  const auto rules = MineRules(g, {{0.0, 0.0, 0.0}, 1});
  const auto grounds = Ground(rules, g, GroundingMode::kAll);
  ASSERT_FALSE(grounds.empty());
  std::set<std::pair<RuleType, std::vector<Triple>>> originals;
  auto key = [](const GroundRule& f) {
    std::vector<Triple> ts(f.triples().begin(), f.triples().end());
    if (f.type() == RuleType::kAntisymmetry) std::sort(ts.begin(), ts.end());
    return std::make_pair(f.type(), ts);
  };
  for (const auto& f : grounds) originals.insert(key(f));
  const NegativePool pool(g, grounds);
  const auto samples = MakeTrainingSet(g, grounds);
  for (int i = 0; i < 1000; ++i) {
    const TrainingSample& pos = samples[UniformIndex(rng, samples.size())];
    const TrainingSample neg = SampleNegative(pos, pool, rng);
    ASSERT_EQ(neg.kind(), pos.kind());
    if (pos.is_triple()) {
      EXPECT_FALSE(g.Contains(neg.triple()));
      continue;
    }
    const auto before = pos.rule().triples();
    const auto after = neg.rule().triples();
    bool changed = false;
    for (std::size_t k = 0; k < after.size(); ++k) {
      if (after[k] == before[k]) continue;
      changed = true;
      EXPECT_FALSE(g.Contains(after[k]));
    }
    EXPECT_TRUE(changed);
    EXPECT_FALSE(originals.contains(key(neg.rule())));
  }
}

TEST(HingeTerm, Examples) {
  ModelParams p(ModelKind::kTransE, 1, 3, 1);
  p.entity(2)[0] = 3.0;  // s(pos) = 0, s(neg) = 3 = margin + 1
  EXPECT_EQ(HingeTerm(p, Triple{0, 0, 1}, Triple{0, 0, 2}, 2.0, Norm::kL1), 0.0);
  EXPECT_EQ(HingeTerm(p, Triple{0, 0, 1}, Triple{1, 0, 0}, 2.0, Norm::kL1), 2.0);
  EXPECT_THROW(HingeTerm(p, Triple{0, 0, 1}, GroundRule::Antisymmetry({0, 0, 1}, {1, 0, 0}), 2.0,
                         Norm::kL1),
               std::invalid_argument);
}

TEST(ProjectNorms, ClampsAndIsIdempotent) {
  ModelParams p(ModelKind::kTransH, 2, 2, 1);
  p.entity(0)[0] = 2.0;
  p.entity(1)[0] = 0.3;
  p.entity(1)[1] = 0.4;
  p.normal(0)[1] = 3.0;
  auto c = p.EnsureConcept(0);
  for (double& x : c) x = 5.0;
  ProjectNorms(p);
  EXPECT_EQ(p.entity(0)[0], 1.0);
  EXPECT_EQ(p.entity(0)[1], 0.0);
  EXPECT_EQ(p.entity(1)[0], 0.3);
  EXPECT_EQ(p.entity(1)[1], 0.4);
  EXPECT_EQ(p.normal(0)[1], 1.0);
  EXPECT_NEAR(L2(p.concept_matrix(0)), std::sqrt(2.0), 1e-12);
  const ModelParams once = p;
  ProjectNorms(p);
  EXPECT_EQ(p, once);
}

TEST(SgdEpoch, ZeroLearningRateOnlyProjects) {
  const KnowledgeGraph g = GraphOf({{"a", "r", "b"}, {"b", "r", "c"}});
  ModelParams p = InitParams(g, 3, ModelKind::kTransE, 4);
  const ModelParams before = p;
  TrainConfig config;
  config.dim = 3;
  const NegativePool pool(g, {});
  Rng rng(1);
  const auto samples = MakeTrainingSet(g, {});
  EXPECT_GT(SgdEpoch(p, samples, pool, config, 0.0, rng), 0.0);
  EXPECT_EQ(p, before);
}

TEST(SgdEpoch, HandTraceOneDimension) {
  // One triple (a, r, b) with a = 0.1, r = 0.2, b = 0.5, margin 2, L1.
  // Both possible negatives, (b, r, b) and (a, r, a), score 0.2, so the
  // step is the same: d/da = -1, d/dr = -2, d/db = +1.
  const KnowledgeGraph g = GraphOf({{"a", "r", "b"}});
  ModelParams p(ModelKind::kTransE, 1, 2, 1);
  p.entity(0)[0] = 0.1;
  p.relation(0)[0] = 0.2;
  p.entity(1)[0] = 0.5;
  TrainConfig config;
  config.dim = 1;
  const NegativePool pool(g, {});
  Rng rng(8);
  const auto samples = MakeTrainingSet(g, {});
  EXPECT_DOUBLE_EQ(SgdEpoch(p, samples, pool, config, 0.1, rng), 2.0);
  EXPECT_DOUBLE_EQ(p.entity(0)[0], 0.2);
  EXPECT_DOUBLE_EQ(p.relation(0)[0], 0.4);
  EXPECT_DOUBLE_EQ(p.entity(1)[0], 0.4);
}

TEST(SgdEpoch, SatisfiedMarginsLeaveParamsAlone) {
  const KnowledgeGraph g = GraphOf({{"a", "r", "b"}, {"c", "s", "c"}});
  ModelParams p(ModelKind::kTransE, 1, 3, 2);
  // a = -1, r = 1, b = 0, c = 1: the positive scores 0 and every corruption
  // scores at least 1, beyond the margin 0.5.
  p.entity(0)[0] = -1.0;
  p.relation(0)[0] = 1.0;
  p.entity(1)[0] = 0.0;
  p.entity(2)[0] = 1.0;
  p.relation(1)[0] = 0.0;
  TrainConfig config;
  config.dim = 1;
  config.margin = 0.5;
  const NegativePool pool(g, {});
  Rng rng(8);
  const auto samples = MakeTrainingSet(std::vector<Triple>{{0, 0, 1}}, {});
  const ModelParams before = p;
  EXPECT_EQ(SgdEpoch(p, samples, pool, config, 0.1, rng), 0.0);
  EXPECT_EQ(p, before);
}

TEST(SgdEpoch, NonFiniteLossAborts) {
  const KnowledgeGraph g = GraphOf({{"a", "r", "b"}});
  ModelParams p(ModelKind::kTransE, 1, 2, 1);
  p.entity(0)[0] = std::nan("");
  TrainConfig config;
  config.dim = 1;
  const NegativePool pool(g, {});
  Rng rng(1);
  const auto samples = MakeTrainingSet(g, {});
  EXPECT_THROW(SgdEpoch(p, samples, pool, config, 0.1, rng), std::runtime_error);
}

TEST(Train, ConvergesOnTinyGraph) {
  // Embeddable exactly: a translation square plus one extra s edge.
  const KnowledgeGraph g = GraphOf({{"a", "r", "b"},
                                    {"c", "r", "d"},
                                    {"a", "s", "c"},
                                    {"b", "s", "d"},
                                    {"e", "s", "a"}});
  TrainConfig config;
  config.dim = 4;
  config.margin = 1.0;
  config.learning_rate = 0.05;
  config.epochs = 500;
  config.seed = 3;
  double last = 1e9;
  Train(g, {}, config, [&](const EpochLog& log, const ModelParams&) { last = log.mean_loss; });
  EXPECT_LT(last, 0.01 * config.margin);
}

TEST(Train, DeterministicAndPhaseTwoOptional) {
  std::mt19937_64 graph_rng(9);
  const KnowledgeGraph g = testing::RandomGraph(graph_rng, 30, 3, 80);
  const auto grounds = Ground(MineRules(g, {{0.1, 0.1, 0.1}, 1}), g, GroundingMode::kAll);
  TrainConfig config;
  config.dim = 6;
  config.epochs = 5;
  config.epochs2 = 3;
  for (ModelKind kind : {ModelKind::kTransE, ModelKind::kTransH, ModelKind::kTransR}) {
    config.kind = kind;
    EXPECT_EQ(Train(g, grounds, config), Train(g, grounds, config));
  }
  config.kind = ModelKind::kTransE;
  TrainConfig no_phase2 = config;
  no_phase2.epochs2 = 0;
  std::vector<GroundRule> phase1_only;
  for (const auto& f : grounds) {
    if (f.type() != RuleType::kAntisymmetry) phase1_only.push_back(f);
  }
  // With epochs2 = 0 the antisymmetry groundings only matter as exclusions
  // for negatives, which the triples never hit.
  EXPECT_EQ(Train(g, grounds, no_phase2), Train(g, phase1_only, no_phase2));
}

TEST(Train, LogsPhasesAndKeepsConstraints) {
  const KnowledgeGraph g = GraphOf({{"a", "r", "b"}, {"b", "s", "a"}, {"c", "r", "d"}});
  const auto anti = GroundRule::Antisymmetry({0, 0, 1}, {1, 1, 0});
  TrainConfig config;
  config.kind = ModelKind::kTransH;
  config.dim = 3;
  config.epochs = 4;
  config.epochs2 = 2;
  config.learning_rate = 0.5;
  std::vector<std::pair<int, int>> seen;
  Train(g, std::vector<GroundRule>{anti}, config, [&](const EpochLog& log, const ModelParams& p) {
    seen.push_back({log.phase, log.epoch});
    for (EntityId e = 0; e < p.num_entities(); ++e) EXPECT_LE(L2(p.entity(e)), 1 + 1e-12);
    for (RelationId r = 0; r < p.num_relations(); ++r) {
      EXPECT_LE(L2(p.relation(r)), 1 + 1e-12);
      EXPECT_NEAR(L2(p.normal(r)), 1.0, 1e-12);
    }
  });
  EXPECT_EQ(seen, (std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {1, 3}, {1, 4}, {2, 1}, {2, 2}}));
}

TEST(Train, RejectsBadConfig) {
  const KnowledgeGraph g = GraphOf({{"a", "r", "b"}});
  TrainConfig config;
  config.margin = 0;
  EXPECT_THROW(Train(g, {}, config), std::invalid_argument);
  config = {};
  config.dim = 0;
  EXPECT_THROW(Train(g, {}, config), std::invalid_argument);
  config = {};
  config.epochs = -1;
  EXPECT_THROW(Train(g, {}, config), std::invalid_argument);
  config = {};
  config.dim = 4;
  EXPECT_THROW(Train(ModelParams(ModelKind::kTransE, 3, 2, 1), g, {}, config),
               std::invalid_argument);
}

TEST(InferredTriples, OnlyMissingOnes) {
  const KnowledgeGraph g = GraphOf({{"a", "r1", "b"}, {"b", "r2", "a"}, {"c", "r1", "d"}});
  Rule rule = RuleCandidate::Antisymmetry(0, 1);
  rule.confidence = 0.5;
  EXPECT_EQ(InferredTriples(std::vector<Rule>{rule}, g), (std::vector<Triple>{{3, 1, 2}}));
}

}  // namespace
}  // namespace rulekg
