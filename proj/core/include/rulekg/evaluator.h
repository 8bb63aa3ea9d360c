#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rulekg/graph.h"
#include "rulekg/model.h"
#include "rulekg/random.h"

namespace rulekg {

enum class Side { kHead, kTail };
enum class Setting { kRaw, kFiltered };
// Optimistic: rank = 1 + #strictly better. Pessimistic: 1 + #better or equal.
enum class TieRule { kOptimistic, kPessimistic };

std::string_view SettingName(Setting setting);

// Train, valid and test triples as one indexed graph, for filtering.
KnowledgeGraph KnownTriples(const DatasetSplits& splits);

struct RankPair {
  std::int64_t raw = 0;
  std::int64_t filtered = 0;
};

// Ranks true entities against every corruption. Entity projections are cached
// per relation, so ranking triples grouped by relation is cheapest.
class Ranker {
 public:
  // `known` may be null when only raw ranks are needed.
  Ranker(const ModelParams& params, Norm norm, const KnowledgeGraph* known,
         TieRule tie = TieRule::kOptimistic);

  RankPair Rank(const Triple& triple, Side side);

 private:
  const double* Projected(RelationId r);

  const ModelParams& params_;
  Norm norm_;
  const KnowledgeGraph* known_;
  TieRule tie_;
  RelationId cached_ = -1;
  std::vector<double> projected_;
  std::vector<double> scores_;
};

std::int64_t RankEntity(const ModelParams& params, const Triple& triple, Side side,
                        const KnowledgeGraph& known, Setting setting, Norm norm,
                        TieRule tie = TieRule::kOptimistic);

struct RankResult {
  Triple triple;
  RankPair head;
  RankPair tail;
};

// Ranks of every test triple, in input order. Deterministic for any thread
// count.
std::vector<RankResult> RankAll(const ModelParams& params, std::span<const Triple> test,
                                const KnowledgeGraph& known, Norm norm, int threads = 1,
                                TieRule tie = TieRule::kOptimistic);

inline constexpr std::array<int, 4> kHitsAt = {1, 3, 5, 10};

struct LPMetrics {
  Setting setting = Setting::kRaw;
  double mr = 0;
  double mrr = 0;
  // Indexed like kHitsAt.
  std::array<double, 4> hits = {0, 0, 0, 0};
  std::size_t count = 0;

  double Hits(int n) const;
};

// MR = sum(rank_h + rank_t) / 2N, MRR likewise over reciprocals, Hits@n the
// share of ranks <= n. Throws std::invalid_argument on empty input.
LPMetrics AggregateRanks(std::span<const RankPair> head_ranks, std::span<const RankPair> tail_ranks,
                         Setting setting);
LPMetrics AggregateRanks(std::span<const RankResult> ranks, Setting setting);
LPMetrics LinkPrediction(const ModelParams& params, std::span<const Triple> test,
                         const KnowledgeGraph& known, Setting setting, Norm norm, int threads = 1);

struct LabeledTriple {
  Triple triple;
  bool positive = true;
  friend bool operator==(const LabeledTriple&, const LabeledTriple&) = default;
};

enum class TcProtocol {
  // 5 head and 5 tail corruptions per positive.
  kOneToTen,
  // One corruption per positive, side by fair coin.
  kOneToOne,
};

// Each positive followed by its negatives. Replacement heads of relation r are
// drawn from entities seen as heads of r in `known` (tails likewise); no
// negative is in `known`. When a position's pool has no usable entity the draw
// falls back to all entities and `fallbacks` is incremented.
std::vector<LabeledTriple> GenerateTcNegatives(std::span<const Triple> positives,
                                               const KnowledgeGraph& known, Rng& rng,
                                               TcProtocol protocol = TcProtocol::kOneToTen,
                                               std::size_t* fallbacks = nullptr);

struct ScoredLabel {
  RelationId relation;
  double score;
  bool positive;
};

struct ThresholdTable {
  std::unordered_map<RelationId, double> sigma;
  double default_sigma = 0;

  double Sigma(RelationId r) const {
    auto it = sigma.find(r);
    return it == sigma.end() ? default_sigma : it->second;
  }
};

// Best threshold for one group: candidates are the midpoints of consecutive
// distinct sorted scores plus one below the minimum and one above the maximum;
// ties go to the smaller threshold.
double BestThreshold(std::span<const ScoredLabel> group);
ThresholdTable FitThresholds(std::span<const ScoredLabel> scored);
ThresholdTable FitThresholds(const ModelParams& params, std::span<const LabeledTriple> labeled,
                             Norm norm);

std::vector<ScoredLabel> ScoreLabeled(const ModelParams& params,
                                      std::span<const LabeledTriple> labeled, Norm norm);

struct TCMetrics {
  double accuracy = 0;
  std::size_t count = 0;
};

// A triple is classified positive when its score is below sigma_r.
TCMetrics Classify(std::span<const ScoredLabel> scored, const ThresholdTable& thresholds);
TCMetrics TripleClassification(const ModelParams& params, const ThresholdTable& thresholds,
                               std::span<const LabeledTriple> labeled, Norm norm);

struct MetricRow {
  std::string metric;
  std::string setting;
  double value;
};

std::vector<MetricRow> MetricRows(const LPMetrics& metrics);
// CSV with header "metric,setting,value".
void WriteMetricsCsv(std::ostream& out, std::span<const MetricRow> rows);
// Raw and filtered side by side.
void WriteMetricsTable(std::ostream& out, std::span<const LPMetrics> lp, const TCMetrics* tc);
// Per-triple ranks: head,relation,tail,raw_head,raw_tail,filtered_head,filtered_tail.
void WriteRankDump(std::ostream& out, std::span<const RankResult> ranks, const Vocabulary& entities,
                   const Vocabulary& relations);

}  // namespace rulekg
