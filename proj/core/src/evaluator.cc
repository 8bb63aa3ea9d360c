#include "rulekg/evaluator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <thread>

#include "rulekg/rule_io.h"
#include "rulekg/scoring.h"

namespace rulekg {
namespace {

constexpr int kPoolDraws = 100;
constexpr int kFallbackDraws = 10000;

double Distance(const double* v, int d, Norm norm) {
  double s = 0;
  if (norm == Norm::kL1) {
    for (int i = 0; i < d; ++i) s += std::abs(v[i]);
    return s;
  }
  for (int i = 0; i < d; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

std::vector<EntityId> Unique(std::vector<EntityId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::string_view SettingName(Setting setting) {
  return setting == Setting::kRaw ? "raw" : "filtered";
}

KnowledgeGraph KnownTriples(const DatasetSplits& splits) {
  std::vector<Triple> all(splits.all_triples.begin(), splits.all_triples.end());
  return BuildGraph(all, splits.train.shared_entities(), splits.train.shared_relations());
}

Ranker::Ranker(const ModelParams& params, Norm norm, const KnowledgeGraph* known, TieRule tie)
    : params_(params), norm_(norm), known_(known), tie_(tie) {}

const double* Ranker::Projected(RelationId r) {
  if (params_.kind() == ModelKind::kTransE) return params_.entity_table().data();
  if (cached_ != r) {
    const int d = params_.dim();
    projected_.resize(static_cast<std::size_t>(params_.num_entities()) * d);
    for (EntityId e = 0; e < params_.num_entities(); ++e) {
      ProjectEntityInto(params_, e, r,
                        std::span<double>(projected_.data() + static_cast<std::size_t>(e) * d, d));
    }
    cached_ = r;
  }
  return projected_.data();
}

RankPair Ranker::Rank(const Triple& triple, Side side) {
  const int d = params_.dim();
  const std::int32_t n = params_.num_entities();
  const double* p = Projected(triple.relation);
  const double* r = params_.relation(triple.relation).data();
  auto row = [&](EntityId e) { return p + static_cast<std::size_t>(e) * d; };
  scores_.resize(static_cast<std::size_t>(n));
  std::vector<double> v(static_cast<std::size_t>(d));
  if (side == Side::kTail) {
    const double* h = row(triple.head);
    for (EntityId e = 0; e < n; ++e) {
      const double* t = row(e);
      for (int i = 0; i < d; ++i) v[i] = (h[i] + r[i]) - t[i];
      scores_[e] = Distance(v.data(), d, norm_);
    }
  } else {
    const double* t = row(triple.tail);
    for (EntityId e = 0; e < n; ++e) {
      const double* h = row(e);
      for (int i = 0; i < d; ++i) v[i] = (h[i] + r[i]) - t[i];
      scores_[e] = Distance(v.data(), d, norm_);
    }
  }
  const EntityId truth = side == Side::kTail ? triple.tail : triple.head;
  const double target = scores_[truth];
  auto better = [&](double s) { return tie_ == TieRule::kOptimistic ? s < target : s <= target; };
  std::int64_t count = 0;
  for (EntityId e = 0; e < n; ++e) {
    if (e != truth && better(scores_[e])) ++count;
  }
  RankPair out;
  out.raw = 1 + count;
  out.filtered = out.raw;
  if (known_ != nullptr) {
    const auto known = side == Side::kTail ? known_->Tails(triple.head, triple.relation)
                                           : known_->Heads(triple.tail, triple.relation);
    for (EntityId e : known) {
      if (e != truth && better(scores_[e])) --out.filtered;
    }
  }
  return out;
}

std::int64_t RankEntity(const ModelParams& params, const Triple& triple, Side side,
                        const KnowledgeGraph& known, Setting setting, Norm norm, TieRule tie) {
  Ranker ranker(params, norm, &known, tie);
  const RankPair rank = ranker.Rank(triple, side);
  return setting == Setting::kRaw ? rank.raw : rank.filtered;
}

std::vector<RankResult> RankAll(const ModelParams& params, std::span<const Triple> test,
                                const KnowledgeGraph& known, Norm norm, int threads,
                                TieRule tie) {
  std::vector<RankResult> results(test.size());
  // Group by relation so each worker reuses its projection cache.
  std::vector<std::size_t> order(test.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return test[a].relation < test[b].relation;
  });
  auto work = [&](std::size_t begin, std::size_t end) {
    Ranker ranker(params, norm, &known, tie);
    for (std::size_t k = begin; k < end; ++k) {
      const Triple& t = test[order[k]];
      results[order[k]] = RankResult{t, ranker.Rank(t, Side::kHead), ranker.Rank(t, Side::kTail)};
    }
  };
  threads = std::max(1, std::min<int>(threads, static_cast<int>(test.size())));
  if (threads == 1) {
    work(0, order.size());
  } else {
    std::vector<std::thread> workers;
    const std::size_t chunk = (order.size() + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const std::size_t begin = std::min(order.size(), w * chunk);
      const std::size_t end = std::min(order.size(), begin + chunk);
      workers.emplace_back(work, begin, end);
    }
    for (auto& t : workers) t.join();
  }
  return results;
}

double LPMetrics::Hits(int n) const {
  for (std::size_t i = 0; i < kHitsAt.size(); ++i) {
    if (kHitsAt[i] == n) return hits[i];
  }
  throw std::invalid_argument("Hits@" + std::to_string(n) + " is not tracked");
}

LPMetrics AggregateRanks(std::span<const RankPair> head_ranks, std::span<const RankPair> tail_ranks,
                         Setting setting) {
  if (head_ranks.empty() || head_ranks.size() != tail_ranks.size()) {
    throw std::invalid_argument("link prediction needs a non-empty test set");
  }
  LPMetrics m;
  m.setting = setting;
  m.count = head_ranks.size();
  double sum = 0;
  double reciprocal = 0;
  std::array<std::size_t, 4> hits = {0, 0, 0, 0};
  auto add = [&](const RankPair& p) {
    const std::int64_t rank = setting == Setting::kRaw ? p.raw : p.filtered;
    sum += static_cast<double>(rank);
    reciprocal += 1.0 / static_cast<double>(rank);
    for (std::size_t i = 0; i < kHitsAt.size(); ++i) {
      if (rank <= kHitsAt[i]) ++hits[i];
    }
  };
  for (std::size_t i = 0; i < head_ranks.size(); ++i) {
    add(head_ranks[i]);
    add(tail_ranks[i]);
  }
  const double total = 2.0 * static_cast<double>(m.count);
  m.mr = sum / total;
  m.mrr = reciprocal / total;
  for (std::size_t i = 0; i < kHitsAt.size(); ++i) m.hits[i] = static_cast<double>(hits[i]) / total;
  return m;
}

LPMetrics AggregateRanks(std::span<const RankResult> ranks, Setting setting) {
  std::vector<RankPair> heads, tails;
  heads.reserve(ranks.size());
  tails.reserve(ranks.size());
  for (const RankResult& r : ranks) {
    heads.push_back(r.head);
    tails.push_back(r.tail);
  }
  return AggregateRanks(heads, tails, setting);
}

LPMetrics LinkPrediction(const ModelParams& params, std::span<const Triple> test,
                         const KnowledgeGraph& known, Setting setting, Norm norm, int threads) {
  if (test.empty()) throw std::invalid_argument("link prediction needs a non-empty test set");
  return AggregateRanks(RankAll(params, test, known, norm, threads), setting);
}

std::vector<LabeledTriple> GenerateTcNegatives(std::span<const Triple> positives,
                                               const KnowledgeGraph& known, Rng& rng,
                                               TcProtocol protocol, std::size_t* fallbacks) {
  const std::int32_t num_entities = known.num_entities();
  if (num_entities < 2) throw std::invalid_argument("triple classification needs 2+ entities");
  std::map<RelationId, std::pair<std::vector<EntityId>, std::vector<EntityId>>> pools;
  auto pool_of = [&](RelationId r) -> const auto& {
    auto it = pools.find(r);
    if (it == pools.end()) {
      std::vector<EntityId> heads, tails;
      for (const auto& [h, t] : known.Pairs(r)) {
        heads.push_back(h);
        tails.push_back(t);
      }
      it = pools.emplace(r, std::make_pair(Unique(std::move(heads)), Unique(std::move(tails)))).first;
    }
    return it->second;
  };
  auto corrupt = [&](const Triple& t, bool head_side) {
    const auto& [heads, tails] = pool_of(t.relation);
    const auto& pool = head_side ? heads : tails;
    auto with = [&](EntityId e) {
      Triple c = t;
      (head_side ? c.head : c.tail) = e;
      return c;
    };
    if (!pool.empty()) {
      for (int i = 0; i < kPoolDraws; ++i) {
        const Triple c = with(pool[UniformIndex(rng, pool.size())]);
        if (!known.Contains(c)) return c;
      }
    }
    if (fallbacks) ++*fallbacks;
    Triple c = t;
    for (int i = 0; i < kFallbackDraws; ++i) {
      c = with(static_cast<EntityId>(UniformIndex(rng, static_cast<std::uint64_t>(num_entities))));
      if (!known.Contains(c)) return c;
    }
    throw std::runtime_error("no corruption outside the known triples could be drawn");
  };
  std::vector<LabeledTriple> out;
  out.reserve(positives.size() * (protocol == TcProtocol::kOneToTen ? 11 : 2));
  for (const Triple& t : positives) {
    out.push_back({t, true});
    if (protocol == TcProtocol::kOneToTen) {
      for (int i = 0; i < 5; ++i) out.push_back({corrupt(t, true), false});
      for (int i = 0; i < 5; ++i) out.push_back({corrupt(t, false), false});
    } else {
      out.push_back({corrupt(t, FairCoin(rng)), false});
    }
  }
  return out;
}

double BestThreshold(std::span<const ScoredLabel> group) {
  if (group.empty()) return 0.0;
  std::vector<ScoredLabel> sorted(group.begin(), group.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredLabel& a, const ScoredLabel& b) { return a.score < b.score; });
  std::size_t negatives = 0;
  for (const auto& s : sorted) negatives += !s.positive;
  // Below the minimum everything is negative.
  double best_sigma = sorted.front().score - 1.0;
  std::size_t best_correct = negatives;
  std::size_t correct = negatives;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    correct += sorted[i].positive ? 1 : -1;
    if (i + 1 < sorted.size() && sorted[i + 1].score == sorted[i].score) continue;
    const double sigma = i + 1 < sorted.size() ? 0.5 * (sorted[i].score + sorted[i + 1].score)
                                               : sorted.back().score + 1.0;
    if (correct > best_correct) {
      best_correct = correct;
      best_sigma = sigma;
    }
  }
  return best_sigma;
}

ThresholdTable FitThresholds(std::span<const ScoredLabel> scored) {
  ThresholdTable table;
  std::map<RelationId, std::vector<ScoredLabel>> groups;
  for (const ScoredLabel& s : scored) groups[s.relation].push_back(s);
  for (const auto& [r, group] : groups) table.sigma[r] = BestThreshold(group);
  table.default_sigma = BestThreshold(scored);
  return table;
}

std::vector<ScoredLabel> ScoreLabeled(const ModelParams& params,
                                      std::span<const LabeledTriple> labeled, Norm norm) {
  std::vector<ScoredLabel> out;
  out.reserve(labeled.size());
  for (const LabeledTriple& l : labeled) {
    out.push_back({l.triple.relation, ScoreTriple(params, l.triple, norm), l.positive});
  }
  return out;
}

ThresholdTable FitThresholds(const ModelParams& params, std::span<const LabeledTriple> labeled,
                             Norm norm) {
  return FitThresholds(ScoreLabeled(params, labeled, norm));
}

TCMetrics Classify(std::span<const ScoredLabel> scored, const ThresholdTable& thresholds) {
  TCMetrics m;
  m.count = scored.size();
  if (scored.empty()) return m;
  std::size_t correct = 0;
  for (const ScoredLabel& s : scored) {
    correct += (s.score < thresholds.Sigma(s.relation)) == s.positive;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(scored.size());
  return m;
}

TCMetrics TripleClassification(const ModelParams& params, const ThresholdTable& thresholds,
                               std::span<const LabeledTriple> labeled, Norm norm) {
  return Classify(ScoreLabeled(params, labeled, norm), thresholds);
}

std::vector<MetricRow> MetricRows(const LPMetrics& m) {
  const std::string setting(SettingName(m.setting));
  std::vector<MetricRow> rows = {{"mr", setting, m.mr}, {"mrr", setting, m.mrr}};
  for (std::size_t i = 0; i < kHitsAt.size(); ++i) {
    rows.push_back({"hits@" + std::to_string(kHitsAt[i]), setting, m.hits[i]});
  }
  return rows;
}

void WriteMetricsCsv(std::ostream& out, std::span<const MetricRow> rows) {
  out << "metric,setting,value\n";
  for (const MetricRow& row : rows) {
    out << row.metric << ',' << row.setting << ',' << FormatDouble(row.value) << '\n';
  }
}

void WriteMetricsTable(std::ostream& out, std::span<const LPMetrics> lp, const TCMetrics* tc) {
  char line[128];
  if (!lp.empty()) {
    std::snprintf(line, sizeof(line), "%-10s", "metric");
    out << line;
    for (const LPMetrics& m : lp) {
      std::snprintf(line, sizeof(line), "%12s", std::string(SettingName(m.setting)).c_str());
      out << line;
    }
    out << '\n';
    auto row = [&](const char* name, auto get) {
      std::snprintf(line, sizeof(line), "%-10s", name);
      out << line;
      for (const LPMetrics& m : lp) {
        std::snprintf(line, sizeof(line), "%12.4f", get(m));
        out << line;
      }
      out << '\n';
    };
    row("MR", [](const LPMetrics& m) { return m.mr; });
    row("MRR", [](const LPMetrics& m) { return m.mrr; });
    for (std::size_t i = kHitsAt.size(); i-- > 0;) {
      const std::string name = "Hits@" + std::to_string(kHitsAt[i]);
      row(name.c_str(), [i](const LPMetrics& m) { return m.hits[i]; });
    }
  }
  if (tc != nullptr) {
    std::snprintf(line, sizeof(line), "%-10s%12.4f\n", "TC acc", tc->accuracy);
    out << line;
  }
}

void WriteRankDump(std::ostream& out, std::span<const RankResult> ranks, const Vocabulary& entities,
                   const Vocabulary& relations) {
  out << "head,relation,tail,raw_head,raw_tail,filtered_head,filtered_tail\n";
  for (const RankResult& r : ranks) {
    out << entities.Label(r.triple.head) << ',' << relations.Label(r.triple.relation) << ','
        << entities.Label(r.triple.tail) << ',' << r.head.raw << ',' << r.tail.raw << ','
        << r.head.filtered << ',' << r.tail.filtered << '\n';
  }
}

}  // namespace rulekg
