#include "rulekg/miner.h"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace rulekg {
namespace {

constexpr int kRelationBits = 21;

std::uint64_t PackRelations(const RuleCandidate& c) {
  std::uint64_t key = static_cast<std::uint64_t>(c.type);
  for (RelationId r : c.rels()) {
    key = (key << kRelationBits) | static_cast<std::uint64_t>(r);
  }
  return key;
}

bool SupportOrder(const RuleCandidate& a, const RuleCandidate& b) {
  if (a.support != b.support) return a.support > b.support;
  return RelationOrderLess(a, b);
}

void CheckRelationRange(const KnowledgeGraph& graph) {
  if (graph.num_relations() >= (1 << kRelationBits)) {
    throw std::length_error("too many relations for candidate packing");
  }
}

std::vector<RuleCandidate> SortedCandidates(
    const std::unordered_map<std::uint64_t, RuleCandidate>& counts) {
  std::vector<RuleCandidate> out;
  out.reserve(counts.size());
  for (const auto& [key, candidate] : counts) out.push_back(candidate);
  std::sort(out.begin(), out.end(), SupportOrder);
  return out;
}

// Distinct (e1, e3) endpoints of r1/r2 chains, sorted.
std::vector<std::uint64_t> ChainEndpoints(RelationId r1, RelationId r2,
                                          const KnowledgeGraph& graph) {
  std::vector<std::uint64_t> ends;
  for (const auto& [e1, e2] : graph.Pairs(r1)) {
    for (EntityId e3 : graph.Tails(e2, r2)) ends.push_back(PairKey(e1, e3));
  }
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
  return ends;
}

EntityId KeyFirst(std::uint64_t key) { return static_cast<EntityId>(key >> 32); }
EntityId KeySecond(std::uint64_t key) { return static_cast<EntityId>(key & 0xffffffffULL); }

}  // namespace

void ForEachSample(const KnowledgeGraph& graph, RuleType type,
                   const std::function<void(const GroundRule&)>& visit) {
  switch (type) {
    case RuleType::kInference: {
      const auto& triples = graph.triples();
      // Triples are sorted by head, so equal-(h,t) groups are found through the
      // pair index once per (h, t).
      for (const Triple& t : triples) {
        auto rels = graph.RelationsBetween(t.head, t.tail);
        if (rels.size() < 2 || rels.front() != t.relation) continue;
        for (RelationId r1 : rels) {
          for (RelationId r2 : rels) {
            if (r1 == r2) continue;
            visit(GroundRule::Inference({t.head, r1, t.tail}, {t.head, r2, t.tail}));
          }
        }
      }
      break;
    }
    case RuleType::kTransitivity: {
      for (const Triple& first : graph.triples()) {
        if (first.head == first.tail) continue;
        for (const auto& [r2, e3] : graph.Outgoing(first.tail)) {
          if (e3 == first.tail) continue;
          const Triple second{first.tail, r2, e3};
          for (RelationId r3 : graph.RelationsBetween(first.head, e3)) {
            visit(GroundRule::Transitivity(first, second, {first.head, r3, e3}));
          }
        }
      }
      break;
    }
    case RuleType::kAntisymmetry: {
      for (const Triple& a : graph.triples()) {
        if (a.head == a.tail) continue;
        for (RelationId r2 : graph.RelationsBetween(a.tail, a.head)) {
          const Triple b{a.tail, r2, a.head};
          if (a < b) visit(GroundRule::Antisymmetry(a, b));
        }
      }
      break;
    }
  }
}

std::vector<GroundRule> ExtractSamples(const KnowledgeGraph& graph, RuleType type) {
  std::vector<GroundRule> samples;
  ForEachSample(graph, type, [&](const GroundRule& g) { samples.push_back(g); });
  return samples;
}

RuleCandidate CandidateOf(const GroundRule& sample) {
  const auto ts = sample.triples();
  switch (sample.type()) {
    case RuleType::kInference: return RuleCandidate::Inference(ts[0].relation, ts[1].relation);
    case RuleType::kTransitivity:
      return RuleCandidate::Transitivity(ts[0].relation, ts[1].relation, ts[2].relation);
    case RuleType::kAntisymmetry:
      return RuleCandidate::Antisymmetry(ts[0].relation, ts[1].relation);
  }
  throw std::invalid_argument("unknown rule type");
}

std::vector<RuleCandidate> AggregateCandidates(std::span<const GroundRule> samples) {
  std::unordered_map<std::uint64_t, RuleCandidate> counts;
  for (const GroundRule& s : samples) {
    RuleCandidate c = CandidateOf(s);
    auto [it, inserted] = counts.try_emplace(PackRelations(c), c);
    ++it->second.support;
  }
  return SortedCandidates(counts);
}

std::vector<RuleCandidate> CountCandidates(const KnowledgeGraph& graph, RuleType type) {
  CheckRelationRange(graph);
  std::unordered_map<std::uint64_t, RuleCandidate> counts;
  ForEachSample(graph, type, [&](const GroundRule& s) {
    RuleCandidate c = CandidateOf(s);
    auto [it, inserted] = counts.try_emplace(PackRelations(c), c);
    ++it->second.support;
  });
  return SortedCandidates(counts);
}

std::optional<RuleCandidate> OrientInference(const RuleCandidate& candidate,
                                             const ConceptHierarchy& hierarchy) {
  if (candidate.type != RuleType::kInference) {
    throw std::invalid_argument("OrientInference expects an inference candidate");
  }
  const ConceptId body = hierarchy.ConceptOf(candidate.relations[0]);
  const ConceptId head = hierarchy.ConceptOf(candidate.relations[1]);
  if (!hierarchy.IsAncestorOrEqual(head, body)) return std::nullopt;
  RuleCandidate oriented = candidate;
  oriented.concept_id = head;
  return oriented;
}

std::vector<Triple> GetNewTriples(const RuleCandidate& candidate, const KnowledgeGraph& graph) {
  std::vector<Triple> out;
  const auto& rel = candidate.relations;
  switch (candidate.type) {
    case RuleType::kInference:
      for (const auto& [h, t] : graph.Pairs(rel[0])) out.push_back({h, rel[1], t});
      break;
    case RuleType::kTransitivity:
      for (std::uint64_t key : ChainEndpoints(rel[0], rel[1], graph)) {
        out.push_back({KeyFirst(key), rel[2], KeySecond(key)});
      }
      break;
    case RuleType::kAntisymmetry:
      for (const auto& [h, t] : graph.Pairs(rel[0])) out.push_back({t, rel[1], h});
      for (const auto& [h, t] : graph.Pairs(rel[1])) out.push_back({t, rel[0], h});
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void ScoreCandidates(std::span<RuleCandidate> candidates, const KnowledgeGraph& graph) {
  // Transitivity candidates sharing a body share their chain endpoints.
  std::map<std::pair<RelationId, RelationId>, std::vector<std::size_t>> chains;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    RuleCandidate& c = candidates[i];
    if (c.type == RuleType::kTransitivity) {
      chains[{c.relations[0], c.relations[1]}].push_back(i);
      continue;
    }
    std::size_t generated = 0, present = 0;
    for (const Triple& t : GetNewTriples(c, graph)) {
      ++generated;
      if (graph.Contains(t)) ++present;
    }
    c.confidence = generated == 0 ? 0.0 : static_cast<double>(present) / generated;
  }
  for (const auto& [body, indices] : chains) {
    const std::vector<std::uint64_t> ends = ChainEndpoints(body.first, body.second, graph);
    for (std::size_t i : indices) {
      RuleCandidate& c = candidates[i];
      std::size_t present = 0;
      for (std::uint64_t key : ends) {
        if (graph.Contains({KeyFirst(key), c.relations[2], KeySecond(key)})) ++present;
      }
      c.confidence = ends.empty() ? 0.0 : static_cast<double>(present) / ends.size();
    }
  }
}

std::vector<Rule> SelectRules(std::span<const RuleCandidate> candidates,
                              const std::array<double, 3>& tau) {
  std::vector<Rule> out;
  for (const RuleCandidate& c : candidates) {
    if (!c.confidence) throw std::invalid_argument("SelectRules needs scored candidates");
    if (*c.confidence >= tau[static_cast<int>(c.type)]) out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const Rule& a, const Rule& b) {
    if (a.type != b.type) return a.type < b.type;
    if (*a.confidence != *b.confidence) return *a.confidence > *b.confidence;
    return RelationOrderLess(a, b);
  });
  return out;
}

std::vector<GroundRule> Ground(std::span<const Rule> rules, const KnowledgeGraph& graph,
                               GroundingMode mode) {
  std::vector<GroundRule> out;
  const bool novel_only = mode == GroundingMode::kNovel;
  for (const Rule& rule : rules) {
    const auto& rel = rule.relations;
    switch (rule.type) {
      case RuleType::kInference:
        for (const auto& [h, t] : graph.Pairs(rel[0])) {
          const Triple head{h, rel[1], t};
          if (novel_only && graph.Contains(head)) continue;
          out.push_back(GroundRule::Inference({h, rel[0], t}, head, rule.concept_id));
        }
        break;
      case RuleType::kTransitivity:
        for (const auto& [e1, e2] : graph.Pairs(rel[0])) {
          for (EntityId e3 : graph.Tails(e2, rel[1])) {
            const Triple head{e1, rel[2], e3};
            if (novel_only && graph.Contains(head)) continue;
            out.push_back(GroundRule::Transitivity({e1, rel[0], e2}, {e2, rel[1], e3}, head));
          }
        }
        break;
      case RuleType::kAntisymmetry: {
        // Self-loops carry no antisymmetry evidence and are skipped, as in mining.
        std::unordered_set<GroundRuleKey, GroundRuleKeyHash> seen;
        auto emit = [&](RelationId from, RelationId to) {
          for (const auto& [h, t] : graph.Pairs(from)) {
            if (h == t) continue;
            const Triple backward{t, to, h};
            if (novel_only && graph.Contains(backward)) continue;
            GroundRule g = GroundRule::Antisymmetry({h, from, t}, backward);
            if (seen.insert(KeyOf(g)).second) out.push_back(g);
          }
        };
        emit(rel[0], rel[1]);
        if (rel[1] != rel[0]) emit(rel[1], rel[0]);
        break;
      }
    }
  }
  return out;
}

std::vector<Rule> MineRules(const KnowledgeGraph& graph, const MinerConfig& config,
                            MiningReport* report) {
  const ConceptHierarchy hierarchy(graph.relations());
  std::vector<RuleCandidate> candidates;
  MiningReport local;
  for (RuleType type : kAllRuleTypes) {
    std::vector<RuleCandidate> counted = CountCandidates(graph, type);
    for (RuleCandidate& c : counted) {
      if (type == RuleType::kInference) {
        if (auto oriented = OrientInference(c, hierarchy)) candidates.push_back(*oriented);
      } else if (type == RuleType::kTransitivity) {
        if (c.support >= config.min_transitivity_support) candidates.push_back(c);
      } else {
        candidates.push_back(c);
      }
    }
  }
  for (const RuleCandidate& c : candidates) ++local.candidates[static_cast<int>(c.type)];
  ScoreCandidates(candidates, graph);
  std::vector<Rule> rules = SelectRules(candidates, config.tau);
  local.selected = CountByType(rules);
  if (report) *report = local;
  return rules;
}

std::array<std::size_t, 3> CountByType(std::span<const Rule> rules) {
  std::array<std::size_t, 3> counts = {0, 0, 0};
  for (const Rule& r : rules) ++counts[static_cast<int>(r.type)];
  return counts;
}

std::array<std::size_t, 3> CountByType(std::span<const GroundRule> grounds) {
  std::array<std::size_t, 3> counts = {0, 0, 0};
  for (const GroundRule& g : grounds) ++counts[static_cast<int>(g.type())];
  return counts;
}

}  // namespace rulekg
