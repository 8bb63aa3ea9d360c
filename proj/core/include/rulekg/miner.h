#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rulekg/graph.h"
#include "rulekg/rules.h"

namespace rulekg {

// Which instances of a selected rule become ground rules.
enum class GroundingMode {
  // Every instance whose body holds in the graph.
  kAll,
  // Only instances whose consequent is missing from the graph, i.e. the ones
  // that carry information the triples do not already state.
  kNovel,
};

struct MinerConfig {
  // Confidence thresholds indexed by RuleType.
  std::array<double, 3> tau = {0.5, 0.6, 0.5};
  // Transitivity candidates below this support are dropped before scoring.
  std::int64_t min_transitivity_support = 2;
};

// Rule samples: triple combinations matching the shape of a rule type.
//  Inference: ordered pairs (h,r1,t),(h,r2,t) with r1 != r2.
//  Transitivity: chains (e1,r1,e2),(e2,r2,e3) closed by some (e1,r3,e3),
//    excluding e1 == e2 and e2 == e3.
//  Antisymmetry: unordered pairs (h,r1,t),(t,r2,h) with h != t, emitted once.
std::vector<GroundRule> ExtractSamples(const KnowledgeGraph& graph, RuleType type);
void ForEachSample(const KnowledgeGraph& graph, RuleType type,
                   const std::function<void(const GroundRule&)>& visit);

// Relation tuple of a sample, as an unscored candidate.
RuleCandidate CandidateOf(const GroundRule& sample);

// Counts samples per relation tuple; sorted by support descending, then by
// relation ids.
std::vector<RuleCandidate> AggregateCandidates(std::span<const GroundRule> samples);
// Same result as AggregateCandidates(ExtractSamples(graph, type)) without
// materializing the samples.
std::vector<RuleCandidate> CountCandidates(const KnowledgeGraph& graph, RuleType type);

// Keeps r1 => r2 only when the head concept of r2 is an ancestor-or-equal of
// the head concept of r1. Unknown concepts reject the candidate.
std::optional<RuleCandidate> OrientInference(const RuleCandidate& candidate,
                                             const ConceptHierarchy& hierarchy);

// Triples the candidate would generate from the graph, sorted and unique.
std::vector<Triple> GetNewTriples(const RuleCandidate& candidate, const KnowledgeGraph& graph);

// Sets confidence = |T ∩ K| / |T| with T = GetNewTriples (0 when T is empty).
void ScoreCandidates(std::span<RuleCandidate> candidates, const KnowledgeGraph& graph);

// Keeps scored candidates with confidence >= tau[type]. Sorted by type, then
// confidence descending, then relation ids.
std::vector<Rule> SelectRules(std::span<const RuleCandidate> candidates,
                              const std::array<double, 3>& tau);

std::vector<GroundRule> Ground(std::span<const Rule> rules, const KnowledgeGraph& graph,
                               GroundingMode mode = GroundingMode::kAll);

struct MiningReport {
  std::array<std::size_t, 3> candidates = {0, 0, 0};
  std::array<std::size_t, 3> selected = {0, 0, 0};
};

// Full pipeline: count candidates, orient inference candidates, drop
// low-support transitivity candidates, score and select.
std::vector<Rule> MineRules(const KnowledgeGraph& graph, const MinerConfig& config,
                            MiningReport* report = nullptr);

std::array<std::size_t, 3> CountByType(std::span<const Rule> rules);
std::array<std::size_t, 3> CountByType(std::span<const GroundRule> grounds);

}  // namespace rulekg
