#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rulekg/types.h"
#include "rulekg/vocabulary.h"

namespace rulekg {

enum class RuleType : std::uint8_t { kInference = 0, kTransitivity = 1, kAntisymmetry = 2 };

inline constexpr std::array<RuleType, 3> kAllRuleTypes = {
    RuleType::kInference, RuleType::kTransitivity, RuleType::kAntisymmetry};

std::string_view RuleTypeName(RuleType type);
RuleType ParseRuleType(std::string_view name);

// Number of relations (and of triples in a grounding) for a rule type.
constexpr int RuleArity(RuleType type) { return type == RuleType::kTransitivity ? 3 : 2; }

// Schema-level rule. Inference: relations[0] => relations[1].
// Transitivity: relations[0] + relations[1] => relations[2].
// Antisymmetry: relations[0] <=> relations[1], stored with relations[0] <= relations[1].
struct RuleCandidate {
  RuleType type = RuleType::kInference;
  std::array<RelationId, 3> relations = {0, 0, 0};
  std::int64_t support = 0;
  std::optional<double> confidence;
  // Head concept of relations[1], set on oriented inference candidates.
  ConceptId concept_id = kUnknownConcept;

  std::span<const RelationId> rels() const {
    return std::span<const RelationId>(relations.data(), RuleArity(type));
  }

  static RuleCandidate Inference(RelationId body, RelationId head);
  static RuleCandidate Transitivity(RelationId first, RelationId second, RelationId head);
  // Canonicalizes the unordered pair.
  static RuleCandidate Antisymmetry(RelationId a, RelationId b);
};

// A selected rule is a scored candidate.
using Rule = RuleCandidate;

// Orders by (type, relation ids).
bool RelationOrderLess(const RuleCandidate& a, const RuleCandidate& b);

// Instantiation of a rule over concrete entities. Constructed only through
// the checked factories, which enforce the structural invariant of each type.
class GroundRule {
 public:
  // (h, r1, t) => (h, r2, t)
  static GroundRule Inference(const Triple& body, const Triple& head,
                              ConceptId concept_id = kUnknownConcept);
  // (e1, r1, e2) + (e2, r2, e3) => (e1, r3, e3)
  static GroundRule Transitivity(const Triple& first, const Triple& second, const Triple& head);
  // (h, r1, t) <=> (t, r2, h)
  static GroundRule Antisymmetry(const Triple& forward, const Triple& backward);
  // Builds from parts, dispatching on `type` (used by readers and samplers).
  static GroundRule Make(RuleType type, std::span<const Triple> triples,
                         ConceptId concept_id = kUnknownConcept);

  RuleType type() const { return type_; }
  std::span<const Triple> triples() const {
    return std::span<const Triple>(triples_.data(), RuleArity(type_));
  }
  const Triple& triple(int i) const { return triples_[i]; }
  ConceptId concept_id() const { return concept_id_; }

  friend bool operator==(const GroundRule& a, const GroundRule& b) {
    return a.type_ == b.type_ && a.concept_id_ == b.concept_id_ &&
           std::equal(a.triples().begin(), a.triples().end(), b.triples().begin());
  }
  friend bool operator<(const GroundRule& a, const GroundRule& b);

 private:
  GroundRule() = default;
  RuleType type_ = RuleType::kInference;
  std::array<Triple, 3> triples_{};
  ConceptId concept_id_ = kUnknownConcept;
};

// Identity of a grounding used for duplicate and membership checks. The
// antisymmetry instance is undirected, so its two triples are sorted first.
struct GroundRuleKey {
  RuleType type;
  std::array<Triple, 3> triples;
  friend bool operator==(const GroundRuleKey&, const GroundRuleKey&) = default;
};
GroundRuleKey KeyOf(const GroundRule& rule);

struct GroundRuleKeyHash {
  std::size_t operator()(const GroundRuleKey& key) const noexcept;
};

// Relation-label hierarchy: "/domain/type/property" (or dotted
// "domain.type.property") gives the relation the head concept "type", and the
// edge domain -> type in the concept partial order. Single-segment labels map
// to kUnknownConcept.
class ConceptHierarchy {
 public:
  ConceptHierarchy() = default;
  explicit ConceptHierarchy(const Vocabulary& relations);

  ConceptId ConceptOf(RelationId relation) const;
  // Label segments of a relation, e.g. {"location", "country", "capital"}.
  const std::vector<std::string>& Segments(RelationId relation) const;
  bool IsAncestorOrEqual(ConceptId ancestor, ConceptId descendant) const;
  std::optional<ConceptId> FindConcept(std::string_view name) const;
  const std::string& ConceptName(ConceptId id) const { return concepts_.Label(id); }
  std::int32_t num_concepts() const { return concepts_.size(); }

 private:
  Vocabulary concepts_;
  std::vector<std::vector<std::string>> segments_;
  std::vector<ConceptId> relation_concept_;
  std::vector<std::vector<ConceptId>> parents_;
};

std::vector<std::string> SplitRelationLabel(std::string_view label);

}  // namespace rulekg
