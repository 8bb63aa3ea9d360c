#include "rulekg/rules.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rulekg {

std::string_view RuleTypeName(RuleType type) {
  switch (type) {
    case RuleType::kInference: return "inference";
    case RuleType::kTransitivity: return "transitivity";
    case RuleType::kAntisymmetry: return "antisymmetry";
  }
  return "unknown";
}

RuleType ParseRuleType(std::string_view name) {
  for (RuleType type : kAllRuleTypes) {
    if (RuleTypeName(type) == name) return type;
  }
  throw std::invalid_argument("unknown rule type '" + std::string(name) + "'");
}

RuleCandidate RuleCandidate::Inference(RelationId body, RelationId head) {
  if (body == head) throw std::invalid_argument("inference rule needs two distinct relations");
  RuleCandidate c;
  c.type = RuleType::kInference;
  c.relations = {body, head, 0};
  return c;
}

RuleCandidate RuleCandidate::Transitivity(RelationId first, RelationId second, RelationId head) {
  RuleCandidate c;
  c.type = RuleType::kTransitivity;
  c.relations = {first, second, head};
  return c;
}

RuleCandidate RuleCandidate::Antisymmetry(RelationId a, RelationId b) {
  RuleCandidate c;
  c.type = RuleType::kAntisymmetry;
  c.relations = {std::min(a, b), std::max(a, b), 0};
  return c;
}

bool RelationOrderLess(const RuleCandidate& a, const RuleCandidate& b) {
  if (a.type != b.type) return a.type < b.type;
  return std::lexicographical_compare(a.rels().begin(), a.rels().end(), b.rels().begin(),
                                      b.rels().end());
}

GroundRule GroundRule::Inference(const Triple& body, const Triple& head, ConceptId concept_id) {
  if (body.head != head.head || body.tail != head.tail) {
    throw std::invalid_argument("inference grounding must share head and tail");
  }
  if (body.relation == head.relation) {
    throw std::invalid_argument("inference grounding needs two distinct relations");
  }
  GroundRule g;
  g.type_ = RuleType::kInference;
  g.triples_ = {body, head, Triple{}};
  g.concept_id_ = concept_id;
  return g;
}

GroundRule GroundRule::Transitivity(const Triple& first, const Triple& second,
                                    const Triple& head) {
  if (first.tail != second.head || first.head != head.head || second.tail != head.tail) {
    throw std::invalid_argument("transitivity grounding must form a closed chain");
  }
  GroundRule g;
  g.type_ = RuleType::kTransitivity;
  g.triples_ = {first, second, head};
  return g;
}

GroundRule GroundRule::Antisymmetry(const Triple& forward, const Triple& backward) {
  if (forward.head != backward.tail || forward.tail != backward.head) {
    throw std::invalid_argument("antisymmetry grounding must reverse head and tail");
  }
  GroundRule g;
  g.type_ = RuleType::kAntisymmetry;
  g.triples_ = {forward, backward, Triple{}};
  return g;
}

GroundRule GroundRule::Make(RuleType type, std::span<const Triple> triples,
                            ConceptId concept_id) {
  if (triples.size() != static_cast<std::size_t>(RuleArity(type))) {
    throw std::invalid_argument("wrong number of triples for " +
                                std::string(RuleTypeName(type)) + " grounding");
  }
  switch (type) {
    case RuleType::kInference: return Inference(triples[0], triples[1], concept_id);
    case RuleType::kTransitivity: return Transitivity(triples[0], triples[1], triples[2]);
    case RuleType::kAntisymmetry: return Antisymmetry(triples[0], triples[1]);
  }
  throw std::invalid_argument("unknown rule type");
}

bool operator<(const GroundRule& a, const GroundRule& b) {
  if (a.type_ != b.type_) return a.type_ < b.type_;
  if (a.triples_ != b.triples_) return a.triples_ < b.triples_;
  return a.concept_id_ < b.concept_id_;
}

GroundRuleKey KeyOf(const GroundRule& rule) {
  GroundRuleKey key{rule.type(), {}};
  auto ts = rule.triples();
  std::copy(ts.begin(), ts.end(), key.triples.begin());
  if (rule.type() == RuleType::kAntisymmetry && key.triples[1] < key.triples[0]) {
    std::swap(key.triples[0], key.triples[1]);
  }
  return key;
}

std::size_t GroundRuleKeyHash::operator()(const GroundRuleKey& key) const noexcept {
  TripleHash h;
  std::size_t seed = static_cast<std::size_t>(key.type) + 0x9e3779b97f4a7c15ULL;
  for (int i = 0; i < RuleArity(key.type); ++i) {
    seed = static_cast<std::size_t>(Mix64(seed ^ h(key.triples[i])));
  }
  return seed;
}

std::vector<std::string> SplitRelationLabel(std::string_view label) {
  const char sep = label.find('/') != std::string_view::npos ? '/' : '.';
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= label.size()) {
    std::size_t end = label.find(sep, start);
    if (end == std::string_view::npos) end = label.size();
    if (end > start) parts.emplace_back(label.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

ConceptHierarchy::ConceptHierarchy(const Vocabulary& relations) {
  segments_.reserve(relations.size());
  relation_concept_.assign(relations.size(), kUnknownConcept);
  for (RelationId r = 0; r < relations.size(); ++r) {
    segments_.push_back(SplitRelationLabel(relations.Label(r)));
    const auto& seg = segments_.back();
    if (seg.size() < 2) continue;
    if (seg.size() == 2) {
      relation_concept_[r] = concepts_.Intern(seg[0]);
      continue;
    }
    const ConceptId domain = concepts_.Intern(seg[0]);
    const ConceptId type = concepts_.Intern(seg[1]);
    relation_concept_[r] = type;
    if (parents_.size() < static_cast<std::size_t>(concepts_.size())) {
      parents_.resize(concepts_.size());
    }
    if (domain != type) {
      auto& p = parents_[type];
      if (std::find(p.begin(), p.end(), domain) == p.end()) p.push_back(domain);
    }
  }
  parents_.resize(concepts_.size());
}

ConceptId ConceptHierarchy::ConceptOf(RelationId relation) const {
  if (relation < 0 || static_cast<std::size_t>(relation) >= relation_concept_.size()) {
    return kUnknownConcept;
  }
  return relation_concept_[relation];
}

const std::vector<std::string>& ConceptHierarchy::Segments(RelationId relation) const {
  return segments_.at(relation);
}

bool ConceptHierarchy::IsAncestorOrEqual(ConceptId ancestor, ConceptId descendant) const {
  if (ancestor == kUnknownConcept || descendant == kUnknownConcept) return false;
  if (ancestor == descendant) return true;
  std::vector<bool> seen(parents_.size(), false);
  std::vector<ConceptId> stack = {descendant};
  while (!stack.empty()) {
    const ConceptId c = stack.back();
    stack.pop_back();
    for (ConceptId p : parents_[c]) {
      if (p == ancestor) return true;
      if (!seen[p]) {
        seen[p] = true;
        stack.push_back(p);
      }
    }
  }
  return false;
}

std::optional<ConceptId> ConceptHierarchy::FindConcept(std::string_view name) const {
  return concepts_.Find(name);
}

}  // namespace rulekg
