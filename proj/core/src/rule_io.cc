#include "rulekg/rule_io.h"

#include <charconv>
#include <stdexcept>
#include <string_view>

namespace rulekg {
namespace {

std::vector<std::string_view> Split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::int32_t LookupOrThrow(const Vocabulary& vocab, std::string_view label, std::size_t line_no,
                           const char* what) {
  auto id = vocab.Find(label);
  if (!id) throw ParseError(line_no, std::string("unknown ") + what + " '" + std::string(label) + "'");
  return *id;
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, end);
}

double ParseDouble(std::string_view text) {
  double value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

void WriteRules(std::ostream& out, std::span<const Rule> rules, const Vocabulary& relations) {
  for (const Rule& rule : rules) {
    out << RuleTypeName(rule.type) << '\t' << FormatDouble(rule.confidence.value_or(0.0));
    for (RelationId r : rule.rels()) out << '\t' << relations.Label(r);
    out << '\n';
  }
}

std::vector<Rule> ReadRules(std::istream& in, const Vocabulary& relations,
                            const ConceptHierarchy& hierarchy) {
  std::vector<Rule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = Split(line, '\t');
    if (fields.size() < 4) throw ParseError(line_no, "rule line needs at least 4 fields");
    RuleType type;
    double confidence;
    try {
      type = ParseRuleType(fields[0]);
      confidence = ParseDouble(fields[1]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
    if (fields.size() != 2 + static_cast<std::size_t>(RuleArity(type))) {
      throw ParseError(line_no, "wrong relation count for " + std::string(fields[0]));
    }
    RelationId ids[3] = {0, 0, 0};
    for (int i = 0; i < RuleArity(type); ++i) {
      ids[i] = LookupOrThrow(relations, fields[2 + i], line_no, "relation");
    }
    Rule rule;
    switch (type) {
      case RuleType::kInference:
        if (ids[0] == ids[1]) throw ParseError(line_no, "inference rule repeats its relation");
        rule = RuleCandidate::Inference(ids[0], ids[1]);
        rule.concept_id = hierarchy.ConceptOf(ids[1]);
        break;
      case RuleType::kTransitivity: rule = RuleCandidate::Transitivity(ids[0], ids[1], ids[2]); break;
      case RuleType::kAntisymmetry: rule = RuleCandidate::Antisymmetry(ids[0], ids[1]); break;
    }
    rule.confidence = confidence;
    rules.push_back(rule);
  }
  return rules;
}

void WriteGroundRules(std::ostream& out, std::span<const GroundRule> grounds,
                      const Vocabulary& entities, const Vocabulary& relations,
                      const ConceptHierarchy& hierarchy) {
  for (const GroundRule& g : grounds) {
    out << RuleTypeName(g.type());
    for (const Triple& t : g.triples()) {
      out << '\t' << entities.Label(t.head) << ' ' << relations.Label(t.relation) << ' '
          << entities.Label(t.tail);
    }
    if (g.type() == RuleType::kInference && g.concept_id() != kUnknownConcept) {
      out << '\t' << hierarchy.ConceptName(g.concept_id());
    }
    out << '\n';
  }
}

std::vector<GroundRule> ReadGroundRules(std::istream& in, const Vocabulary& entities,
                                        const Vocabulary& relations,
                                        const ConceptHierarchy& hierarchy) {
  std::vector<GroundRule> grounds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = Split(line, '\t');
    RuleType type;
    try {
      type = ParseRuleType(fields[0]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
    const std::size_t arity = RuleArity(type);
    if (fields.size() != 1 + arity && !(type == RuleType::kInference && fields.size() == 2 + arity)) {
      throw ParseError(line_no, "wrong field count for " + std::string(fields[0]) + " grounding");
    }
    std::vector<Triple> triples;
    for (std::size_t i = 0; i < arity; ++i) {
      const auto parts = Split(fields[1 + i], ' ');
      if (parts.size() != 3) throw ParseError(line_no, "triple needs 'head relation tail'");
      triples.push_back({LookupOrThrow(entities, parts[0], line_no, "entity"),
                         LookupOrThrow(relations, parts[1], line_no, "relation"),
                         LookupOrThrow(entities, parts[2], line_no, "entity")});
    }
    ConceptId concept_id = kUnknownConcept;
    if (fields.size() == 2 + arity) {
      auto found = hierarchy.FindConcept(fields[1 + arity]);
      if (!found) throw ParseError(line_no, "unknown concept '" + std::string(fields[1 + arity]) + "'");
      concept_id = *found;
    }
    try {
      grounds.push_back(GroundRule::Make(type, triples, concept_id));
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return grounds;
}

}  // namespace rulekg
