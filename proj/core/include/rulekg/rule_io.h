#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rulekg/graph.h"
#include "rulekg/rules.h"

namespace rulekg {

// Rule file: one rule per line,
//   type<TAB>confidence<TAB>r1<TAB>r2[<TAB>r3]
// with relation labels and type in {inference, transitivity, antisymmetry}.
void WriteRules(std::ostream& out, std::span<const Rule> rules, const Vocabulary& relations);
// Inference rules get the head concept of r2 from `hierarchy`.
std::vector<Rule> ReadRules(std::istream& in, const Vocabulary& relations,
                            const ConceptHierarchy& hierarchy);

// Ground-rule file: one grounding per line,
//   type<TAB>h1 r1 t1<TAB>h2 r2 t2[<TAB>h3 r3 t3][<TAB>concept]
// The concept column is present on inference groundings with a known concept.
void WriteGroundRules(std::ostream& out, std::span<const GroundRule> grounds,
                      const Vocabulary& entities, const Vocabulary& relations,
                      const ConceptHierarchy& hierarchy);
std::vector<GroundRule> ReadGroundRules(std::istream& in, const Vocabulary& entities,
                                        const Vocabulary& relations,
                                        const ConceptHierarchy& hierarchy);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);
double ParseDouble(std::string_view text);

}  // namespace rulekg
