#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rulekg/graph.h"
#include "rulekg/random.h"

namespace rulekg::bench {

// Random graph where every relation r has an inverse partner r ^ 1 for about
// 90% of its triples, so antisymmetry mining has work to do.
inline KnowledgeGraph InverseGraph(int entities, int relations, int triples,
                                   std::uint64_t seed = 7) {
  Rng rng(seed);
  auto ev = std::make_shared<Vocabulary>();
  auto rv = std::make_shared<Vocabulary>();
  for (int i = 0; i < entities; ++i) ev->Intern("e" + std::to_string(i));
  for (int i = 0; i < relations; ++i) rv->Intern("/d/c" + std::to_string(i % 3) + "/r" + std::to_string(i));
  std::vector<Triple> out;
  while (static_cast<int>(out.size()) < triples) {
    const auto h = static_cast<EntityId>(UniformIndex(rng, entities));
    const auto t = static_cast<EntityId>(UniformIndex(rng, entities));
    const auto r = static_cast<RelationId>(UniformIndex(rng, relations));
    if (h == t) continue;
    out.push_back({h, r, t});
    if (UniformUnit(rng) < 0.9 && (r ^ 1) < relations) out.push_back({t, r ^ 1, h});
  }
  return BuildGraph(out, ev, rv);
}

}  // namespace rulekg::bench
