#pragma once

#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "rulekg/graph.h"
#include "rulekg/model.h"

namespace rulekg::testing {

using LabeledTriples = std::vector<std::tuple<std::string, std::string, std::string>>;

// Builds a graph from labeled triples; labels are interned in order.
inline KnowledgeGraph GraphOf(const LabeledTriples& rows,
                              std::shared_ptr<Vocabulary> entities = nullptr,
                              std::shared_ptr<Vocabulary> relations = nullptr) {
  if (!entities) entities = std::make_shared<Vocabulary>();
  if (!relations) relations = std::make_shared<Vocabulary>();
  std::vector<Triple> triples;
  for (const auto& [h, r, t] : rows) {
    const EntityId hid = entities->Intern(h);
    const RelationId rid = relations->Intern(r);
    triples.push_back({hid, rid, entities->Intern(t)});
  }
  return BuildGraph(triples, entities, relations);
}

inline std::string Tsv(const LabeledTriples& rows) {
  std::string out;
  for (const auto& [h, r, t] : rows) out += h + "\t" + r + "\t" + t + "\n";
  return out;
}

// Random graph with `n` entities named e0.., `m` relations named r0.. and up
// to `max_triples` triples.
inline KnowledgeGraph RandomGraph(std::mt19937_64& rng, int n, int m, int max_triples) {
  auto entities = std::make_shared<Vocabulary>();
  auto relations = std::make_shared<Vocabulary>();
  for (int i = 0; i < n; ++i) entities->Intern("e" + std::to_string(i));
  for (int i = 0; i < m; ++i) relations->Intern("r" + std::to_string(i));
  std::uniform_int_distribution<int> count(0, max_triples);
  std::uniform_int_distribution<int> ent(0, n - 1);
  std::uniform_int_distribution<int> rel(0, m - 1);
  std::vector<Triple> triples;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) triples.push_back({ent(rng), rel(rng), ent(rng)});
  return BuildGraph(triples, entities, relations);
}

// Parameters with every entry uniform in [-1, 1]; matrices near identity.
inline ModelParams RandomParams(std::mt19937_64& rng, ModelKind kind, int dim, int n, int m) {
  ModelParams p(kind, dim, n, m);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& x : p.entity_table()) x = u(rng);
  for (double& x : p.relation_table()) x = u(rng);
  for (double& x : p.normal_table()) x = u(rng);
  for (double& x : p.matrix_table()) x = 0.3 * u(rng);
  if (p.has_matrices()) {
    for (RelationId r = 0; r < m; ++r) {
      for (int i = 0; i < dim; ++i) p.matrix(r)[static_cast<std::size_t>(i) * dim + i] += 1.0;
    }
  }
  return p;
}

}  // namespace rulekg::testing
