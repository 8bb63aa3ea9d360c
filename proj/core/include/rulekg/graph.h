#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rulekg/types.h"
#include "rulekg/vocabulary.h"

namespace rulekg {

enum class Column { kHead, kRelation, kTail };

// Position i holds the role of the i-th tab-separated field.
using ColumnOrder = std::array<Column, 3>;

inline constexpr ColumnOrder kHeadRelationTail = {Column::kHead, Column::kRelation,
                                                  Column::kTail};

// Parses "hrt", "htr", "rht", ... into a column order.
ColumnOrder ParseColumnOrder(std::string_view spec);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Reads tab-separated triples, interning labels into the given vocabularies.
// Keeps file order and duplicates. Blank lines are skipped.
std::vector<Triple> ParseTriples(std::istream& in, const ColumnOrder& order,
                                 Vocabulary& entities, Vocabulary& relations);

class TripleSet {
 public:
  TripleSet() = default;
  explicit TripleSet(std::span<const Triple> triples) { Insert(triples); }

  bool Insert(const Triple& t) { return set_.insert(t).second; }
  void Insert(std::span<const Triple> triples) {
    for (const Triple& t : triples) set_.insert(t);
  }
  bool Contains(const Triple& t) const { return set_.contains(t); }
  std::size_t size() const { return set_.size(); }
  bool empty() const { return set_.empty(); }
  auto begin() const { return set_.begin(); }
  auto end() const { return set_.end(); }

 private:
  std::unordered_set<Triple, TripleHash> set_;
};

// Immutable triple store with the lookup indices used by mining, negative
// sampling and filtered ranking. Triples are stored deduplicated and sorted.
class KnowledgeGraph {
 public:
  KnowledgeGraph();
  KnowledgeGraph(std::span<const Triple> triples, std::shared_ptr<const Vocabulary> entities,
                 std::shared_ptr<const Vocabulary> relations);

  const std::vector<Triple>& triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  bool Contains(const Triple& t) const { return set_.Contains(t); }
  const TripleSet& triple_set() const { return set_; }

  // Sorted tails t with (h, r, t) in the graph.
  std::span<const EntityId> Tails(EntityId head, RelationId relation) const;
  // Sorted heads h with (h, r, t) in the graph.
  std::span<const EntityId> Heads(EntityId tail, RelationId relation) const;
  // Sorted (r, t) pairs leaving `head`.
  std::span<const std::pair<RelationId, EntityId>> Outgoing(EntityId head) const;
  // Sorted (h, t) pairs of `relation`.
  std::span<const std::pair<EntityId, EntityId>> Pairs(RelationId relation) const;
  // Sorted relations r with (h, r, t) in the graph.
  std::span<const RelationId> RelationsBetween(EntityId head, EntityId tail) const;

  std::int32_t num_entities() const { return entities_->size(); }
  std::int32_t num_relations() const { return relations_->size(); }
  const Vocabulary& entities() const { return *entities_; }
  const Vocabulary& relations() const { return *relations_; }
  std::shared_ptr<const Vocabulary> shared_entities() const { return entities_; }
  std::shared_ptr<const Vocabulary> shared_relations() const { return relations_; }

 private:
  std::shared_ptr<const Vocabulary> entities_;
  std::shared_ptr<const Vocabulary> relations_;
  std::vector<Triple> triples_;
  TripleSet set_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> by_head_rel_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> by_tail_rel_;
  std::unordered_map<std::uint64_t, std::vector<RelationId>> by_pair_;
  std::vector<std::vector<std::pair<RelationId, EntityId>>> by_head_;
  std::vector<std::vector<std::pair<EntityId, EntityId>>> by_relation_;
};

KnowledgeGraph BuildGraph(std::span<const Triple> triples,
                          std::shared_ptr<const Vocabulary> entities,
                          std::shared_ptr<const Vocabulary> relations);

inline bool Contains(const KnowledgeGraph& graph, const Triple& t) { return graph.Contains(t); }

struct DatasetSplits {
  KnowledgeGraph train;
  std::vector<Triple> valid;
  std::vector<Triple> test;
  TripleSet all_triples;
};

// Parses the three split files with shared interning, so entities that only
// occur in valid/test still receive ids.
DatasetSplits LoadSplits(std::istream& train, std::istream& valid, std::istream& test,
                         const ColumnOrder& order = kHeadRelationTail);
DatasetSplits LoadSplitFiles(const std::string& train_path, const std::string& valid_path,
                             const std::string& test_path,
                             const ColumnOrder& order = kHeadRelationTail);

// Keeps triples whose relation label starts with one of the prefixes and
// re-interns both vocabularies densely (train, then valid, then test order).
DatasetSplits FilterSubset(const DatasetSplits& splits,
                           std::span<const std::string> relation_prefixes);

}  // namespace rulekg
