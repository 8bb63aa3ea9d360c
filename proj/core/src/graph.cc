#include "rulekg/graph.h"

#include <algorithm>
#include <fstream>

namespace rulekg {
namespace {

template <typename Map, typename V = typename Map::mapped_type::value_type>
std::span<const V> Lookup(const Map& map, std::uint64_t key) {
  auto it = map.find(key);
  if (it == map.end()) return {};
  return it->second;
}

std::ifstream OpenOrThrow(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

ColumnOrder ParseColumnOrder(std::string_view spec) {
  if (spec.size() != 3) throw std::invalid_argument("column order must have 3 letters");
  ColumnOrder order{};
  bool seen[3] = {false, false, false};
  for (std::size_t i = 0; i < 3; ++i) {
    int role;
    switch (spec[i]) {
      case 'h': role = 0; break;
      case 'r': role = 1; break;
      case 't': role = 2; break;
      default: throw std::invalid_argument("column order letters must be h, r, t");
    }
    if (seen[role]) throw std::invalid_argument("column order repeats a letter");
    seen[role] = true;
    order[i] = static_cast<Column>(role);
  }
  return order;
}

std::vector<Triple> ParseTriples(std::istream& in, const ColumnOrder& order,
                                 Vocabulary& entities, Vocabulary& relations) {
  std::vector<Triple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view fields[3];
    std::size_t count = 0, start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      const std::string_view field =
          std::string_view(line).substr(start, tab == std::string::npos ? line.npos : tab - start);
      if (count < 3) fields[count] = field;
      ++count;
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (count != 3) {
      throw ParseError(line_no, "expected 3 tab-separated fields, got " + std::to_string(count));
    }
    Triple t;
    for (std::size_t i = 0; i < 3; ++i) {
      switch (order[i]) {
        case Column::kHead: t.head = entities.Intern(fields[i]); break;
        case Column::kRelation: t.relation = relations.Intern(fields[i]); break;
        case Column::kTail: t.tail = entities.Intern(fields[i]); break;
      }
    }
    out.push_back(t);
  }
  return out;
}

KnowledgeGraph::KnowledgeGraph()
    : entities_(std::make_shared<Vocabulary>()), relations_(std::make_shared<Vocabulary>()) {}

KnowledgeGraph::KnowledgeGraph(std::span<const Triple> triples,
                               std::shared_ptr<const Vocabulary> entities,
                               std::shared_ptr<const Vocabulary> relations)
    : entities_(std::move(entities)), relations_(std::move(relations)) {
  triples_.assign(triples.begin(), triples.end());
  std::sort(triples_.begin(), triples_.end());
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());

  for (const Triple& t : triples_) {
    if (t.head < 0 || t.head >= entities_->size() || t.tail < 0 ||
        t.tail >= entities_->size() || t.relation < 0 || t.relation >= relations_->size()) {
      throw std::out_of_range("triple id outside vocabulary");
    }
  }

  set_.Insert(triples_);
  by_head_.resize(entities_->size());
  by_relation_.resize(relations_->size());
  // triples_ is sorted by (h, r, t), so per-key vectors come out sorted except
  // for the tail-keyed and pair-keyed indices, which are sorted below.
  for (const Triple& t : triples_) {
    by_head_rel_[PairKey(t.head, t.relation)].push_back(t.tail);
    by_tail_rel_[PairKey(t.tail, t.relation)].push_back(t.head);
    by_pair_[PairKey(t.head, t.tail)].push_back(t.relation);
    by_head_[t.head].emplace_back(t.relation, t.tail);
    by_relation_[t.relation].emplace_back(t.head, t.tail);
  }
  for (auto& [key, heads] : by_tail_rel_) std::sort(heads.begin(), heads.end());
  for (auto& [key, rels] : by_pair_) std::sort(rels.begin(), rels.end());
  for (auto& pairs : by_relation_) std::sort(pairs.begin(), pairs.end());
}

std::span<const EntityId> KnowledgeGraph::Tails(EntityId head, RelationId relation) const {
  return Lookup(by_head_rel_, PairKey(head, relation));
}

std::span<const EntityId> KnowledgeGraph::Heads(EntityId tail, RelationId relation) const {
  return Lookup(by_tail_rel_, PairKey(tail, relation));
}

std::span<const std::pair<RelationId, EntityId>> KnowledgeGraph::Outgoing(EntityId head) const {
  if (head < 0 || static_cast<std::size_t>(head) >= by_head_.size()) return {};
  return by_head_[head];
}

std::span<const std::pair<EntityId, EntityId>> KnowledgeGraph::Pairs(RelationId relation) const {
  if (relation < 0 || static_cast<std::size_t>(relation) >= by_relation_.size()) return {};
  return by_relation_[relation];
}

std::span<const RelationId> KnowledgeGraph::RelationsBetween(EntityId head, EntityId tail) const {
  return Lookup(by_pair_, PairKey(head, tail));
}

KnowledgeGraph BuildGraph(std::span<const Triple> triples,
                          std::shared_ptr<const Vocabulary> entities,
                          std::shared_ptr<const Vocabulary> relations) {
  return KnowledgeGraph(triples, std::move(entities), std::move(relations));
}

DatasetSplits LoadSplits(std::istream& train, std::istream& valid, std::istream& test,
                         const ColumnOrder& order) {
  auto entities = std::make_shared<Vocabulary>();
  auto relations = std::make_shared<Vocabulary>();
  std::vector<Triple> train_triples = ParseTriples(train, order, *entities, *relations);
  DatasetSplits splits;
  splits.valid = ParseTriples(valid, order, *entities, *relations);
  splits.test = ParseTriples(test, order, *entities, *relations);
  splits.train = BuildGraph(train_triples, entities, relations);
  splits.all_triples.Insert(splits.train.triples());
  splits.all_triples.Insert(splits.valid);
  splits.all_triples.Insert(splits.test);
  return splits;
}

DatasetSplits LoadSplitFiles(const std::string& train_path, const std::string& valid_path,
                             const std::string& test_path, const ColumnOrder& order) {
  std::ifstream train = OpenOrThrow(train_path);
  std::ifstream valid = OpenOrThrow(valid_path);
  std::ifstream test = OpenOrThrow(test_path);
  return LoadSplits(train, valid, test, order);
}

DatasetSplits FilterSubset(const DatasetSplits& splits,
                           std::span<const std::string> relation_prefixes) {
  if (relation_prefixes.empty()) throw std::invalid_argument("no relation prefixes given");
  const Vocabulary& old_relations = splits.train.relations();
  std::vector<bool> keep(old_relations.size(), false);
  for (RelationId r = 0; r < old_relations.size(); ++r) {
    const std::string& label = old_relations.Label(r);
    for (const std::string& prefix : relation_prefixes) {
      if (label.starts_with(prefix)) {
        keep[r] = true;
        break;
      }
    }
  }

  auto entities = std::make_shared<Vocabulary>();
  auto relations = std::make_shared<Vocabulary>();
  const Vocabulary& old_entities = splits.train.entities();
  auto remap = [&](std::span<const Triple> in) {
    std::vector<Triple> out;
    for (const Triple& t : in) {
      if (!keep[t.relation]) continue;
      Triple n;
      n.head = entities->Intern(old_entities.Label(t.head));
      n.relation = relations->Intern(old_relations.Label(t.relation));
      n.tail = entities->Intern(old_entities.Label(t.tail));
      out.push_back(n);
    }
    return out;
  };

  std::vector<Triple> train = remap(splits.train.triples());
  DatasetSplits out;
  out.valid = remap(splits.valid);
  out.test = remap(splits.test);
  out.train = BuildGraph(train, entities, relations);
  out.all_triples.Insert(out.train.triples());
  out.all_triples.Insert(out.valid);
  out.all_triples.Insert(out.test);
  return out;
}

}  // namespace rulekg
