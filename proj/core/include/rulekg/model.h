#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "rulekg/graph.h"
#include "rulekg/rules.h"
#include "rulekg/types.h"

namespace rulekg {

enum class ModelKind { kTransE, kTransH, kTransR };
enum class Norm { kL1, kL2 };

std::string_view ModelKindName(ModelKind kind);
ModelKind ParseModelKind(std::string_view name);
std::string_view NormName(Norm norm);
Norm ParseNorm(std::string_view name);

// All learnable parameters, stored as dense row-major tables.
//   entity vectors      |E| x d
//   relation vectors    |R| x d
//   hyperplane normals  |R| x d      (TransH)
//   relation matrices   |R| x d x d  (TransR), entity row vector times matrix
//   concept matrices    d x d per concept id, allocated on demand
class ModelParams {
 private:
  static std::span<double> Row(std::vector<double>& table, std::int32_t i, int width) {
    return std::span<double>(table.data() + static_cast<std::size_t>(i) * width, width);
  }
  static std::span<const double> Row(const std::vector<double>& table, std::int32_t i, int width) {
    return std::span<const double>(table.data() + static_cast<std::size_t>(i) * width, width);
  }

 public:
  ModelParams(ModelKind kind, int dim, std::int32_t num_entities, std::int32_t num_relations);

  ModelKind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::int32_t num_entities() const { return num_entities_; }
  std::int32_t num_relations() const { return num_relations_; }
  bool has_normals() const { return kind_ == ModelKind::kTransH; }
  bool has_matrices() const { return kind_ == ModelKind::kTransR; }

  std::span<double> entity(EntityId e) { return Row(entities_, e, dim_); }
  std::span<const double> entity(EntityId e) const { return Row(entities_, e, dim_); }
  std::span<double> relation(RelationId r) { return Row(relations_, r, dim_); }
  std::span<const double> relation(RelationId r) const { return Row(relations_, r, dim_); }
  std::span<double> normal(RelationId r) { return Row(normals_, r, dim_); }
  std::span<const double> normal(RelationId r) const { return Row(normals_, r, dim_); }
  std::span<double> matrix(RelationId r) { return Row(matrices_, r, dim_ * dim_); }
  std::span<const double> matrix(RelationId r) const { return Row(matrices_, r, dim_ * dim_); }

  // Empty span when the concept matrix has not been allocated; scoring then
  // uses the identity.
  std::span<const double> concept_matrix(ConceptId c) const;
  // Allocates an identity matrix on first use.
  std::span<double> EnsureConcept(ConceptId c);
  const std::map<ConceptId, std::vector<double>>& concepts() const { return concepts_; }

  std::vector<double>& entity_table() { return entities_; }
  const std::vector<double>& entity_table() const { return entities_; }
  std::vector<double>& relation_table() { return relations_; }
  const std::vector<double>& relation_table() const { return relations_; }
  std::vector<double>& normal_table() { return normals_; }
  const std::vector<double>& normal_table() const { return normals_; }
  std::vector<double>& matrix_table() { return matrices_; }
  const std::vector<double>& matrix_table() const { return matrices_; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  ModelKind kind_;
  int dim_;
  std::int32_t num_entities_;
  std::int32_t num_relations_;
  std::vector<double> entities_;
  std::vector<double> relations_;
  std::vector<double> normals_;
  std::vector<double> matrices_;
  std::map<ConceptId, std::vector<double>> concepts_;
};

// Entity and relation vectors uniform in [-6/sqrt(d), 6/sqrt(d)] per
// coordinate, then scaled to L2 norm <= 1; normals unit length; matrices
// identity. Deterministic in `seed`.
ModelParams InitParams(std::int32_t num_entities, std::int32_t num_relations, int dim,
                       ModelKind kind, std::uint64_t seed);
ModelParams InitParams(const KnowledgeGraph& graph, int dim, ModelKind kind, std::uint64_t seed);

// Text checkpoint. Header "kind d |E| |R| n_concepts", then one labeled row
// per entity, relation, normal, relation matrix and concept matrix:
//   entity<TAB>label<TAB>v1 v2 ... vd
// Values use the shortest round-trip decimal form.
void SaveParams(std::ostream& out, const ModelParams& params, const Vocabulary& entities,
                const Vocabulary& relations, const ConceptHierarchy& hierarchy);
// Checks labels and sizes against the vocabularies.
ModelParams LoadParams(std::istream& in, const Vocabulary& entities, const Vocabulary& relations,
                       const ConceptHierarchy& hierarchy);

}  // namespace rulekg
