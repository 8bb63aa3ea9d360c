#include "rulekg/model.h"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rulekg/random.h"
#include "rulekg/rule_io.h"

namespace rulekg {
namespace {

void Identity(std::span<double> m, int d) {
  std::fill(m.begin(), m.end(), 0.0);
  for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i) * d + i] = 1.0;
}

void ScaleToUnitBall(std::span<double> v) {
  double sq = 0;
  for (double x : v) sq += x * x;
  if (sq > 1.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
  }
}

void Normalize(std::span<double> v) {
  double sq = 0;
  for (double x : v) sq += x * x;
  if (sq > 0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
  }
}

void WriteRow(std::ostream& out, std::string_view tag, const std::string& label,
              std::span<const double> values) {
  out << tag << '\t' << label << '\t';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    out << FormatDouble(values[i]);
  }
  out << '\n';
}

class RowReader {
 public:
  explicit RowReader(std::istream& in) : in_(in) {}

  // Reads the next row, checks its tag and label, fills `values`.
  void Read(std::string_view tag, const std::string& label, std::span<double> values) {
    std::string line;
    ++line_no_;
    if (!std::getline(in_, line)) throw ParseError(line_no_, "checkpoint truncated");
    const std::size_t a = line.find('\t');
    const std::size_t b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos) throw ParseError(line_no_, "malformed checkpoint row");
    if (std::string_view(line).substr(0, a) != tag) {
      throw ParseError(line_no_, "expected " + std::string(tag) + " row");
    }
    if (line.compare(a + 1, b - a - 1, label) != 0) {
      throw ParseError(line_no_, "label mismatch, expected '" + label + "'");
    }
    ReadValues(std::string_view(line).substr(b + 1), values);
  }

  std::string ReadLine() {
    std::string line;
    ++line_no_;
    if (!std::getline(in_, line)) throw ParseError(line_no_, "checkpoint truncated");
    return line;
  }

  void ReadValues(std::string_view text, std::span<double> values) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::size_t end = std::min(text.find(' ', pos), text.size());
      if (pos >= text.size()) throw ParseError(line_no_, "too few values");
      try {
        values[i] = ParseDouble(text.substr(pos, end - pos));
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no_, e.what());
      }
      pos = end + 1;
    }
    if (pos <= text.size()) throw ParseError(line_no_, "too many values");
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kTransE: return "transe";
    case ModelKind::kTransH: return "transh";
    case ModelKind::kTransR: return "transr";
  }
  return "unknown";
}

ModelKind ParseModelKind(std::string_view name) {
  if (name == "transe") return ModelKind::kTransE;
  if (name == "transh") return ModelKind::kTransH;
  if (name == "transr") return ModelKind::kTransR;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::string_view NormName(Norm norm) { return norm == Norm::kL1 ? "l1" : "l2"; }

Norm ParseNorm(std::string_view name) {
  if (name == "l1") return Norm::kL1;
  if (name == "l2") return Norm::kL2;
  throw std::invalid_argument("unknown norm '" + std::string(name) + "'");
}

ModelParams::ModelParams(ModelKind kind, int dim, std::int32_t num_entities,
                         std::int32_t num_relations)
    : kind_(kind), dim_(dim), num_entities_(num_entities), num_relations_(num_relations) {
  if (dim < 1) throw std::invalid_argument("embedding dimension must be at least 1");
  if (num_entities < 0 || num_relations < 0) throw std::invalid_argument("negative vocabulary size");
  const auto d = static_cast<std::size_t>(dim);
  entities_.assign(static_cast<std::size_t>(num_entities) * d, 0.0);
  relations_.assign(static_cast<std::size_t>(num_relations) * d, 0.0);
  if (kind == ModelKind::kTransH) normals_.assign(static_cast<std::size_t>(num_relations) * d, 0.0);
  if (kind == ModelKind::kTransR) {
    matrices_.assign(static_cast<std::size_t>(num_relations) * d * d, 0.0);
    for (RelationId r = 0; r < num_relations; ++r) Identity(matrix(r), dim);
  }
}

std::span<const double> ModelParams::concept_matrix(ConceptId c) const {
  auto it = concepts_.find(c);
  if (it == concepts_.end()) return {};
  return it->second;
}

std::span<double> ModelParams::EnsureConcept(ConceptId c) {
  if (c == kUnknownConcept) throw std::invalid_argument("cannot allocate the unknown concept");
  auto [it, inserted] = concepts_.try_emplace(c);
  if (inserted) {
    it->second.resize(static_cast<std::size_t>(dim_) * dim_);
    Identity(it->second, dim_);
  }
  return it->second;
}

ModelParams InitParams(std::int32_t num_entities, std::int32_t num_relations, int dim,
                       ModelKind kind, std::uint64_t seed) {
  ModelParams params(kind, dim, num_entities, num_relations);
  Rng rng(seed);
  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  for (EntityId e = 0; e < num_entities; ++e) {
    for (double& x : params.entity(e)) x = UniformReal(rng, -bound, bound);
    ScaleToUnitBall(params.entity(e));
  }
  for (RelationId r = 0; r < num_relations; ++r) {
    for (double& x : params.relation(r)) x = UniformReal(rng, -bound, bound);
    ScaleToUnitBall(params.relation(r));
  }
  if (params.has_normals()) {
    for (RelationId r = 0; r < num_relations; ++r) {
      for (double& x : params.normal(r)) x = UniformReal(rng, -bound, bound);
      Normalize(params.normal(r));
    }
  }
  return params;
}

ModelParams InitParams(const KnowledgeGraph& graph, int dim, ModelKind kind, std::uint64_t seed) {
  return InitParams(graph.num_entities(), graph.num_relations(), dim, kind, seed);
}

void SaveParams(std::ostream& out, const ModelParams& params, const Vocabulary& entities,
                const Vocabulary& relations, const ConceptHierarchy& hierarchy) {
  if (entities.size() != params.num_entities() || relations.size() != params.num_relations()) {
    throw std::invalid_argument("vocabulary does not match parameter tables");
  }
  out << ModelKindName(params.kind()) << ' ' << params.dim() << ' ' << params.num_entities()
      << ' ' << params.num_relations() << ' ' << params.concepts().size() << '\n';
  for (EntityId e = 0; e < params.num_entities(); ++e) {
    WriteRow(out, "entity", entities.Label(e), params.entity(e));
  }
  for (RelationId r = 0; r < params.num_relations(); ++r) {
    WriteRow(out, "relation", relations.Label(r), params.relation(r));
  }
  if (params.has_normals()) {
    for (RelationId r = 0; r < params.num_relations(); ++r) {
      WriteRow(out, "normal", relations.Label(r), params.normal(r));
    }
  }
  if (params.has_matrices()) {
    for (RelationId r = 0; r < params.num_relations(); ++r) {
      WriteRow(out, "matrix", relations.Label(r), params.matrix(r));
    }
  }
  for (const auto& [c, m] : params.concepts()) {
    WriteRow(out, "concept", hierarchy.ConceptName(c), m);
  }
}

ModelParams LoadParams(std::istream& in, const Vocabulary& entities, const Vocabulary& relations,
                       const ConceptHierarchy& hierarchy) {
  RowReader reader(in);
  std::istringstream header(reader.ReadLine());
  std::string kind_name;
  long dim = 0, num_entities = 0, num_relations = 0, num_concepts = 0;
  if (!(header >> kind_name >> dim >> num_entities >> num_relations >> num_concepts)) {
    throw ParseError(1, "malformed checkpoint header");
  }
  if (num_entities != entities.size() || num_relations != relations.size()) {
    throw std::runtime_error("checkpoint has " + std::to_string(num_entities) + " entities and " +
                             std::to_string(num_relations) + " relations, dataset has " +
                             std::to_string(entities.size()) + " and " +
                             std::to_string(relations.size()));
  }
  ModelParams params(ParseModelKind(kind_name), static_cast<int>(dim),
                     static_cast<std::int32_t>(num_entities),
                     static_cast<std::int32_t>(num_relations));
  for (EntityId e = 0; e < params.num_entities(); ++e) {
    reader.Read("entity", entities.Label(e), params.entity(e));
  }
  for (RelationId r = 0; r < params.num_relations(); ++r) {
    reader.Read("relation", relations.Label(r), params.relation(r));
  }
  if (params.has_normals()) {
    for (RelationId r = 0; r < params.num_relations(); ++r) {
      reader.Read("normal", relations.Label(r), params.normal(r));
    }
  }
  if (params.has_matrices()) {
    for (RelationId r = 0; r < params.num_relations(); ++r) {
      reader.Read("matrix", relations.Label(r), params.matrix(r));
    }
  }
  for (long i = 0; i < num_concepts; ++i) {
    const std::string line = reader.ReadLine();
    const std::size_t a = line.find('\t');
    const std::size_t b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos || line.compare(0, a, "concept") != 0) {
      throw ParseError(reader.line_no(), "expected concept row");
    }
    auto c = hierarchy.FindConcept(std::string_view(line).substr(a + 1, b - a - 1));
    if (!c) throw ParseError(reader.line_no(), "unknown concept in checkpoint");
    reader.ReadValues(std::string_view(line).substr(b + 1), params.EnsureConcept(*c));
  }
  return params;
}

}  // namespace rulekg
