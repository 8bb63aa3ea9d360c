#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "rulekg/model.h"
#include "rulekg/rules.h"
#include "rulekg/types.h"

namespace rulekg {

// Gate selector: exactly one score family is active per sample.
enum class SampleKind : std::uint8_t { kTriple, kInference, kTransitivity, kAntisymmetry };

SampleKind KindOf(RuleType type);

struct TrainingSample {
  std::variant<Triple, GroundRule> payload;

  TrainingSample(const Triple& t) : payload(t) {}
  TrainingSample(const GroundRule& g) : payload(g) {}

  SampleKind kind() const {
    if (const auto* g = std::get_if<GroundRule>(&payload)) return KindOf(g->type());
    return SampleKind::kTriple;
  }
  bool is_triple() const { return std::holds_alternative<Triple>(payload); }
  const Triple& triple() const { return std::get<Triple>(payload); }
  const GroundRule& rule() const { return std::get<GroundRule>(payload); }

  friend bool operator==(const TrainingSample&, const TrainingSample&) = default;
};

// pi_r(e): e for TransE, e - (w_r.e) w_r for TransH, e M_r for TransR.
std::vector<double> ProjectEntity(const ModelParams& params, EntityId e, RelationId r);
// Same, into `out` of width d.
void ProjectEntityInto(const ModelParams& params, EntityId e, RelationId r, std::span<double> out);
// (pi_r(h) + r) - pi_r(t), in that evaluation order.
std::vector<double> Residual(const ModelParams& params, const Triple& triple);

double NormOf(std::span<const double> v, Norm norm);

// s1 = |R(h,r,t)|
double ScoreTriple(const ModelParams& params, const Triple& triple, Norm norm);
// s2 = |(h C) * R(h,r1,t) - R(h,r2,t)|, C the concept matrix (identity when
// unallocated or unknown).
double ScoreInference(const ModelParams& params, const GroundRule& rule, Norm norm);
// s3 = |R(e1,r1,e2) * R(e2,r2,e3) - R(e1,r3,e3)|
double ScoreTransitivity(const ModelParams& params, const GroundRule& rule, Norm norm);
// s4 = |a * a| with a = R(h,r1,t) - R(t,r2,h)
double ScoreAntisymmetry(const ModelParams& params, const GroundRule& rule, Norm norm);
double ScoreRule(const ModelParams& params, const GroundRule& rule, Norm norm);
double Score(const ModelParams& params, const TrainingSample& sample, Norm norm);

enum class Block : std::uint8_t { kEntity, kRelation, kNormal, kMatrix, kConcept };

// Gradient over the parameter rows a sample touches. The same row may appear
// in several entries; entries add up.
class SparseGradient {
 public:
  struct Entry {
    Block block;
    std::int32_t id;
    std::uint32_t offset;
    std::uint32_t width;
  };

  void Clear() {
    entries_.clear();
    values_.clear();
  }
  bool empty() const { return entries_.empty(); }

  // Appends a zeroed row for (block, id) and returns it for accumulation.
  std::span<double> Add(Block block, std::int32_t id, std::uint32_t width);

  const std::vector<Entry>& entries() const { return entries_; }
  std::span<const double> values(const Entry& e) const {
    return std::span<const double>(values_.data() + e.offset, e.width);
  }

  // params -= step * gradient. Concept matrices are allocated on demand.
  void ApplyTo(ModelParams& params, double step) const;

 private:
  std::vector<Entry> entries_;
  std::vector<double> values_;
};

// Adds scale * d s(sample) / d params into `grad` and returns s(sample).
double AccumulateScoreGradient(const ModelParams& params, const TrainingSample& sample, Norm norm,
                               double scale, SparseGradient& grad);

// Value of [margin + s(pos) - s(neg)]_+. When positive, its gradient is
// appended to `grad`. Throws std::invalid_argument when the kinds differ.
double HingeGradient(const ModelParams& params, const TrainingSample& positive,
                     const TrainingSample& negative, double margin, Norm norm,
                     SparseGradient& grad);

}  // namespace rulekg
