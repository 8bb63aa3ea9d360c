#include "rulekg/scoring.h"

#include <cmath>
#include <stdexcept>

namespace rulekg {
namespace {

// Per-thread scratch of `count` vectors of width d.
double* Scratch(std::size_t count, int d) {
  thread_local std::vector<double> buffer;
  const std::size_t need = count * static_cast<std::size_t>(d);
  if (buffer.size() < need) buffer.resize(need);
  return buffer.data();
}

double Dot(const double* a, const double* b, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

void ProjectRaw(const ModelParams& p, EntityId e, RelationId r, double* out) {
  const int d = p.dim();
  const double* x = p.entity(e).data();
  switch (p.kind()) {
    case ModelKind::kTransE:
      for (int i = 0; i < d; ++i) out[i] = x[i];
      break;
    case ModelKind::kTransH: {
      const double* w = p.normal(r).data();
      const double wx = Dot(w, x, d);
      for (int i = 0; i < d; ++i) out[i] = x[i] - wx * w[i];
      break;
    }
    case ModelKind::kTransR: {
      const double* m = p.matrix(r).data();
      for (int j = 0; j < d; ++j) out[j] = 0;
      for (int i = 0; i < d; ++i) {
        const double* row = m + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) out[j] += x[i] * row[j];
      }
      break;
    }
  }
}

// Evaluated as (pi(h) + r) - pi(t); the ranker repeats this exact order.
void ComputeResidual(const ModelParams& p, const Triple& tr, double* out) {
  const int d = p.dim();
  const double* r = p.relation(tr.relation).data();
  if (p.kind() == ModelKind::kTransE) {
    const double* h = p.entity(tr.head).data();
    const double* t = p.entity(tr.tail).data();
    for (int i = 0; i < d; ++i) out[i] = (h[i] + r[i]) - t[i];
    return;
  }
  thread_local std::vector<double> pt;
  pt.resize(static_cast<std::size_t>(d));
  ProjectRaw(p, tr.head, tr.relation, out);
  ProjectRaw(p, tr.tail, tr.relation, pt.data());
  for (int i = 0; i < d; ++i) out[i] = (out[i] + r[i]) - pt[i];
}

// Adds scale * dR/dparams^T g for the residual of `tr`.
void BackpropResidual(const ModelParams& p, const Triple& tr, const double* g, double scale,
                      SparseGradient& grad) {
  const int d = p.dim();
  const auto w = static_cast<std::uint32_t>(d);
  thread_local std::vector<double> dh;
  dh.resize(w);
  const double* h = p.entity(tr.head).data();
  const double* t = p.entity(tr.tail).data();
  switch (p.kind()) {
    case ModelKind::kTransE:
      for (int i = 0; i < d; ++i) dh[i] = scale * g[i];
      break;
    case ModelKind::kTransH: {
      const double* n = p.normal(tr.relation).data();
      const double ng = Dot(n, g, d);
      const double nu = Dot(n, h, d) - Dot(n, t, d);
      for (int i = 0; i < d; ++i) dh[i] = scale * (g[i] - ng * n[i]);
      auto gn = grad.Add(Block::kNormal, tr.relation, w);
      for (int i = 0; i < d; ++i) gn[i] = -scale * (ng * (h[i] - t[i]) + nu * g[i]);
      break;
    }
    case ModelKind::kTransR: {
      const double* m = p.matrix(tr.relation).data();
      for (int i = 0; i < d; ++i) dh[i] = scale * Dot(m + static_cast<std::size_t>(i) * d, g, d);
      auto gm = grad.Add(Block::kMatrix, tr.relation, w * w);
      for (int i = 0; i < d; ++i) {
        const double u = scale * (h[i] - t[i]);
        if (u == 0) continue;
        double* row = gm.data() + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) row[j] = u * g[j];
      }
      break;
    }
  }
  auto gr = grad.Add(Block::kRelation, tr.relation, w);
  for (int i = 0; i < d; ++i) gr[i] = scale * g[i];
  auto gh = grad.Add(Block::kEntity, tr.head, w);
  for (int i = 0; i < d; ++i) gh[i] = dh[i];
  auto gt = grad.Add(Block::kEntity, tr.tail, w);
  for (int i = 0; i < d; ++i) gt[i] = -dh[i];
}

double NormValue(const double* v, int d, Norm norm) {
  double s = 0;
  if (norm == Norm::kL1) {
    for (int i = 0; i < d; ++i) s += std::abs(v[i]);
    return s;
  }
  for (int i = 0; i < d; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

// Subgradient of the norm at v; sign(0) = 0, and 0 at v = 0 for L2.
void NormGradient(const double* v, int d, Norm norm, double* out) {
  if (norm == Norm::kL1) {
    for (int i = 0; i < d; ++i) out[i] = (v[i] > 0) - (v[i] < 0);
    return;
  }
  const double n = NormValue(v, d, Norm::kL2);
  for (int i = 0; i < d; ++i) out[i] = n > 0 ? v[i] / n : 0.0;
}

// u = h C (row vector times matrix); u = h when C is empty.
void ConceptProduct(std::span<const double> c, const double* h, int d, double* u) {
  if (c.empty()) {
    for (int i = 0; i < d; ++i) u[i] = h[i];
    return;
  }
  for (int j = 0; j < d; ++j) u[j] = 0;
  for (int i = 0; i < d; ++i) {
    const double* row = c.data() + static_cast<std::size_t>(i) * d;
    for (int j = 0; j < d; ++j) u[j] += h[i] * row[j];
  }
}

std::span<const double> ConceptOf(const ModelParams& p, const GroundRule& rule) {
  if (rule.concept_id() == kUnknownConcept) return {};
  return p.concept_matrix(rule.concept_id());
}

// Fills v (width d) with the vector whose norm is the score. Uses slots
// [1, 4) of `buf` for intermediates.
void ScoreVector(const ModelParams& p, const TrainingSample& sample, double* buf, double* v) {
  const int d = p.dim();
  double* a = buf + d;
  double* b = buf + 2 * d;
  double* c = buf + 3 * d;
  if (sample.is_triple()) {
    ComputeResidual(p, sample.triple(), v);
    return;
  }
  const GroundRule& rule = sample.rule();
  switch (rule.type()) {
    case RuleType::kInference: {
      ComputeResidual(p, rule.triple(0), a);
      ComputeResidual(p, rule.triple(1), b);
      ConceptProduct(ConceptOf(p, rule), p.entity(rule.triple(0).head).data(), d, c);
      for (int i = 0; i < d; ++i) v[i] = c[i] * a[i] - b[i];
      break;
    }
    case RuleType::kTransitivity: {
      ComputeResidual(p, rule.triple(0), a);
      ComputeResidual(p, rule.triple(1), b);
      ComputeResidual(p, rule.triple(2), c);
      for (int i = 0; i < d; ++i) v[i] = a[i] * b[i] - c[i];
      break;
    }
    case RuleType::kAntisymmetry: {
      ComputeResidual(p, rule.triple(0), a);
      ComputeResidual(p, rule.triple(1), b);
      for (int i = 0; i < d; ++i) {
        const double x = a[i] - b[i];
        v[i] = x * x;
      }
      break;
    }
  }
}

}  // namespace

SampleKind KindOf(RuleType type) {
  switch (type) {
    case RuleType::kInference: return SampleKind::kInference;
    case RuleType::kTransitivity: return SampleKind::kTransitivity;
    case RuleType::kAntisymmetry: return SampleKind::kAntisymmetry;
  }
  return SampleKind::kTriple;
}

std::vector<double> ProjectEntity(const ModelParams& params, EntityId e, RelationId r) {
  std::vector<double> out(static_cast<std::size_t>(params.dim()));
  ProjectRaw(params, e, r, out.data());
  return out;
}

void ProjectEntityInto(const ModelParams& params, EntityId e, RelationId r, std::span<double> out) {
  ProjectRaw(params, e, r, out.data());
}

std::vector<double> Residual(const ModelParams& params, const Triple& triple) {
  std::vector<double> out(static_cast<std::size_t>(params.dim()));
  ComputeResidual(params, triple, out.data());
  return out;
}

double NormOf(std::span<const double> v, Norm norm) {
  return NormValue(v.data(), static_cast<int>(v.size()), norm);
}

double Score(const ModelParams& params, const TrainingSample& sample, Norm norm) {
  const int d = params.dim();
  double* buf = Scratch(4, d);
  ScoreVector(params, sample, buf, buf);
  return NormValue(buf, d, norm);
}

double ScoreTriple(const ModelParams& params, const Triple& triple, Norm norm) {
  const int d = params.dim();
  double* buf = Scratch(1, d);
  ComputeResidual(params, triple, buf);
  return NormValue(buf, d, norm);
}

namespace {
double ScoreTyped(const ModelParams& params, const GroundRule& rule, Norm norm, RuleType type) {
  if (rule.type() != type) throw std::invalid_argument("ground rule has the wrong type");
  return Score(params, TrainingSample(rule), norm);
}
}  // namespace

double ScoreInference(const ModelParams& params, const GroundRule& rule, Norm norm) {
  return ScoreTyped(params, rule, norm, RuleType::kInference);
}
double ScoreTransitivity(const ModelParams& params, const GroundRule& rule, Norm norm) {
  return ScoreTyped(params, rule, norm, RuleType::kTransitivity);
}
double ScoreAntisymmetry(const ModelParams& params, const GroundRule& rule, Norm norm) {
  return ScoreTyped(params, rule, norm, RuleType::kAntisymmetry);
}
double ScoreRule(const ModelParams& params, const GroundRule& rule, Norm norm) {
  return Score(params, TrainingSample(rule), norm);
}

std::span<double> SparseGradient::Add(Block block, std::int32_t id, std::uint32_t width) {
  const auto offset = static_cast<std::uint32_t>(values_.size());
  values_.resize(values_.size() + width, 0.0);
  entries_.push_back({block, id, offset, width});
  return std::span<double>(values_.data() + offset, width);
}

void SparseGradient::ApplyTo(ModelParams& params, double step) const {
  for (const Entry& e : entries_) {
    std::span<double> target;
    switch (e.block) {
      case Block::kEntity: target = params.entity(e.id); break;
      case Block::kRelation: target = params.relation(e.id); break;
      case Block::kNormal: target = params.normal(e.id); break;
      case Block::kMatrix: target = params.matrix(e.id); break;
      case Block::kConcept: target = params.EnsureConcept(e.id); break;
    }
    const double* g = values_.data() + e.offset;
    for (std::uint32_t i = 0; i < e.width; ++i) target[i] -= step * g[i];
  }
}

double AccumulateScoreGradient(const ModelParams& params, const TrainingSample& sample, Norm norm,
                               double scale, SparseGradient& grad) {
  const int d = params.dim();
  // Slots: 0 v, 1-3 intermediates, 4 dv, 5-7 upstream grads per residual.
  double* buf = Scratch(8, d);
  double* v = buf;
  double* a = buf + d;
  double* b = buf + 2 * d;
  double* c = buf + 3 * d;
  double* gv = buf + 4 * d;
  double* g0 = buf + 5 * d;
  double* g1 = buf + 6 * d;
  double* g2 = buf + 7 * d;
  ScoreVector(params, sample, buf, v);
  const double value = NormValue(v, d, norm);
  NormGradient(v, d, norm, gv);

  if (sample.is_triple()) {
    BackpropResidual(params, sample.triple(), gv, scale, grad);
    return value;
  }
  const GroundRule& rule = sample.rule();
  switch (rule.type()) {
    case RuleType::kInference: {
      // v = u * A - B, u = h C.
      for (int i = 0; i < d; ++i) {
        g0[i] = gv[i] * c[i];
        g1[i] = -gv[i];
        g2[i] = gv[i] * a[i];
      }
      const EntityId head = rule.triple(0).head;
      const auto cm = ConceptOf(params, rule);
      auto gh = grad.Add(Block::kEntity, head, static_cast<std::uint32_t>(d));
      if (cm.empty()) {
        for (int i = 0; i < d; ++i) gh[i] = scale * g2[i];
      } else {
        for (int i = 0; i < d; ++i) {
          gh[i] = scale * Dot(cm.data() + static_cast<std::size_t>(i) * d, g2, d);
        }
        const double* h = params.entity(head).data();
        auto gc = grad.Add(Block::kConcept, rule.concept_id(), static_cast<std::uint32_t>(d * d));
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) gc[static_cast<std::size_t>(i) * d + j] = scale * h[i] * g2[j];
        }
      }
      BackpropResidual(params, rule.triple(0), g0, scale, grad);
      BackpropResidual(params, rule.triple(1), g1, scale, grad);
      break;
    }
    case RuleType::kTransitivity: {
      for (int i = 0; i < d; ++i) {
        g0[i] = gv[i] * b[i];
        g1[i] = gv[i] * a[i];
        g2[i] = -gv[i];
      }
      BackpropResidual(params, rule.triple(0), g0, scale, grad);
      BackpropResidual(params, rule.triple(1), g1, scale, grad);
      BackpropResidual(params, rule.triple(2), g2, scale, grad);
      break;
    }
    case RuleType::kAntisymmetry: {
      for (int i = 0; i < d; ++i) {
        g0[i] = 2.0 * (a[i] - b[i]) * gv[i];
        g1[i] = -g0[i];
      }
      BackpropResidual(params, rule.triple(0), g0, scale, grad);
      BackpropResidual(params, rule.triple(1), g1, scale, grad);
      break;
    }
  }
  return value;
}

double HingeGradient(const ModelParams& params, const TrainingSample& positive,
                     const TrainingSample& negative, double margin, Norm norm,
                     SparseGradient& grad) {
  if (positive.kind() != negative.kind()) {
    throw std::invalid_argument("positive and negative samples differ in kind");
  }
  const double loss = margin + Score(params, positive, norm) - Score(params, negative, norm);
  if (loss <= 0) return 0.0;
  AccumulateScoreGradient(params, positive, norm, 1.0, grad);
  AccumulateScoreGradient(params, negative, norm, -1.0, grad);
  return loss;
}

}  // namespace rulekg
