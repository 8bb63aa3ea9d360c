#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.h"
#include "rulekg/model.h"

namespace rulekg {
namespace {

double L2(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST(InitParams, DeterministicInSeed) {
  for (ModelKind kind : {ModelKind::kTransE, ModelKind::kTransH, ModelKind::kTransR}) {
    EXPECT_EQ(InitParams(30, 4, 8, kind, 9), InitParams(30, 4, 8, kind, 9));
    EXPECT_NE(InitParams(30, 4, 8, kind, 9), InitParams(30, 4, 8, kind, 10));
  }
}

TEST(InitParams, TransEHasNoNormalsOrMatrices) {
  const ModelParams p = InitParams(5, 2, 3, ModelKind::kTransE, 1);
  EXPECT_TRUE(p.normal_table().empty());
  EXPECT_TRUE(p.matrix_table().empty());
  EXPECT_TRUE(p.concepts().empty());
}

TEST(InitParams, ConstraintsHold) {
  for (int d : {1, 2, 50}) {
    const ModelParams h = InitParams(40, 5, d, ModelKind::kTransH, 3);
    const double bound = 6.0 / std::sqrt(static_cast<double>(d));
    for (EntityId e = 0; e < 40; ++e) {
      EXPECT_LE(L2(h.entity(e)), 1.0 + 1e-12);
      for (double x : h.entity(e)) EXPECT_LE(std::abs(x), bound);
    }
    for (RelationId r = 0; r < 5; ++r) {
      EXPECT_LE(L2(h.relation(r)), 1.0 + 1e-12);
      EXPECT_NEAR(L2(h.normal(r)), 1.0, 1e-12);
    }
    const ModelParams m = InitParams(3, 2, d, ModelKind::kTransR, 3);
    for (RelationId r = 0; r < 2; ++r) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) EXPECT_EQ(m.matrix(r)[i * d + j], i == j ? 1.0 : 0.0);
      }
    }
  }
}

TEST(ModelParams, RejectsZeroDimension) {
  EXPECT_THROW(ModelParams(ModelKind::kTransE, 0, 3, 1), std::invalid_argument);
  EXPECT_THROW(InitParams(3, 1, 0, ModelKind::kTransE, 1), std::invalid_argument);
}

TEST(ModelParams, ConceptMatricesStartAsIdentity) {
  ModelParams p(ModelKind::kTransE, 3, 1, 1);
  EXPECT_TRUE(p.concept_matrix(0).empty());
  auto c = p.EnsureConcept(0);
  EXPECT_EQ(std::vector<double>(c.begin(), c.end()),
            (std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 1}));
  c[1] = 5;
  EXPECT_EQ(p.EnsureConcept(0)[1], 5);
  EXPECT_THROW(p.EnsureConcept(kUnknownConcept), std::invalid_argument);
}

TEST(ModelKindNames, RoundTrip) {
  for (ModelKind kind : {ModelKind::kTransE, ModelKind::kTransH, ModelKind::kTransR}) {
    EXPECT_EQ(ParseModelKind(ModelKindName(kind)), kind);
  }
  EXPECT_EQ(ParseNorm("l2"), Norm::kL2);
  EXPECT_THROW(ParseModelKind("distmult"), std::invalid_argument);
  EXPECT_THROW(ParseNorm("l3"), std::invalid_argument);
}

struct Checkpoint {
  KnowledgeGraph graph = testing::GraphOf({{"a", "/x/y/p", "b"}, {"b", "/x/x/q", "c"}});
  ConceptHierarchy hierarchy{graph.relations()};

  std::string Save(const ModelParams& p) const {
    std::ostringstream out;
    SaveParams(out, p, graph.entities(), graph.relations(), hierarchy);
    return out.str();
  }
  ModelParams Load(const std::string& text) const {
    std::istringstream in(text);
    return LoadParams(in, graph.entities(), graph.relations(), hierarchy);
  }
};

TEST(Checkpoint, RoundTripIsExact) {
  Checkpoint c;
  std::mt19937_64 rng(4);
  for (ModelKind kind : {ModelKind::kTransE, ModelKind::kTransH, ModelKind::kTransR}) {
    ModelParams p = testing::RandomParams(rng, kind, 5, 3, 2);
    auto m = p.EnsureConcept(*c.hierarchy.FindConcept("x"));
    m[3] = 0.1 + 1e-17;
    const std::string text = c.Save(p);
    EXPECT_EQ(text.substr(0, text.find('\n')),
              std::string(ModelKindName(kind)) + " 5 3 2 1");
    EXPECT_EQ(c.Load(text), p);
    EXPECT_EQ(c.Save(c.Load(text)), text);
  }
}

TEST(Checkpoint, Mismatches) {
  Checkpoint c;
  std::mt19937_64 rng(4);
  const std::string text = c.Save(testing::RandomParams(rng, ModelKind::kTransE, 2, 3, 2));
  // Entity count differs from the vocabulary.
  const KnowledgeGraph bigger = testing::GraphOf({{"a", "/x/y/p", "b"}, {"b", "/x/x/q", "d"},
                                                  {"c", "/x/y/p", "b"}});
  std::istringstream in(text);
  EXPECT_THROW(LoadParams(in, bigger.entities(), bigger.relations(), c.hierarchy),
               std::runtime_error);

  std::string relabeled = text;
  relabeled.replace(relabeled.find("entity\tb"), 8, "entity\tz");
  EXPECT_THROW(c.Load(relabeled), ParseError);
  EXPECT_THROW(c.Load(text.substr(0, text.size() / 2)), ParseError);
  EXPECT_THROW(c.Load("transe 2 3 2 0\n"), ParseError);
  EXPECT_THROW(c.Load("garbage\n"), ParseError);
}

}  // namespace
}  // namespace rulekg
