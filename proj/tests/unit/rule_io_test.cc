#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fixtures.h"
#include "mining_oracle.h"
#include "rulekg/miner.h"
#include "rulekg/rule_io.h"

namespace rulekg {
namespace {

TEST(FormatDouble, RoundTrips) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    EXPECT_EQ(ParseDouble(FormatDouble(x)), x);
  }
  EXPECT_EQ(FormatDouble(0.5), "0.5");
  EXPECT_EQ(ParseDouble(FormatDouble(std::numeric_limits<double>::denorm_min())),
            std::numeric_limits<double>::denorm_min());
  EXPECT_THROW(ParseDouble("0.5x"), std::invalid_argument);
  EXPECT_THROW(ParseDouble(""), std::invalid_argument);
}

TEST(RuleFile, Format) {
  Vocabulary rel;
  rel.Intern("_hypernym");
  rel.Intern("_hyponym");
  Rule rule = RuleCandidate::Antisymmetry(1, 0);
  rule.confidence = 0.75;
  std::ostringstream out;
  const std::vector<Rule> rules = {rule};
  WriteRules(out, rules, rel);
  EXPECT_EQ(out.str(), "antisymmetry\t0.75\t_hypernym\t_hyponym\n");
}

TEST(RuleFile, RoundTripOnMinedRules) {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 20; ++round) {
    const KnowledgeGraph g = oracle::SyntheticGraph(rng);
    const auto rules = MineRules(g, {{0.2, 0.2, 0.2}, 2});
    const ConceptHierarchy hierarchy(g.relations());
    std::ostringstream out;
    WriteRules(out, rules, g.relations());
    std::istringstream in(out.str());
    const auto back = ReadRules(in, g.relations(), hierarchy);
    ASSERT_EQ(back.size(), rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) {
      EXPECT_EQ(back[i].type, rules[i].type);
      EXPECT_EQ(back[i].relations, rules[i].relations);
      EXPECT_EQ(*back[i].confidence, *rules[i].confidence);
      EXPECT_EQ(back[i].concept_id, rules[i].concept_id);
    }
  }
}

TEST(RuleFile, Errors) {
  Vocabulary rel;
  rel.Intern("a");
  rel.Intern("b");
  const ConceptHierarchy h(rel);
  auto read = [&](const std::string& text) {
    std::istringstream in(text);
    return ReadRules(in, rel, h);
  };
  EXPECT_TRUE(read("").empty());
  try {
    read("antisymmetry\t1\ta\tb\nantisymmetry\t1\ta\tzzz\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(read("sideways\t1\ta\tb\n"), ParseError);
  EXPECT_THROW(read("inference\t1\ta\ta\n"), ParseError);
  EXPECT_THROW(read("transitivity\t1\ta\tb\n"), ParseError);
  EXPECT_THROW(read("inference\tnan-ish\ta\tb\n"), ParseError);
  EXPECT_THROW(read("inference\t1\n"), ParseError);
}

TEST(GroundFile, RoundTripKeepsConcepts) {
  const KnowledgeGraph g = testing::GraphOf({{"a", "/x/y/p", "b"},
                                             {"a", "/x/x/q", "b"},
                                             {"c", "/x/y/p", "d"},
                                             {"b", "/x/x/q", "e"},
                                             {"a", "/x/x/q", "e"},
                                             {"d", "/x/x/q", "c"}});
  const ConceptHierarchy h(g.relations());
  Rule inference = RuleCandidate::Inference(0, 1);
  inference.concept_id = h.ConceptOf(1);
  inference.confidence = 0.5;
  Rule transitive = RuleCandidate::Transitivity(0, 1, 1);
  transitive.confidence = 0.5;
  Rule anti = RuleCandidate::Antisymmetry(0, 1);
  anti.confidence = 0.5;
  const std::vector<Rule> rules = {inference, transitive, anti};
  const auto grounds = Ground(rules, g, GroundingMode::kAll);
  const auto counts = CountByType(grounds);
  EXPECT_EQ(counts[0], 2u);
  EXPECT_GE(counts[1], 1u);
  EXPECT_EQ(counts[2], 5u);

  std::ostringstream out;
  WriteGroundRules(out, grounds, g.entities(), g.relations(), h);
  EXPECT_NE(out.str().find("inference\ta /x/y/p b\ta /x/x/q b\tx\n"), std::string::npos);
  std::istringstream in(out.str());
  const auto back = ReadGroundRules(in, g.entities(), g.relations(), h);
  EXPECT_EQ(back, grounds);
}

TEST(GroundFile, Errors) {
  const KnowledgeGraph g = testing::GraphOf({{"a", "r", "b"}, {"b", "s", "a"}});
  const ConceptHierarchy h(g.relations());
  auto read = [&](const std::string& text) {
    std::istringstream in(text);
    return ReadGroundRules(in, g.entities(), g.relations(), h);
  };
  EXPECT_EQ(read("antisymmetry\ta r b\tb s a\n").size(), 1u);
  // Wrong orientation violates the antisymmetry shape.
  EXPECT_THROW(read("antisymmetry\ta r b\ta s b\n"), ParseError);
  EXPECT_THROW(read("antisymmetry\ta r b\n"), ParseError);
  EXPECT_THROW(read("antisymmetry\ta r b\tb s\n"), ParseError);
  EXPECT_THROW(read("antisymmetry\ta r b\tb s zz\n"), ParseError);
  EXPECT_THROW(read("inference\ta r b\ta s b\tnowhere\n"), ParseError);
}

}  // namespace
}  // namespace rulekg
