/*
 * Copyright 2026 The SGR Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sgr/pretrain.h"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "sgr/error.h"
#include "testing/session_gen.h"

namespace sgr {
namespace {

constexpr NodeKey Q(int i) { return {NodeType::kQuery, i}; }
constexpr NodeKey D(int i) { return {NodeType::kDocument, i}; }

SessionGraph Fixture210() {
  return BuildGraph(MakeContext(testing::ClickFixture({2, 1, 0}), 3));
}

SessionGraph MacbookEdge() {
  SessionGraph g;
  g.AddNode({Q(3), "MacBook Price?", ""});
  g.AddNode({D(5), "$1,999", ""});
  g.AddEdge(Q(3), D(5), EdgeType::kClickOn);
  return g;
}

const SampleOrigin kOrigin{"s1", 3};

TEST(EnumerateNonEdgesTest, FixturePool) {
  const std::vector<Link> pool = EnumerateNonEdges(Fixture210());
  std::size_t qd = 0, qq = 0, dd = 0;
  for (const Link& l : pool) {
    if (l.type == EdgeType::kClickOn) {
      ASSERT_EQ(l.src.type, NodeType::kQuery);
      ASSERT_EQ(l.dst.type, NodeType::kDocument);
      ++qd;
    } else if (l.src.type == NodeType::kQuery) {
      ASSERT_EQ(l.dst.type, NodeType::kQuery);
      ASSERT_GE(l.dst.index - l.src.index, 2);
      ++qq;
    } else {
      ASSERT_EQ(l.dst.type, NodeType::kDocument);
      ++dd;
    }
  }
  EXPECT_EQ(qd, 6u);
  EXPECT_EQ(qq, 1u);
  EXPECT_EQ(dd, 2u);
}

TEST(GenerateLinkSamplesTest, SixPlusSix) {
  const SessionGraph g = Fixture210();
  const auto samples = GenerateLinkSamples(g, kOrigin, {}, 42);
  ASSERT_EQ(samples.size(), 12u);
  int pos = 0, neg = 0;
  for (const auto& s : samples) {
    EXPECT_EQ(s.task, TaskKind::kLinkPred);
    ASSERT_TRUE(s.label.has_value());
    (*s.label == 1 ? pos : neg)++;
    EXPECT_FALSE(s.alt_input.has_value());
    EXPECT_FALSE(s.target.has_value());
    EXPECT_FALSE(s.meta.insufficient_negatives);
    EXPECT_EQ(s.meta.rng_seed, 42u);
  }
  EXPECT_EQ(pos, 6);
  EXPECT_EQ(neg, 6);
  EXPECT_EQ(samples[0].meta.target, "q1->d1");
  EXPECT_EQ(samples[0].meta.edge_type, "click on");
}

TEST(GenerateLinkSamplesTest, PositivesOmitTheirEdge) {
  const SessionGraph g = Fixture210();
  const auto samples = GenerateLinkSamples(g, kOrigin, {}, 1);
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    const PromptParts parts = SplitPrompt(samples[k].input);
    const std::string clause = SerializeEdge(g, g.edges()[k]).text;
    EXPECT_EQ(parts.clause, clause);
    EXPECT_EQ(std::string(parts.graph_text).find(clause), std::string::npos);
    const SessionGraph context = ParseGraph(parts.graph_text);
    EXPECT_EQ(context.edges().size(), 5u);
  }
  for (std::size_t k = g.edges().size(); k < samples.size(); ++k) {
    EXPECT_EQ(SplitPrompt(samples[k].input).graph_text, SerializeGraph(g).text);
  }
}

TEST(GenerateLinkSamplesTest, InsufficientNegatives) {
  const auto samples = GenerateLinkSamples(MacbookEdge(), kOrigin, {}, 3);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(*samples[0].label, 1);
  EXPECT_TRUE(samples[0].meta.insufficient_negatives);
  EXPECT_TRUE(SampleToJson(samples[0])["meta"]["insufficient_negatives"].get<bool>());
}

TEST(GenerateLinkSamplesTest, NegRatio) {
  SamplerOptions opt;
  opt.neg_ratio = 0.5;
  EXPECT_EQ(GenerateLinkSamples(Fixture210(), kOrigin, opt, 3).size(), 9u);
  opt.neg_ratio = 0.1;
  EXPECT_EQ(GenerateLinkSamples(Fixture210(), kOrigin, opt, 3).size(), 7u);
  opt.neg_ratio = 0;
  EXPECT_THROW(GenerateLinkSamples(Fixture210(), kOrigin, opt, 3), Error);
}

TEST(GenerateLinkSamplesTest, Deterministic) {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 30; ++n) {
    const Session s = testing::RandomSession(rng, "s");
    const SessionGraph g = BuildGraph(MakeContext(s, static_cast<int>(s.queries.size())));
    if (g.edges().empty()) continue;
    const auto a = GenerateLinkSamples(g, kOrigin, {}, n);
    const auto b = GenerateLinkSamples(g, kOrigin, {}, n);
    ASSERT_EQ(a, b);
  }
}

TEST(GenerateLinkSamplesTest, SeedChangesNegatives) {
  std::mt19937_64 rng(8);
  testing::GenOptions opt;
  opt.min_queries = 5;
  opt.click_rate = 0.5;
  const Session s = testing::RandomSession(rng, "s", opt);
  const SessionGraph g = BuildGraph(MakeContext(s, 5));
  std::set<std::string> variants;
  for (int seed = 0; seed < 10; ++seed) {
    std::string joined;
    for (const auto& x : GenerateLinkSamples(g, kOrigin, {}, seed)) joined += x.meta.target;
    variants.insert(joined);
  }
  EXPECT_GT(variants.size(), 1u);
}

TEST(GenerateLinkSamplesTest, EmptyGraph) {
  SessionGraph g;
  g.AddNode({Q(1), "a", ""});
  try {
    GenerateLinkSamples(g, kOrigin, {}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyGraph);
  }
}

TEST(GenerateNodeSamplesTest, MacbookEdge) {
  const auto samples = GenerateNodeSamples(MacbookEdge(), kOrigin, {}, 0);
  ASSERT_EQ(samples.size(), 2u);
  const PretrainSample& d5 = samples[1];
  EXPECT_EQ(d5.meta.target, "d5");
  EXPECT_TRUE(d5.input.ends_with("(q3, MacBook Price?) <click on>"));
  EXPECT_EQ(*d5.target, "(d5, $1,999)");
  EXPECT_EQ(d5.input.find("$1,999"), std::string::npos);
  EXPECT_NE(d5.input.find("(d5, [MASK])"), std::string::npos);
  EXPECT_FALSE(d5.label.has_value());
}

TEST(GenerateNodeSamplesTest, IsolatedNodeNotEligible) {
  SessionGraph g = MacbookEdge();
  g.AddNode({Q(1), "lonely", ""});
  const auto samples = GenerateNodeSamples(g, kOrigin, {}, 0);
  ASSERT_EQ(samples.size(), 2u);
  for (const auto& s : samples) EXPECT_NE(s.meta.target, "q1");
}

TEST(GenerateNodeSamplesTest, MaskAppliesToEveryOccurrence) {
  const SessionGraph g = BuildGraph(MakeContext(testing::ClickFixture({0, 0, 0}), 3));
  const auto samples = GenerateNodeSamples(g, kOrigin, {}, 0);
  const PretrainSample* q2 = nullptr;
  for (const auto& s : samples) {
    if (s.meta.target == "q2") q2 = &s;
  }
  ASSERT_NE(q2, nullptr);
  const PromptParts parts = SplitPrompt(q2->input);
  EXPECT_EQ(parts.graph_text,
            "(q1, query 1) <transfer to> (q2, [MASK]) ; (q2, [MASK]) <transfer to> (q3, query 3)");
  EXPECT_EQ(parts.clause, "(q3, query 3) <transfer to>");
  EXPECT_EQ(q2->input.find("query 2"), std::string::npos);
  EXPECT_EQ(*q2->target, "(q2, query 2)");
}

TEST(GenerateNodeSamplesTest, SampleRate) {
  SamplerOptions opt;
  opt.sample_rate = 0;
  EXPECT_TRUE(GenerateNodeSamples(Fixture210(), kOrigin, opt, 0).empty());
  opt.sample_rate = 0.5;
  std::size_t total = 0;
  for (int seed = 0; seed < 200; ++seed) {
    total += GenerateNodeSamples(Fixture210(), kOrigin, opt, seed).size();
  }
  EXPECT_NEAR(static_cast<double>(total) / 200.0, 3.0, 0.4);
}

TEST(GenerateContrastiveSamplesTest, OnlyEdgeIsTarget) {
  const auto samples = GenerateContrastiveSamples(MacbookEdge(), kOrigin, {}, 0);
  ASSERT_EQ(samples.size(), 1u);
  const PretrainSample& s = samples[0];
  EXPECT_EQ(s.input, *s.alt_input);
  EXPECT_TRUE(s.alt_input->ends_with("\n(q3, MacBook Price?) <click on>"));
  EXPECT_EQ(*s.target, "(d5, $1,999)");
}

TEST(GenerateContrastiveSamplesTest, FixtureKeepsFiveEdges) {
  const SessionGraph g = Fixture210();
  const auto samples = GenerateContrastiveSamples(g, kOrigin, {}, 0);
  ASSERT_EQ(samples.size(), 3u);
  EXPECT_EQ(samples[0].meta.target, "q1->d1");
  const PromptParts parts = SplitPrompt(samples[0].input);
  EXPECT_EQ(ParseGraph(parts.graph_text).edges().size(), 5u);
  EXPECT_EQ(samples[0].input.find(SerializeEdge(g, g.edges()[0]).text), std::string::npos);
  const PromptParts alt = SplitPrompt(*samples[0].alt_input);
  EXPECT_EQ(alt.instruction, parts.instruction);
  EXPECT_EQ(alt.clause, parts.clause);
  EXPECT_TRUE(alt.graph_text.empty());
}

TEST(GenerateContrastiveSamplesTest, NoClickEdges) {
  const SessionGraph g = BuildGraph(MakeContext(testing::ClickFixture({0, 0}), 2));
  try {
    GenerateContrastiveSamples(g, kOrigin, {}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoClickEdges);
  }
}

TEST(SampleJsonTest, RoundTripAndShape) {
  const SessionGraph g = Fixture210();
  std::vector<PretrainSample> all = GenerateLinkSamples(g, kOrigin, {}, 5);
  for (auto& s : GenerateNodeSamples(g, kOrigin, {}, 5)) all.push_back(s);
  for (auto& s : GenerateContrastiveSamples(g, kOrigin, {}, 5)) all.push_back(s);
  for (const auto& s : all) {
    const nlohmann::json j = SampleToJson(s);
    EXPECT_EQ(j.contains("label"), s.task == TaskKind::kLinkPred);
    EXPECT_EQ(j.contains("alt_input"), s.task == TaskKind::kContrastive);
    EXPECT_EQ(j.contains("target"), s.task != TaskKind::kLinkPred);
    EXPECT_EQ(SampleFromJson(nlohmann::json::parse(j.dump())), s);
  }
  nlohmann::json bad = SampleToJson(all[0]);
  bad.erase("label");
  EXPECT_THROW(SampleFromJson(bad), Error);
  bad = SampleToJson(all.back());
  bad.erase("alt_input");
  EXPECT_THROW(SampleFromJson(bad), Error);
}

}  // namespace
}  // namespace sgr
