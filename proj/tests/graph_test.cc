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

#include "sgr/graph.h"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "sgr/error.h"
#include "testing/session_gen.h"

namespace sgr {
namespace {

constexpr NodeKey Q(int i) { return {NodeType::kQuery, i}; }
constexpr NodeKey D(int i) { return {NodeType::kDocument, i}; }

std::set<testing::EdgeTriple> EdgeSet(const SessionGraph& g) {
  std::set<testing::EdgeTriple> out;
  for (const Edge& e : g.edges()) out.emplace(e.src, e.dst, e.type);
  return out;
}

TEST(BuildGraphTest, ClickFixtureOrder) {
  const Session s = testing::ClickFixture({2, 1, 0});
  const SessionGraph g = BuildGraph(MakeContext(s, 3));
  ASSERT_EQ(g.edges().size(), 6u);
  const std::vector<Edge> want = {
      {Q(1), D(1), EdgeType::kClickOn, 0},    {Q(1), D(2), EdgeType::kClickOn, 1},
      {D(1), D(2), EdgeType::kTransferTo, 2}, {Q(1), Q(2), EdgeType::kTransferTo, 3},
      {Q(2), D(3), EdgeType::kClickOn, 4},    {Q(2), Q(3), EdgeType::kTransferTo, 5}};
  EXPECT_EQ(g.edges(), want);
  EXPECT_EQ(g.nodes().size(), 6u);
  EXPECT_EQ(g.node(D(3)).source_id, "doc4");
  EXPECT_EQ(g.node(Q(3)).text, "query 3");
  EXPECT_EQ(g.FindNode(D(4)), nullptr);
}

TEST(BuildGraphTest, SingleQuery) {
  const Session s = testing::ClickFixture({3});
  const SessionGraph g = BuildGraph(MakeContext(s, 1));
  EXPECT_EQ(g.nodes().size(), 1u);
  EXPECT_TRUE(g.edges().empty());
}

TEST(BuildGraphTest, SharedDocumentIsOneNode) {
  Session s;
  s.session_id = "s";
  s.queries.push_back({"q1", "a", 1, {{"x", "page x", 1}}});
  s.queries.push_back({"q2", "b", 2, {{"x", "page x", 1}}});
  s.queries.push_back({"q3", "c", 3, {}});
  const SessionGraph g = BuildGraph(MakeContext(s, 3));
  int docs = 0;
  for (const Node& n : g.nodes()) docs += n.key.type == NodeType::kDocument;
  EXPECT_EQ(docs, 1);
  EXPECT_TRUE(g.HasEdge(Q(1), D(1), EdgeType::kClickOn));
  EXPECT_TRUE(g.HasEdge(Q(2), D(1), EdgeType::kClickOn));
}

TEST(BuildGraphTest, UnclickedCandidatesAreNotNodes) {
  const Session s = testing::ClickFixture({0, 0, 0});
  const SessionGraph g = BuildGraph(MakeContext(s, 3));
  EXPECT_EQ(g.nodes().size(), 3u);
  EXPECT_EQ(g.edges().size(), 2u);
}

TEST(BuildGraphTest, MatchesBruteForceAndClosedForm) {
  std::mt19937_64 rng(99);
  for (int n = 0; n < 300; ++n) {
    testing::GenOptions opt;
    opt.shared_docs = n % 2 == 1;
    const Session s = testing::RandomSession(rng, "s", opt);
    for (int i = 1; i <= static_cast<int>(s.queries.size()); ++i) {
      const SessionGraph g = BuildGraph(MakeContext(s, i));
      ASSERT_EQ(EdgeSet(g), testing::BruteForceEdges(s, i));
      if (!opt.shared_docs) {
        ASSERT_EQ(g.edges().size(), testing::ClosedFormEdgeCount(s, i));
      }
      for (std::size_t k = 0; k < g.edges().size(); ++k) {
        ASSERT_EQ(g.edges()[k].order_key, static_cast<int>(k));
      }
      // Stable under rebuild.
      ASSERT_EQ(BuildGraph(MakeContext(s, i)).nodes(), g.nodes());
    }
  }
}

TEST(SessionGraphTest, AddEdgeValidates) {
  SessionGraph g;
  g.AddNode({Q(1), "a", ""});
  g.AddNode({Q(2), "b", ""});
  g.AddNode({D(1), "x", ""});
  EXPECT_THROW(g.AddEdge(Q(1), Q(2), EdgeType::kClickOn), Error);
  EXPECT_THROW(g.AddEdge(D(1), Q(1), EdgeType::kClickOn), Error);
  EXPECT_THROW(g.AddEdge(Q(1), D(1), EdgeType::kTransferTo), Error);
  EXPECT_THROW(g.AddEdge(Q(1), Q(1), EdgeType::kTransferTo), Error);
  EXPECT_THROW(g.AddEdge(Q(1), D(9), EdgeType::kClickOn), Error);
  g.AddEdge(Q(1), D(1), EdgeType::kClickOn);
  try {
    g.AddEdge(Q(1), D(1), EdgeType::kClickOn);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateEdge);
  }
  try {
    g.AddNode({Q(1), "other", ""});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNodeTextConflict);
  }
  EXPECT_EQ(g.MaxDocumentIndex(), 1);
}

TEST(RemoveEdgeTest, OnlyEdge) {
  SessionGraph g;
  g.AddNode({Q(1), "a", ""});
  g.AddNode({D(1), "x", ""});
  g.AddEdge(Q(1), D(1), EdgeType::kClickOn);
  const SessionGraph h = RemoveEdge(g, g.edges()[0]);
  EXPECT_EQ(h.nodes().size(), 2u);
  EXPECT_TRUE(h.edges().empty());
}

TEST(RemoveEdgeTest, RecompactsAndKeepsClique) {
  const Session s = testing::ClickFixture({2, 1, 0});
  const SessionGraph g = BuildGraph(MakeContext(s, 3));
  const SessionGraph h = RemoveEdge(g, g.edges()[0]);
  ASSERT_EQ(h.edges().size(), 5u);
  EXPECT_FALSE(h.HasEdge(Q(1), D(1), EdgeType::kClickOn));
  EXPECT_TRUE(h.HasEdge(D(1), D(2), EdgeType::kTransferTo));
  EXPECT_EQ(h.nodes(), g.nodes());
  for (std::size_t k = 0; k < h.edges().size(); ++k) {
    EXPECT_EQ(h.edges()[k].order_key, static_cast<int>(k));
    EXPECT_TRUE(h.edges()[k].SameLink(g.edges()[k + 1]));
  }
}

TEST(RemoveEdgeTest, EdgeNotFound) {
  const Session s = testing::ClickFixture({1, 0});
  const SessionGraph g = BuildGraph(MakeContext(s, 2));
  try {
    RemoveEdge(g, Edge{Q(2), D(1), EdgeType::kClickOn, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEdgeNotFound);
  }
}

TEST(GraphDumpTest, JsonAndDot) {
  const Session s = testing::ClickFixture({1, 0});
  const SessionGraph g = BuildGraph(MakeContext(s, 2));
  const nlohmann::json j = GraphToJson(g);
  ASSERT_EQ(j["nodes"].size(), 3u);
  ASSERT_EQ(j["edges"].size(), 2u);
  EXPECT_EQ(j["edges"][0]["type"], "click on");
  EXPECT_EQ(j["edges"][1]["order_key"], 1);
  const std::string dot = GraphToDot(g, "s1.2");
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("q1 -> d1"), std::string::npos);
}

TEST(StructurallyEqualTest, DetectsDifferences) {
  const Session s = testing::ClickFixture({2, 1, 0});
  const SessionGraph g = BuildGraph(MakeContext(s, 3));
  EXPECT_TRUE(StructurallyEqual(g, g));
  EXPECT_FALSE(StructurallyEqual(g, RemoveEdge(g, g.edges()[2])));
  SessionGraph h = g;
  h.SetNodeText(D(2), "changed");
  EXPECT_FALSE(StructurallyEqual(g, h));
}

}  // namespace
}  // namespace sgr
