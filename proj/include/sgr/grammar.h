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

#ifndef SGR_GRAMMAR_H_
#define SGR_GRAMMAR_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "sgr/graph.h"

namespace sgr {

// Text form of session graphs.
//
//   graph  := ""  |  edge (" ; " edge)*
//   edge   := node " <" relation "> " node
//   node   := "(" ("q" | "d") index ", " text ")"
//
// `relation` is "click on" or "transfer to". Inside `text` the characters
// \ ( ) < > ; are escaped with a backslash and line breaks become a single
// space, so every unescaped meta-character is structural.

enum class Provenance { kNode, kEdge, kDanglingClause, kGraph, kPrompt };

struct SymbolicText {
  std::string text;
  Provenance provenance = Provenance::kGraph;

  bool operator==(const SymbolicText&) const = default;
};

enum class TaskKind { kLinkPred, kNodeGen, kContrastive, kRank };

std::string_view TaskKindName(TaskKind kind);
// Accepts "link", "node", "contrastive", "rank".
std::optional<TaskKind> ParseTaskKind(std::string_view name);

inline constexpr std::string_view kEdgeSeparator = " ; ";
inline constexpr std::string_view kPromptJoin = "\n";
inline constexpr std::string_view kMaskToken = "[MASK]";

// Node text as it survives a serialize/parse round trip.
std::string CanonicalNodeText(std::string_view text);
std::string EscapeNodeText(std::string_view text);

SymbolicText SerializeNode(NodeKey key, std::string_view text);
SymbolicText SerializeNode(const Node& node);
SymbolicText SerializeEdge(const SessionGraph& g, const Edge& e);
SymbolicText SerializeGraph(const SessionGraph& g);

// Inverse of SerializeGraph. Throws kSyntaxError (message carries the byte
// offset), kUnknownEdgeType, kNodeTextConflict or kDuplicateEdge.
SessionGraph ParseGraph(std::string_view text);

// One clause: `node <relation> node` or the dangling `node <relation>`.
struct EdgeClause {
  Node src;
  EdgeType type = EdgeType::kClickOn;
  std::optional<Node> dst;
};

// Throws like ParseGraph.
EdgeClause ParseClause(std::string_view text);

SymbolicText FullClause(const Node& src, EdgeType type, const Node& dst);
SymbolicText DanglingClause(const Node& src, EdgeType type);

struct PromptTemplate {
  TaskKind task = TaskKind::kRank;
  std::string instruction;
};

// Shipped default instruction for each task.
PromptTemplate DefaultTemplate(TaskKind task);

// Throws kInvalidTemplate if the instruction is empty or contains a line
// break or an unescaped grammar meta-character.
PromptTemplate MakeTemplate(TaskKind task, std::string instruction);

// `{instruction}\n{graph}\n{clause}`, or `{instruction}\n{clause}` when the
// graph text is empty. LinkPred and Rank need a full clause (Rank: a query
// clicking a document); NodeGen and Contrastive need a dangling one
// (Contrastive: a query with <click on>). Throws kClauseShapeMismatch.
SymbolicText AssemblePrompt(const PromptTemplate& tmpl,
                            const SymbolicText& graph_text,
                            const SymbolicText& clause);

struct PromptParts {
  std::string_view instruction;
  std::string_view graph_text;  // empty when the prompt has no graph line
  std::string_view clause;
};

// Splits an assembled prompt back into its lines.
PromptParts SplitPrompt(std::string_view prompt);

// Serialization of the newest edges that fit in `budget` code points; whole
// clauses are dropped from the front.
SymbolicText TruncateGraphText(const SessionGraph& g, std::size_t budget);

}  // namespace sgr

#endif  // SGR_GRAMMAR_H_
