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

#ifndef SGR_GRAPH_H_
#define SGR_GRAPH_H_

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sgr/session.h"

namespace sgr {

enum class NodeType { kQuery, kDocument };
enum class EdgeType { kClickOn, kTransferTo };

std::string_view NodeTypeName(NodeType type);
std::string_view EdgeTypeName(EdgeType type);

// Identifies a node within one graph: `q3` is {kQuery, 3}.
struct NodeKey {
  NodeType type = NodeType::kQuery;
  int index = 0;

  auto operator<=>(const NodeKey&) const = default;
  bool operator==(const NodeKey&) const = default;
};

std::string NodeKeyName(NodeKey key);

struct Node {
  NodeKey key;
  std::string text;
  // query_id / doc_id the node came from; empty for parsed graphs.
  std::string source_id;

  bool operator==(const Node&) const = default;
};

struct Edge {
  NodeKey src;
  NodeKey dst;
  EdgeType type = EdgeType::kClickOn;
  int order_key = 0;

  bool operator==(const Edge&) const = default;
  bool SameLink(const Edge& other) const {
    return src == other.src && dst == other.dst && type == other.type;
  }
};

// Heterogeneous session graph. `edges` is kept sorted by order_key and the
// keys are always 0..|E|-1.
class SessionGraph {
 public:
  SessionGraph() = default;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // nullptr when absent.
  const Node* FindNode(NodeKey key) const;
  // Throws kInvalidArgument when absent.
  const Node& node(NodeKey key) const;

  bool HasEdge(NodeKey src, NodeKey dst, EdgeType type) const;

  // Adds a node, or checks that an existing node with the same key carries
  // the same text (kNodeTextConflict otherwise).
  void AddNode(Node node);
  // Appends an edge with the next order_key. Endpoints must exist and the
  // type must fit the endpoints; duplicates throw kDuplicateEdge.
  void AddEdge(NodeKey src, NodeKey dst, EdgeType type);

  // Replaces the text of a node in place.
  void SetNodeText(NodeKey key, std::string text);

  // Highest document index in use, 0 if none.
  int MaxDocumentIndex() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

// Builds G(V, E) for a context: queries q1..qi by position, clicked history
// documents deduplicated by doc_id with running indices, click edges, a
// clique over each step's clicked documents, and adjacent query
// transitions. Per step the edge order is clicks, clique, transition.
SessionGraph BuildGraph(const SessionContext& ctx);

// Copy of `g` without the edge linking the same endpoints with the same
// type as `e`. Throws kEdgeNotFound.
SessionGraph RemoveEdge(const SessionGraph& g, const Edge& e);

// Equality up to what the symbolic text can express: the typed edge
// sequence with endpoint texts (newlines folded to spaces), and the set of
// non-isolated nodes. Source ids and isolated nodes are ignored.
bool StructurallyEqual(const SessionGraph& a, const SessionGraph& b);

nlohmann::json GraphToJson(const SessionGraph& g);
std::string GraphToDot(const SessionGraph& g, std::string_view name);

}  // namespace sgr

#endif  // SGR_GRAPH_H_
