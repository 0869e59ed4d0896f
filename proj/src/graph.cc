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

#include <algorithm>
#include <map>
#include <string>

#include "sgr/grammar.h"

namespace sgr {

std::string_view NodeTypeName(NodeType type) {
  return type == NodeType::kQuery ? "query" : "document";
}

std::string_view EdgeTypeName(EdgeType type) {
  return type == EdgeType::kClickOn ? "click on" : "transfer to";
}

std::string NodeKeyName(NodeKey key) {
  return (key.type == NodeType::kQuery ? "q" : "d") + std::to_string(key.index);
}

const Node* SessionGraph::FindNode(NodeKey key) const {
  for (const Node& n : nodes_) {
    if (n.key == key) return &n;
  }
  return nullptr;
}

const Node& SessionGraph::node(NodeKey key) const {
  const Node* n = FindNode(key);
  if (n == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "no node " + NodeKeyName(key));
  }
  return *n;
}

bool SessionGraph::HasEdge(NodeKey src, NodeKey dst, EdgeType type) const {
  return std::any_of(edges_.begin(), edges_.end(), [&](const Edge& e) {
    return e.src == src && e.dst == dst && e.type == type;
  });
}

void SessionGraph::AddNode(Node node) {
  if (node.key.index < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "node index must be positive: " + NodeKeyName(node.key));
  }
  for (const Node& n : nodes_) {
    if (n.key == node.key) {
      if (n.text != node.text) {
        throw Error(ErrorCode::kNodeTextConflict,
                    NodeKeyName(node.key) + " seen with texts \"" + n.text +
                        "\" and \"" + node.text + "\"");
      }
      return;
    }
  }
  nodes_.push_back(std::move(node));
}

void SessionGraph::AddEdge(NodeKey src, NodeKey dst, EdgeType type) {
  if (FindNode(src) == nullptr || FindNode(dst) == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "edge endpoint missing: " + NodeKeyName(src) + " -> " +
                    NodeKeyName(dst));
  }
  const bool valid =
      type == EdgeType::kClickOn
          ? src.type == NodeType::kQuery && dst.type == NodeType::kDocument
          : src.type == dst.type;
  if (!valid || src == dst) {
    throw Error(ErrorCode::kInvalidArgument,
                "edge type " + std::string(EdgeTypeName(type)) +
                    " cannot link " + NodeKeyName(src) + " to " +
                    NodeKeyName(dst));
  }
  if (HasEdge(src, dst, type)) {
    throw Error(ErrorCode::kDuplicateEdge,
                NodeKeyName(src) + " <" + std::string(EdgeTypeName(type)) +
                    "> " + NodeKeyName(dst));
  }
  edges_.push_back({src, dst, type, static_cast<int>(edges_.size())});
}

void SessionGraph::SetNodeText(NodeKey key, std::string text) {
  for (Node& n : nodes_) {
    if (n.key == key) {
      n.text = std::move(text);
      return;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "no node " + NodeKeyName(key));
}

int SessionGraph::MaxDocumentIndex() const {
  int best = 0;
  for (const Node& n : nodes_) {
    if (n.key.type == NodeType::kDocument) best = std::max(best, n.key.index);
  }
  return best;
}

SessionGraph BuildGraph(const SessionContext& ctx) {
  SessionGraph g;
  const int steps = static_cast<int>(ctx.history.size()) + 1;
  for (int j = 1; j <= steps; ++j) {
    const Query& q = j < steps ? ctx.history[j - 1].query : ctx.current_query;
    g.AddNode({{NodeType::kQuery, j}, q.text, q.query_id});
  }

  std::map<std::string, int, std::less<>> doc_index;
  for (int j = 1; j < steps; ++j) {
    const HistoryStep& h = ctx.history[j - 1];
    const NodeKey query{NodeType::kQuery, j};
    std::vector<int> clicked;
    clicked.reserve(h.clicked.size());
    for (const Document& d : h.clicked) {
      auto [it, inserted] =
          doc_index.try_emplace(d.doc_id, static_cast<int>(doc_index.size()) + 1);
      if (inserted) {
        g.AddNode({{NodeType::kDocument, it->second}, d.text, d.doc_id});
      }
      clicked.push_back(it->second);
      g.AddEdge(query, {NodeType::kDocument, it->second}, EdgeType::kClickOn);
    }
    std::sort(clicked.begin(), clicked.end());
    for (std::size_t a = 0; a < clicked.size(); ++a) {
      for (std::size_t b = a + 1; b < clicked.size(); ++b) {
        const NodeKey lo{NodeType::kDocument, clicked[a]};
        const NodeKey hi{NodeType::kDocument, clicked[b]};
        // A pair clicked together again under a later query is one edge.
        if (!g.HasEdge(lo, hi, EdgeType::kTransferTo)) {
          g.AddEdge(lo, hi, EdgeType::kTransferTo);
        }
      }
    }
    g.AddEdge(query, {NodeType::kQuery, j + 1}, EdgeType::kTransferTo);
  }
  return g;
}

SessionGraph RemoveEdge(const SessionGraph& g, const Edge& e) {
  if (!g.HasEdge(e.src, e.dst, e.type)) {
    throw Error(ErrorCode::kEdgeNotFound,
                NodeKeyName(e.src) + " <" + std::string(EdgeTypeName(e.type)) +
                    "> " + NodeKeyName(e.dst));
  }
  SessionGraph out;
  for (const Node& n : g.nodes()) out.AddNode(n);
  for (const Edge& x : g.edges()) {
    if (!x.SameLink(e)) out.AddEdge(x.src, x.dst, x.type);
  }
  return out;
}

bool StructurallyEqual(const SessionGraph& a, const SessionGraph& b) {
  if (a.edges().size() != b.edges().size()) return false;
  for (std::size_t i = 0; i < a.edges().size(); ++i) {
    const Edge& x = a.edges()[i];
    const Edge& y = b.edges()[i];
    if (!x.SameLink(y)) return false;
    if (CanonicalNodeText(a.node(x.src).text) != CanonicalNodeText(b.node(y.src).text) ||
        CanonicalNodeText(a.node(x.dst).text) != CanonicalNodeText(b.node(y.dst).text)) {
      return false;
    }
  }
  return true;
}

nlohmann::json GraphToJson(const SessionGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node& n : g.nodes()) {
    nodes.push_back({{"id", NodeKeyName(n.key)},
                     {"type", NodeTypeName(n.key.type)},
                     {"index", n.key.index},
                     {"text", n.text},
                     {"source_id", n.source_id}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : g.edges()) {
    edges.push_back({{"src", NodeKeyName(e.src)},
                     {"dst", NodeKeyName(e.dst)},
                     {"type", EdgeTypeName(e.type)},
                     {"order_key", e.order_key}});
  }
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

namespace {

std::string DotQuote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string GraphToDot(const SessionGraph& g, std::string_view name) {
  std::string out = "digraph " + DotQuote(name) + " {\n";
  for (const Node& n : g.nodes()) {
    out += "  " + NodeKeyName(n.key) + " [shape=" +
           (n.key.type == NodeType::kQuery ? "box" : "ellipse") +
           ", label=" + DotQuote(NodeKeyName(n.key) + ": " + n.text) + "];\n";
  }
  for (const Edge& e : g.edges()) {
    out += "  " + NodeKeyName(e.src) + " -> " + NodeKeyName(e.dst) +
           " [label=" + DotQuote(std::to_string(e.order_key) + " " +
                                 std::string(EdgeTypeName(e.type)));
    if (e.src.type == NodeType::kDocument && e.dst.type == NodeType::kDocument) {
      out += ", dir=none";
    }
    out += "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace sgr
