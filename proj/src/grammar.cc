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

#include "sgr/grammar.h"

#include <string>
#include <vector>

#include "sgr/text_util.h"

namespace sgr {
namespace {

constexpr std::string_view kClickOn = "click on";
constexpr std::string_view kTransferTo = "transfer to";

bool IsMeta(char c) {
  return c == '\\' || c == '(' || c == ')' || c == '<' || c == '>' || c == ';';
}

std::string Relation(EdgeType type) {
  return "<" + std::string(type == EdgeType::kClickOn ? kClickOn : kTransferTo) +
         ">";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  bool AtEnd() const { return pos_ >= text_.size(); }

  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kSyntaxError,
                what + " at byte offset " + std::to_string(pos_));
  }

  void Expect(std::string_view literal) {
    if (text_.substr(pos_, literal.size()) != literal) {
      Fail("expected \"" + std::string(literal) + "\"");
    }
    pos_ += literal.size();
  }

  bool Peek(std::string_view literal) const {
    return text_.substr(pos_, literal.size()) == literal;
  }

  Node ParseNode() {
    Expect("(");
    Node node;
    if (Peek("q")) {
      node.key.type = NodeType::kQuery;
    } else if (Peek("d")) {
      node.key.type = NodeType::kDocument;
    } else {
      Fail("expected node type 'q' or 'd'");
    }
    ++pos_;
    const std::size_t digits_at = pos_;
    long long index = 0;
    while (!AtEnd() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      index = index * 10 + (text_[pos_] - '0');
      if (index > 1'000'000'000) Fail("node index too large");
      ++pos_;
    }
    if (pos_ == digits_at) Fail("expected node index");
    if (text_[digits_at] == '0') {
      pos_ = digits_at;
      Fail("node index must be a positive integer without leading zeros");
    }
    node.key.index = static_cast<int>(index);
    Expect(", ");
    while (true) {
      if (AtEnd()) Fail("unterminated node text");
      const char c = text_[pos_];
      if (c == ')') break;
      if (c == '\\') {
        ++pos_;
        if (AtEnd() || !IsMeta(text_[pos_])) Fail("invalid escape");
        node.text += text_[pos_++];
        continue;
      }
      if (IsMeta(c)) Fail(std::string("unescaped '") + c + "' in node text");
      if (c == '\n' || c == '\r') Fail("line break in node text");
      node.text += c;
      ++pos_;
    }
    ++pos_;
    return node;
  }

  EdgeType ParseRelation() {
    Expect(" <");
    const std::size_t start = pos_;
    const std::size_t close = text_.find('>', pos_);
    if (close == std::string_view::npos) Fail("unterminated edge type");
    const std::string_view name = text_.substr(start, close - start);
    if (name.find_first_of("()<;\\") != std::string_view::npos) {
      Fail("malformed edge type");
    }
    pos_ = close + 1;
    if (name == kClickOn) return EdgeType::kClickOn;
    if (name == kTransferTo) return EdgeType::kTransferTo;
    throw Error(ErrorCode::kUnknownEdgeType,
                "<" + std::string(name) + "> at byte offset " +
                    std::to_string(start - 1));
  }

  EdgeClause ParseClause(bool allow_dangling) {
    EdgeClause clause;
    clause.src = ParseNode();
    clause.type = ParseRelation();
    if (allow_dangling && AtEnd()) return clause;
    Expect(" ");
    clause.dst = ParseNode();
    return clause;
  }

  std::size_t pos() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

void CheckEndpoints(const EdgeClause& c, std::size_t offset) {
  const bool ok =
      c.type == EdgeType::kClickOn
          ? c.src.key.type == NodeType::kQuery &&
                c.dst->key.type == NodeType::kDocument
          : c.src.key.type == c.dst->key.type && c.src.key != c.dst->key;
  if (!ok) {
    throw Error(ErrorCode::kSyntaxError,
                "<" + std::string(EdgeTypeName(c.type)) + "> cannot link " +
                    NodeKeyName(c.src.key) + " to " + NodeKeyName(c.dst->key) +
                    " at byte offset " + std::to_string(offset));
  }
}

}  // namespace

std::string_view TaskKindName(TaskKind kind) {
  switch (kind) {
    case TaskKind::kLinkPred: return "link";
    case TaskKind::kNodeGen: return "node";
    case TaskKind::kContrastive: return "contrastive";
    case TaskKind::kRank: return "rank";
  }
  return "rank";
}

std::optional<TaskKind> ParseTaskKind(std::string_view name) {
  if (name == "link") return TaskKind::kLinkPred;
  if (name == "node") return TaskKind::kNodeGen;
  if (name == "contrastive") return TaskKind::kContrastive;
  if (name == "rank") return TaskKind::kRank;
  return std::nullopt;
}

std::string CanonicalNodeText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      out += ' ';
    } else if (c == '\n') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

std::string EscapeNodeText(std::string_view text) {
  const std::string folded = CanonicalNodeText(text);
  std::string out;
  out.reserve(folded.size() + 8);
  for (char c : folded) {
    if (IsMeta(c)) out += '\\';
    out += c;
  }
  return out;
}

SymbolicText SerializeNode(NodeKey key, std::string_view text) {
  return {"(" + NodeKeyName(key) + ", " + EscapeNodeText(text) + ")",
          Provenance::kNode};
}

SymbolicText SerializeNode(const Node& node) {
  return SerializeNode(node.key, node.text);
}

SymbolicText SerializeEdge(const SessionGraph& g, const Edge& e) {
  return FullClause(g.node(e.src), e.type, g.node(e.dst));
}

SymbolicText SerializeGraph(const SessionGraph& g) {
  std::string out;
  for (const Edge& e : g.edges()) {
    if (!out.empty()) out += kEdgeSeparator;
    out += SerializeEdge(g, e).text;
  }
  return {std::move(out), Provenance::kGraph};
}

SessionGraph ParseGraph(std::string_view text) {
  SessionGraph g;
  Parser p(text);
  if (p.AtEnd()) return g;
  while (true) {
    const std::size_t at = p.pos();
    EdgeClause c = p.ParseClause(false);
    CheckEndpoints(c, at);
    const NodeKey src = c.src.key;
    const NodeKey dst = c.dst->key;
    g.AddNode(std::move(c.src));
    g.AddNode(std::move(*c.dst));
    if (g.HasEdge(src, dst, c.type)) {
      throw Error(ErrorCode::kDuplicateEdge,
                  "repeated clause at byte offset " + std::to_string(at));
    }
    g.AddEdge(src, dst, c.type);
    if (p.AtEnd()) break;
    p.Expect(kEdgeSeparator);
  }
  return g;
}

EdgeClause ParseClause(std::string_view text) {
  Parser p(text);
  EdgeClause c = p.ParseClause(true);
  if (!p.AtEnd()) p.Fail("trailing characters after clause");
  if (c.dst) CheckEndpoints(c, 0);
  return c;
}

SymbolicText FullClause(const Node& src, EdgeType type, const Node& dst) {
  return {SerializeNode(src).text + " " + Relation(type) + " " +
              SerializeNode(dst).text,
          Provenance::kEdge};
}

SymbolicText DanglingClause(const Node& src, EdgeType type) {
  return {SerializeNode(src).text + " " + Relation(type),
          Provenance::kDanglingClause};
}

PromptTemplate DefaultTemplate(TaskKind task) {
  switch (task) {
    case TaskKind::kLinkPred:
      return {task,
              "Given the search session graph, answer yes or no: are the two "
              "nodes in the last clause linked by the stated relation?"};
    case TaskKind::kNodeGen:
      return {task,
              "Given the search session graph with a masked node, generate the "
              "index and text of the node that completes the last clause."};
    case TaskKind::kContrastive:
      return {task,
              "Generate the index and text of the document that the user "
              "clicked for the query in the last clause."};
    case TaskKind::kRank:
      return {task,
              "Given the search session graph, answer yes or no: will the user "
              "click this document for this query?"};
  }
  return {task, ""};
}

PromptTemplate MakeTemplate(TaskKind task, std::string instruction) {
  if (instruction.empty()) {
    throw Error(ErrorCode::kInvalidTemplate, "instruction is empty");
  }
  for (std::size_t i = 0; i < instruction.size(); ++i) {
    const char c = instruction[i];
    if (IsMeta(c) || c == '\n' || c == '\r') {
      throw Error(ErrorCode::kInvalidTemplate,
                  "instruction contains a reserved character at byte " +
                      std::to_string(i));
    }
  }
  return {task, std::move(instruction)};
}

SymbolicText AssemblePrompt(const PromptTemplate& tmpl,
                            const SymbolicText& graph_text,
                            const SymbolicText& clause) {
  EdgeClause parsed;
  try {
    parsed = ParseClause(clause.text);
  } catch (const Error& e) {
    throw Error(ErrorCode::kClauseShapeMismatch,
                std::string("clause does not parse: ") + e.what());
  }
  bool ok = false;
  switch (tmpl.task) {
    case TaskKind::kLinkPred:
      ok = parsed.dst.has_value();
      break;
    case TaskKind::kRank:
      ok = parsed.dst.has_value() && parsed.type == EdgeType::kClickOn;
      break;
    case TaskKind::kNodeGen:
      ok = !parsed.dst.has_value();
      break;
    case TaskKind::kContrastive:
      ok = !parsed.dst.has_value() && parsed.type == EdgeType::kClickOn &&
           parsed.src.key.type == NodeType::kQuery;
      break;
  }
  if (!ok) {
    throw Error(ErrorCode::kClauseShapeMismatch,
                "clause \"" + clause.text + "\" does not fit task " +
                    std::string(TaskKindName(tmpl.task)));
  }
  std::string out = tmpl.instruction;
  out += kPromptJoin;
  if (!graph_text.text.empty()) {
    out += graph_text.text;
    out += kPromptJoin;
  }
  out += clause.text;
  return {std::move(out), Provenance::kPrompt};
}

PromptParts SplitPrompt(std::string_view prompt) {
  PromptParts parts;
  const std::size_t first = prompt.find('\n');
  if (first == std::string_view::npos) {
    parts.clause = prompt;
    return parts;
  }
  parts.instruction = prompt.substr(0, first);
  const std::size_t last = prompt.rfind('\n');
  parts.clause = prompt.substr(last + 1);
  if (last > first) {
    parts.graph_text = prompt.substr(first + 1, last - first - 1);
  }
  return parts;
}

SymbolicText TruncateGraphText(const SessionGraph& g, std::size_t budget) {
  const auto& edges = g.edges();
  std::vector<std::string> clauses;
  std::size_t used = 0;
  for (std::size_t i = edges.size(); i-- > 0;) {
    std::string clause = SerializeEdge(g, edges[i]).text;
    const std::size_t extra =
        Utf8Length(clause) + (clauses.empty() ? 0 : kEdgeSeparator.size());
    if (used + extra > budget) break;
    used += extra;
    clauses.push_back(std::move(clause));
  }
  std::string out;
  for (std::size_t i = clauses.size(); i-- > 0;) {
    out += clauses[i];
    if (i > 0) out += kEdgeSeparator;
  }
  return {std::move(out), Provenance::kGraph};
}

}  // namespace sgr
