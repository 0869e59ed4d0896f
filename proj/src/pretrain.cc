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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sgr/text_util.h"

namespace sgr {
namespace {

std::string LinkName(NodeKey src, NodeKey dst) {
  return NodeKeyName(src) + "->" + NodeKeyName(dst);
}

SampleMeta MakeMeta(const SampleOrigin& origin, std::string target,
                    EdgeType type, std::uint64_t seed) {
  SampleMeta meta;
  meta.session_id = origin.session_id;
  meta.step = origin.step;
  meta.target = std::move(target);
  meta.edge_type = std::string(EdgeTypeName(type));
  meta.rng_seed = seed;
  return meta;
}

void RequireEdges(const SessionGraph& g) {
  if (g.edges().empty()) {
    throw Error(ErrorCode::kEmptyGraph, "graph has no edges");
  }
}

}  // namespace

std::vector<Link> EnumerateNonEdges(const SessionGraph& g) {
  std::vector<NodeKey> queries, docs;
  for (const Node& n : g.nodes()) {
    (n.key.type == NodeType::kQuery ? queries : docs).push_back(n.key);
  }
  std::sort(queries.begin(), queries.end());
  std::sort(docs.begin(), docs.end());

  std::vector<Link> out;
  for (NodeKey q : queries) {
    for (NodeKey d : docs) {
      if (!g.HasEdge(q, d, EdgeType::kClickOn)) {
        out.push_back({q, d, EdgeType::kClickOn});
      }
    }
  }
  for (std::size_t a = 0; a < queries.size(); ++a) {
    for (std::size_t b = a + 1; b < queries.size(); ++b) {
      if (queries[b].index - queries[a].index >= 2 &&
          !g.HasEdge(queries[a], queries[b], EdgeType::kTransferTo)) {
        out.push_back({queries[a], queries[b], EdgeType::kTransferTo});
      }
    }
  }
  for (std::size_t a = 0; a < docs.size(); ++a) {
    for (std::size_t b = a + 1; b < docs.size(); ++b) {
      if (!g.HasEdge(docs[a], docs[b], EdgeType::kTransferTo) &&
          !g.HasEdge(docs[b], docs[a], EdgeType::kTransferTo)) {
        out.push_back({docs[a], docs[b], EdgeType::kTransferTo});
      }
    }
  }
  return out;
}

std::vector<PretrainSample> GenerateLinkSamples(const SessionGraph& g,
                                                const SampleOrigin& origin,
                                                const SamplerOptions& options,
                                                std::uint64_t rng_seed) {
  RequireEdges(g);
  if (!(options.neg_ratio > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "neg_ratio must be positive");
  }
  std::vector<PretrainSample> out;
  for (const Edge& e : g.edges()) {
    const SessionGraph without = RemoveEdge(g, e);
    PretrainSample s;
    s.task = TaskKind::kLinkPred;
    s.input = AssemblePrompt(options.link_template,
                             TruncateGraphText(without, options.budget),
                             SerializeEdge(g, e))
                  .text;
    s.label = 1;
    s.meta = MakeMeta(origin, LinkName(e.src, e.dst), e.type, rng_seed);
    out.push_back(std::move(s));
  }

  std::vector<Link> pool = EnumerateNonEdges(g);
  const auto wanted = static_cast<std::size_t>(
      std::ceil(options.neg_ratio * static_cast<double>(g.edges().size())));
  const bool short_pool = pool.size() < wanted;
  const std::size_t take = short_pool ? pool.size() : wanted;
  std::mt19937_64 rng(rng_seed);
  for (std::size_t i = 0; i < take; ++i) {
    std::swap(pool[i], pool[i + UniformIndex(rng, pool.size() - i)]);
  }
  const SymbolicText full = TruncateGraphText(g, options.budget);
  for (std::size_t i = 0; i < take; ++i) {
    const Link& link = pool[i];
    PretrainSample s;
    s.task = TaskKind::kLinkPred;
    s.input = AssemblePrompt(options.link_template, full,
                             FullClause(g.node(link.src), link.type,
                                        g.node(link.dst)))
                  .text;
    s.label = 0;
    s.meta = MakeMeta(origin, LinkName(link.src, link.dst), link.type, rng_seed);
    out.push_back(std::move(s));
  }
  if (short_pool) {
    for (PretrainSample& s : out) s.meta.insufficient_negatives = true;
  }
  return out;
}

std::vector<PretrainSample> GenerateNodeSamples(const SessionGraph& g,
                                                const SampleOrigin& origin,
                                                const SamplerOptions& options,
                                                std::uint64_t rng_seed) {
  RequireEdges(g);
  std::mt19937_64 rng(rng_seed);
  std::vector<PretrainSample> out;
  for (const Node& target : g.nodes()) {
    const Edge* latest = nullptr;
    for (const Edge& e : g.edges()) {
      if (e.src == target.key || e.dst == target.key) latest = &e;
    }
    if (latest == nullptr) continue;
    if (UniformUnit(rng) >= options.sample_rate) continue;

    const NodeKey source = latest->src == target.key ? latest->dst : latest->src;
    SessionGraph masked = g;
    masked.SetNodeText(target.key, std::string(kMaskToken));
    PretrainSample s;
    s.task = TaskKind::kNodeGen;
    s.input = AssemblePrompt(options.node_template,
                             TruncateGraphText(masked, options.budget),
                             DanglingClause(g.node(source), latest->type))
                  .text;
    s.target = SerializeNode(target).text;
    s.meta = MakeMeta(origin, NodeKeyName(target.key), latest->type, rng_seed);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PretrainSample> GenerateContrastiveSamples(
    const SessionGraph& g, const SampleOrigin& origin,
    const SamplerOptions& options, std::uint64_t rng_seed) {
  bool any_click = false;
  for (const Edge& e : g.edges()) any_click |= e.type == EdgeType::kClickOn;
  if (!any_click) {
    throw Error(ErrorCode::kNoClickEdges, "graph has no click edges");
  }
  std::mt19937_64 rng(rng_seed);
  std::vector<PretrainSample> out;
  for (const Edge& e : g.edges()) {
    if (e.type != EdgeType::kClickOn) continue;
    if (UniformUnit(rng) >= options.sample_rate) continue;
    const SymbolicText clause = DanglingClause(g.node(e.src), EdgeType::kClickOn);
    PretrainSample s;
    s.task = TaskKind::kContrastive;
    s.input = AssemblePrompt(options.contrastive_template,
                             TruncateGraphText(RemoveEdge(g, e), options.budget),
                             clause)
                  .text;
    s.alt_input =
        AssemblePrompt(options.contrastive_template, SymbolicText{}, clause).text;
    s.target = SerializeNode(g.node(e.dst)).text;
    s.meta = MakeMeta(origin, LinkName(e.src, e.dst), e.type, rng_seed);
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::json SampleToJson(const PretrainSample& s) {
  nlohmann::json j;
  j["task"] = TaskKindName(s.task);
  j["input"] = s.input;
  if (s.alt_input) j["alt_input"] = *s.alt_input;
  if (s.target) j["target"] = *s.target;
  if (s.label) j["label"] = *s.label;
  nlohmann::json meta = {{"session_id", s.meta.session_id},
                         {"step", s.meta.step},
                         {"target", s.meta.target},
                         {"edge_type", s.meta.edge_type},
                         {"rng_seed", s.meta.rng_seed}};
  if (s.meta.insufficient_negatives) meta["insufficient_negatives"] = true;
  j["meta"] = std::move(meta);
  return j;
}

PretrainSample SampleFromJson(const nlohmann::json& j) {
  try {
    PretrainSample s;
    const auto task = ParseTaskKind(j.at("task").get<std::string>());
    if (!task || *task == TaskKind::kRank) {
      throw Error(ErrorCode::kMalformedRecord, "unknown task " + j.at("task").dump());
    }
    s.task = *task;
    s.input = j.at("input").get<std::string>();
    if (j.contains("alt_input")) s.alt_input = j["alt_input"].get<std::string>();
    if (j.contains("target")) s.target = j["target"].get<std::string>();
    if (j.contains("label")) s.label = j["label"].get<int>();
    if (j.contains("meta")) {
      const auto& m = j["meta"];
      s.meta.session_id = m.value("session_id", "");
      s.meta.step = m.value("step", 0);
      s.meta.target = m.value("target", "");
      s.meta.edge_type = m.value("edge_type", "");
      s.meta.rng_seed = m.value("rng_seed", std::uint64_t{0});
      s.meta.insufficient_negatives = m.value("insufficient_negatives", false);
    }
    const bool shape_ok =
        s.task == TaskKind::kLinkPred
            ? s.label.has_value() && (*s.label == 0 || *s.label == 1) &&
                  !s.target && !s.alt_input
        : s.task == TaskKind::kNodeGen ? s.target && !s.label && !s.alt_input
                                       : s.target && s.alt_input && !s.label;
    if (!shape_ok) {
      throw Error(ErrorCode::kMalformedRecord,
                  "fields do not match task " + std::string(TaskKindName(s.task)));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, e.what());
  }
}

}  // namespace sgr
