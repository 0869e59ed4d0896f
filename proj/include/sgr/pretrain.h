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

#ifndef SGR_PRETRAIN_H_
#define SGR_PRETRAIN_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgr/grammar.h"
#include "sgr/graph.h"

namespace sgr {

struct SampleMeta {
  std::string session_id;
  int step = 0;
  // "q1->d2" for link and contrastive targets, "d2" for masked nodes.
  std::string target;
  std::string edge_type;
  std::uint64_t rng_seed = 0;
  bool insufficient_negatives = false;

  bool operator==(const SampleMeta&) const = default;
};

// One training record. Which optional fields are set depends on the task:
// link has a label, node has a target, contrastive has a target and the
// history-free alt_input.
struct PretrainSample {
  TaskKind task = TaskKind::kLinkPred;
  std::string input;
  std::optional<std::string> alt_input;
  std::optional<std::string> target;
  std::optional<int> label;
  SampleMeta meta;

  bool operator==(const PretrainSample&) const = default;
};

struct SamplerOptions {
  double neg_ratio = 1.0;
  // Fraction of eligible node / click targets kept.
  double sample_rate = 1.0;
  // Graph text budget in code points.
  std::size_t budget = std::numeric_limits<std::size_t>::max();
  PromptTemplate link_template = DefaultTemplate(TaskKind::kLinkPred);
  PromptTemplate node_template = DefaultTemplate(TaskKind::kNodeGen);
  PromptTemplate contrastive_template = DefaultTemplate(TaskKind::kContrastive);
};

struct SampleOrigin {
  std::string session_id;
  int step = 0;
};

// A candidate link: endpoints plus relation.
struct Link {
  NodeKey src;
  NodeKey dst;
  EdgeType type = EdgeType::kClickOn;

  bool operator==(const Link&) const = default;
};

// Every type-valid pair that is not an edge of `g`: query -> document
// without a click, non-adjacent query pairs, and document pairs that were
// never clicked together. Deterministic order.
std::vector<Link> EnumerateNonEdges(const SessionGraph& g);

// One positive per edge (input over the graph without that edge) and
// ceil(neg_ratio * |E|) sampled negatives over the full graph. When fewer
// non-edges exist all of them are used and every sample is flagged.
// Throws kEmptyGraph.
std::vector<PretrainSample> GenerateLinkSamples(const SessionGraph& g,
                                                const SampleOrigin& origin,
                                                const SamplerOptions& options,
                                                std::uint64_t rng_seed);

// Masks each sampled node with an incident edge and asks for it back from
// the other endpoint of its latest edge. Throws kEmptyGraph.
std::vector<PretrainSample> GenerateNodeSamples(const SessionGraph& g,
                                                const SampleOrigin& origin,
                                                const SamplerOptions& options,
                                                std::uint64_t rng_seed);

// For each sampled click edge, the with-history and history-free prompts
// for regenerating the clicked document. Throws kNoClickEdges.
std::vector<PretrainSample> GenerateContrastiveSamples(
    const SessionGraph& g, const SampleOrigin& origin,
    const SamplerOptions& options, std::uint64_t rng_seed);

nlohmann::json SampleToJson(const PretrainSample& sample);
// Throws kMalformedRecord.
PretrainSample SampleFromJson(const nlohmann::json& j);

}  // namespace sgr

#endif  // SGR_PRETRAIN_H_
