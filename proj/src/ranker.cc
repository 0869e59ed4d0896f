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

#include "sgr/ranker.h"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <optional>
#include <set>
#include <unordered_map>

#include "sgr/graph.h"
#include "sgr/text_util.h"

namespace sgr {

std::string QueryKey(std::string_view session_id, int step) {
  return std::string(session_id) + "." + std::to_string(step);
}

std::vector<SymbolicText> BuildRankPrompts(const SessionContext& ctx,
                                           const RankOptions& options) {
  const SessionGraph g = BuildGraph(ctx);
  const SymbolicText graph_text = TruncateGraphText(g, options.budget);
  const Node& query = g.node({NodeType::kQuery, ctx.step});

  std::unordered_map<std::string_view, const Node*> known;
  for (const Node& n : g.nodes()) {
    if (n.key.type == NodeType::kDocument) known.emplace(n.source_id, &n);
  }
  int next_index = g.MaxDocumentIndex();
  std::vector<SymbolicText> prompts;
  prompts.reserve(ctx.current_query.candidates.size());
  for (const Document& d : ctx.current_query.candidates) {
    Node candidate;
    auto it = known.find(d.doc_id);
    if (it != known.end()) {
      candidate = *it->second;
    } else {
      candidate = {{NodeType::kDocument, ++next_index}, d.text, d.doc_id};
    }
    prompts.push_back(AssemblePrompt(options.prompt_template, graph_text,
                                     FullClause(query, EdgeType::kClickOn, candidate)));
  }
  return prompts;
}

void SortRankedEntries(std::vector<RankedEntry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.doc_id > b.doc_id;
            });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i].rank = static_cast<int>(i + 1);
  }
}

RankedList RankCandidates(const SessionContext& ctx, Scorer& scorer,
                          const RankOptions& options) {
  const auto& candidates = ctx.current_query.candidates;
  if (candidates.empty()) {
    throw Error(ErrorCode::kEmptyCandidates,
                "query " + QueryKey(ctx.session_id, ctx.step) + " has no candidates");
  }
  const std::vector<SymbolicText> prompts = BuildRankPrompts(ctx, options);
  std::vector<std::optional<double>> scores(prompts.size());
  std::vector<std::exception_ptr> errors(prompts.size());
  ParallelFor(prompts.size(), options.candidate_jobs, [&](std::size_t i) {
    try {
      const AnswerScore a = scorer.ScoreAnswer(prompts[i].text);
      scores[i] = options.score_field == ScoreField::kProbYes ? a.prob_yes
                                                              : a.yes_logit;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  RankedList list;
  list.query_key = QueryKey(ctx.session_id, ctx.step);
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    if (errors[i]) {
      if (options.failure_policy == FailurePolicy::kFailQuery) {
        std::rethrow_exception(errors[i]);
      }
      continue;
    }
    list.entries.push_back({candidates[i].doc_id, *scores[i], 0});
  }
  SortRankedEntries(list.entries);
  return list;
}

std::string EmitRunFile(std::span<const RankedList> lists, std::string_view tag) {
  if (tag.empty() || Tokenize(tag).size() != 1 || Tokenize(tag)[0] != tag) {
    throw Error(ErrorCode::kInvalidArgument, "run tag must be one non-empty word");
  }
  std::set<std::string_view> keys;
  std::string out;
  char score[64];
  for (const RankedList& list : lists) {
    if (!keys.insert(list.query_key).second) {
      throw Error(ErrorCode::kDuplicateQueryKey, list.query_key);
    }
    for (const RankedEntry& e : list.entries) {
      std::snprintf(score, sizeof(score), "%.6f", e.score);
      out += list.query_key;
      out += " Q0 ";
      out += e.doc_id;
      out += ' ';
      out += std::to_string(e.rank);
      out += ' ';
      out += score;
      out += ' ';
      out += tag;
      out += '\n';
    }
  }
  return out;
}

std::vector<RankedList> ParseRankedLists(std::string_view run_text) {
  const Run run = ParseRun(run_text);
  std::vector<RankedList> out;
  for (const auto& key : run.query_order) {
    RankedList list;
    list.query_key = key;
    for (const RunEntry& e : run.entries.at(key)) {
      list.entries.push_back({e.doc_id, e.score, e.rank});
    }
    out.push_back(std::move(list));
  }
  return out;
}

std::string EmitQrels(std::span<const SessionContext> contexts) {
  std::string out;
  for (const SessionContext& ctx : contexts) {
    const std::string key = QueryKey(ctx.session_id, ctx.step);
    for (const Document& d : ctx.current_query.candidates) {
      out += key + " 0 " + d.doc_id + " " + std::to_string(d.click) + "\n";
    }
  }
  return out;
}

std::string_view LengthBucketName(LengthBucket bucket) {
  switch (bucket) {
    case LengthBucket::kShort: return "short";
    case LengthBucket::kMedium: return "medium";
    case LengthBucket::kLong: return "long";
  }
  return "short";
}

LengthBucket BucketForLength(int length) {
  if (length < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "session length must be at least 1, got " + std::to_string(length));
  }
  if (length <= 2) return LengthBucket::kShort;
  if (length <= 4) return LengthBucket::kMedium;
  return LengthBucket::kLong;
}

BucketPartition BucketByLength(std::span<const std::pair<std::string, int>> items) {
  BucketPartition p;
  for (const auto& [key, length] : items) {
    switch (BucketForLength(length)) {
      case LengthBucket::kShort: p.short_keys.push_back(key); break;
      case LengthBucket::kMedium: p.medium_keys.push_back(key); break;
      case LengthBucket::kLong: p.long_keys.push_back(key); break;
    }
  }
  return p;
}

}  // namespace sgr
