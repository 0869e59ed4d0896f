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

#ifndef SGR_RANKER_H_
#define SGR_RANKER_H_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgr/grammar.h"
#include "sgr/metrics.h"
#include "sgr/scorer.h"
#include "sgr/session.h"

namespace sgr {

struct RankedEntry {
  std::string doc_id;
  double score = 0;
  int rank = 0;

  bool operator==(const RankedEntry&) const = default;
};

struct RankedList {
  std::string query_key;
  std::vector<RankedEntry> entries;

  bool operator==(const RankedList&) const = default;
};

enum class ScoreField { kProbYes, kYesLogit };
enum class FailurePolicy {
  // A scorer error on any candidate fails the query.
  kFailQuery,
  // Failed candidates are left out of the list.
  kFailCandidate,
};

struct RankOptions {
  std::size_t budget = std::numeric_limits<std::size_t>::max();
  PromptTemplate prompt_template = DefaultTemplate(TaskKind::kRank);
  ScoreField score_field = ScoreField::kProbYes;
  FailurePolicy failure_policy = FailurePolicy::kFailQuery;
  // Concurrent scorer calls per query.
  int candidate_jobs = 1;
};

// "{session_id}.{step}".
std::string QueryKey(std::string_view session_id, int step);

// X_j for every candidate of the current query, in candidate order. Only the
// final node differs between prompts. Candidates already in the graph keep
// their index; new ones continue the document numbering in candidate order.
std::vector<SymbolicText> BuildRankPrompts(const SessionContext& ctx,
                                           const RankOptions& options);

// Sorts by score descending, doc_id descending on ties, and numbers ranks
// from 1.
void SortRankedEntries(std::vector<RankedEntry>& entries);

// Scores and sorts the current query's candidates. Throws
// kEmptyCandidates, or the scorer's error under kFailQuery.
RankedList RankCandidates(const SessionContext& ctx, Scorer& scorer,
                          const RankOptions& options = {});

// `{qkey} Q0 {doc_id} {rank} {score:.6f} {tag}` lines in list order.
// Throws kDuplicateQueryKey, or kInvalidArgument for a tag with whitespace.
std::string EmitRunFile(std::span<const RankedList> lists, std::string_view tag);

// Ranked lists in file order, ranks and scores as written. Throws
// kMalformedRunLine.
std::vector<RankedList> ParseRankedLists(std::string_view run_text);

// `{qkey} 0 {doc_id} {click}` for every candidate of each context.
std::string EmitQrels(std::span<const SessionContext> contexts);

enum class LengthBucket { kShort, kMedium, kLong };

std::string_view LengthBucketName(LengthBucket bucket);
// short: <= 2, medium: 3-4, long: >= 5. Throws kInvalidArgument below 1.
LengthBucket BucketForLength(int length);

struct BucketPartition {
  std::vector<std::string> short_keys;
  std::vector<std::string> medium_keys;
  std::vector<std::string> long_keys;
};

// Each (key, length) pair lands in exactly one bucket, input order kept.
BucketPartition BucketByLength(std::span<const std::pair<std::string, int>> items);

}  // namespace sgr

#endif  // SGR_RANKER_H_
