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

#ifndef SGR_SESSION_H_
#define SGR_SESSION_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sgr/error.h"

namespace sgr {

struct Document {
  std::string doc_id;
  std::string text;
  int click = 0;

  bool operator==(const Document&) const = default;
};

struct Query {
  std::string query_id;
  std::string text;
  std::int64_t timestamp = 0;
  std::vector<Document> candidates;

  bool operator==(const Query&) const = default;
};

struct Session {
  std::string session_id;
  std::vector<Query> queries;

  bool operator==(const Session&) const = default;
};

// One historical step: the query and the documents clicked for it, in
// candidate order.
struct HistoryStep {
  Query query;
  std::vector<Document> clicked;
};

// Everything visible when ranking the candidates of query `step` (1-based).
struct SessionContext {
  std::string session_id;
  int step = 1;
  std::vector<HistoryStep> history;
  Query current_query;
};

struct CorpusStats {
  std::size_t session_count = 0;
  std::size_t query_count = 0;
  double avg_queries_per_session = 0;
  double avg_docs_per_query = 0;
  double avg_query_len_tokens = 0;
  double avg_doc_len_tokens = 0;
  double avg_clicks_per_query = 0;
};

struct LineError {
  std::size_t line = 0;  // 1-based
  ErrorCode code;
  std::string reason;
};

struct ParseResult {
  std::vector<Session> sessions;
  std::vector<LineError> errors;
};

// Parses and validates a single JSONL record. Throws Error.
Session ParseSessionRecord(std::string_view line);

// Reads a whole JSONL stream. Blank lines are skipped; malformed lines are
// reported in `errors` and do not stop the stream.
ParseResult ParseSessionLog(std::istream& in);

// Checks the Session invariants, throwing Error on the first violation.
void ValidateSession(const Session& session);

nlohmann::json SessionToJson(const Session& session);

// One canonical JSONL line, without the trailing newline.
std::string SerializeSessionRecord(const Session& session);

// Context for query `step` (1-based). Throws kStepOutOfRange.
SessionContext MakeContext(const Session& session, int step);

// Throws kEmptyCorpus on an empty list.
CorpusStats ComputeStats(std::span<const Session> sessions);

nlohmann::json StatsToJson(const CorpusStats& stats);

}  // namespace sgr

#endif  // SGR_SESSION_H_
