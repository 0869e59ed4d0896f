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

#include "sgr/session.h"

#include <string>
#include <unordered_set>

#include "sgr/text_util.h"

namespace sgr {
namespace {

using nlohmann::json;

const json& Field(const json& obj, const char* name, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) {
    throw Error(ErrorCode::kMissingField, where + "." + name);
  }
  return *it;
}

std::string StringField(const json& obj, const char* name,
                        const std::string& where, bool non_empty) {
  const json& v = Field(obj, name, where);
  if (!v.is_string()) {
    throw Error(ErrorCode::kMalformedRecord,
                where + "." + name + " must be a string");
  }
  std::string s = v.get<std::string>();
  if (non_empty && s.empty()) {
    throw Error(ErrorCode::kMissingField, where + "." + name + " is empty");
  }
  return s;
}

const json& ArrayField(const json& obj, const char* name,
                       const std::string& where) {
  const json& v = Field(obj, name, where);
  if (!v.is_array()) {
    throw Error(ErrorCode::kMalformedRecord,
                where + "." + name + " must be an array");
  }
  return v;
}

Document ParseDocument(const json& obj, const std::string& where) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::kMalformedRecord, where + " must be an object");
  }
  Document doc;
  doc.doc_id = StringField(obj, "doc_id", where, true);
  doc.text = StringField(obj, "text", where, false);
  const json& click = Field(obj, "click", where);
  if (!click.is_number_integer()) {
    throw Error(ErrorCode::kBadClickValue,
                where + ".click must be the integer 0 or 1, got " + click.dump());
  }
  const auto value = click.get<std::int64_t>();
  if (value != 0 && value != 1) {
    throw Error(ErrorCode::kBadClickValue,
                where + ".click must be 0 or 1, got " + std::to_string(value));
  }
  doc.click = static_cast<int>(value);
  return doc;
}

Query ParseQuery(const json& obj, const std::string& where) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::kMalformedRecord, where + " must be an object");
  }
  Query q;
  q.query_id = StringField(obj, "query_id", where, true);
  q.text = StringField(obj, "text", where, false);
  const json& ts = Field(obj, "timestamp", where);
  if (!ts.is_number_integer()) {
    throw Error(ErrorCode::kMalformedRecord,
                where + ".timestamp must be an integer");
  }
  q.timestamp = ts.get<std::int64_t>();
  const json& cands = ArrayField(obj, "candidates", where);
  q.candidates.reserve(cands.size());
  for (std::size_t j = 0; j < cands.size(); ++j) {
    q.candidates.push_back(
        ParseDocument(cands[j], where + ".candidates[" + std::to_string(j) + "]"));
  }
  return q;
}

}  // namespace

void ValidateSession(const Session& session) {
  if (session.session_id.empty()) {
    throw Error(ErrorCode::kMissingField, "session_id is empty");
  }
  if (session.queries.empty()) {
    throw Error(ErrorCode::kEmptySession,
                "session " + session.session_id + " has no queries");
  }
  for (std::size_t i = 0; i < session.queries.size(); ++i) {
    const Query& q = session.queries[i];
    if (q.query_id.empty()) {
      throw Error(ErrorCode::kMissingField,
                  "queries[" + std::to_string(i) + "].query_id is empty");
    }
    if (i > 0 && q.timestamp < session.queries[i - 1].timestamp) {
      throw Error(ErrorCode::kUnorderedTimestamps,
                  "queries[" + std::to_string(i) + "] timestamp " +
                      std::to_string(q.timestamp) + " precedes " +
                      std::to_string(session.queries[i - 1].timestamp));
    }
    std::unordered_set<std::string_view> seen;
    for (const Document& d : q.candidates) {
      if (d.doc_id.empty()) {
        throw Error(ErrorCode::kMissingField, "doc_id is empty");
      }
      if (d.click != 0 && d.click != 1) {
        throw Error(ErrorCode::kBadClickValue,
                    "click must be 0 or 1, got " + std::to_string(d.click));
      }
      if (!seen.insert(d.doc_id).second) {
        throw Error(ErrorCode::kDuplicateDocIdInQuery,
                    "doc_id " + d.doc_id + " repeats in query " + q.query_id);
      }
    }
  }
}

Session ParseSessionRecord(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedRecord, e.what());
  }
  if (!obj.is_object()) {
    throw Error(ErrorCode::kMalformedRecord, "record must be a JSON object");
  }
  Session s;
  s.session_id = StringField(obj, "session_id", "session", true);
  const json& queries = ArrayField(obj, "queries", "session");
  for (std::size_t i = 0; i < queries.size(); ++i) {
    s.queries.push_back(ParseQuery(queries[i], "queries[" + std::to_string(i) + "]"));
  }
  ValidateSession(s);
  return s;
}

ParseResult ParseSessionLog(std::istream& in) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      result.sessions.push_back(ParseSessionRecord(line));
    } catch (const Error& e) {
      result.errors.push_back({line_no, e.code(), e.what()});
    }
  }
  return result;
}

nlohmann::json SessionToJson(const Session& session) {
  json queries = json::array();
  for (const Query& q : session.queries) {
    json cands = json::array();
    for (const Document& d : q.candidates) {
      cands.push_back({{"doc_id", d.doc_id}, {"text", d.text}, {"click", d.click}});
    }
    queries.push_back({{"query_id", q.query_id},
                       {"text", q.text},
                       {"timestamp", q.timestamp},
                       {"candidates", std::move(cands)}});
  }
  return {{"session_id", session.session_id}, {"queries", std::move(queries)}};
}

std::string SerializeSessionRecord(const Session& session) {
  return SessionToJson(session).dump();
}

SessionContext MakeContext(const Session& session, int step) {
  const int m = static_cast<int>(session.queries.size());
  if (step < 1 || step > m) {
    throw Error(ErrorCode::kStepOutOfRange,
                "step " + std::to_string(step) + " outside 1.." +
                    std::to_string(m) + " for session " + session.session_id);
  }
  SessionContext ctx;
  ctx.session_id = session.session_id;
  ctx.step = step;
  ctx.history.reserve(step - 1);
  for (int j = 0; j + 1 < step; ++j) {
    HistoryStep h;
    h.query = session.queries[j];
    for (const Document& d : h.query.candidates) {
      if (d.click == 1) h.clicked.push_back(d);
    }
    ctx.history.push_back(std::move(h));
  }
  ctx.current_query = session.queries[step - 1];
  return ctx;
}

CorpusStats ComputeStats(std::span<const Session> sessions) {
  if (sessions.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no sessions");
  }
  CorpusStats stats;
  std::size_t docs = 0, query_tokens = 0, doc_tokens = 0, clicks = 0;
  for (const Session& s : sessions) {
    ++stats.session_count;
    for (const Query& q : s.queries) {
      ++stats.query_count;
      query_tokens += Tokenize(q.text).size();
      for (const Document& d : q.candidates) {
        ++docs;
        doc_tokens += Tokenize(d.text).size();
        clicks += d.click;
      }
    }
  }
  const auto mean = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  stats.avg_queries_per_session = mean(stats.query_count, stats.session_count);
  stats.avg_docs_per_query = mean(docs, stats.query_count);
  stats.avg_query_len_tokens = mean(query_tokens, stats.query_count);
  stats.avg_doc_len_tokens = mean(doc_tokens, docs);
  stats.avg_clicks_per_query = mean(clicks, stats.query_count);
  return stats;
}

nlohmann::json StatsToJson(const CorpusStats& stats) {
  return {{"session_count", stats.session_count},
          {"query_count", stats.query_count},
          {"avg_queries_per_session", stats.avg_queries_per_session},
          {"avg_docs_per_query", stats.avg_docs_per_query},
          {"avg_query_len_tokens", stats.avg_query_len_tokens},
          {"avg_doc_len_tokens", stats.avg_doc_len_tokens},
          {"avg_clicks_per_query", stats.avg_clicks_per_query}};
}

}  // namespace sgr
