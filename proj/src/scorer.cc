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

#include "sgr/scorer.h"

#include <cmath>
#include <set>
#include <string>
#include <unordered_set>

#include "sgr/grammar.h"
#include "sgr/text_util.h"

namespace sgr {
namespace {

// Query and document texts of the prompt's last clause, if it parses as a
// full clause.
bool LastClauseTexts(std::string_view prompt, std::string* src,
                     std::string* dst) {
  try {
    EdgeClause c = ParseClause(SplitPrompt(prompt).clause);
    if (!c.dst) return false;
    *src = std::move(c.src.text);
    *dst = std::move(c.dst->text);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void RequirePrompt(std::string_view prompt) {
  if (prompt.empty()) throw Error(ErrorCode::kInvalidArgument, "empty prompt");
}

}  // namespace

AnswerScore MakeAnswerScore(double yes_logit, double no_logit) {
  AnswerScore s{yes_logit, no_logit, 0.5};
  const double d = yes_logit - no_logit;
  if (d >= 0) {
    s.prob_yes = 1.0 / (1.0 + std::exp(-d));
  } else {
    const double e = std::exp(d);
    s.prob_yes = e / (1.0 + e);
  }
  return s;
}

ContinuationScore MakeContinuationScore(std::vector<double> token_logprobs) {
  ContinuationScore s;
  for (double lp : token_logprobs) {
    if (!std::isfinite(lp) || lp > 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "token logprob must be finite and <= 0, got " +
                      std::to_string(lp));
    }
    s.total += lp;
  }
  s.token_logprobs = std::move(token_logprobs);
  return s;
}

std::string_view ScorerKindName(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::kMock: return "mock";
    case ScorerKind::kBm25: return "bm25";
    case ScorerKind::kRemote: return "remote";
  }
  return "mock";
}

ScorerKind ParseScorerKind(std::string_view name) {
  if (name == "mock") return ScorerKind::kMock;
  if (name == "bm25") return ScorerKind::kBm25;
  if (name == "remote") return ScorerKind::kRemote;
  throw Error(ErrorCode::kInvalidConfig, "unknown scorer " + std::string(name));
}

void ValidateScorerConfig(const ScorerConfig& c) {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  if (c.timeout_ms <= 0) fail("timeout_ms must be positive");
  if (c.max_retries <= 0) fail("max_retries must be positive");
  if (c.max_in_flight <= 0) fail("max_in_flight must be positive");
  if (c.backoff_ms < 0) fail("backoff_ms must be non-negative");
  if (!(c.k1 > 0)) fail("k1 must be positive");
  if (!(c.b >= 0 && c.b <= 1)) fail("b must lie in [0, 1]");
  if (c.mock_vocab_size == 0) fail("mock_vocab_size must be positive");
  if (c.yes_token.empty() || c.no_token.empty()) fail("yes/no tokens must be set");
  if (c.kind == ScorerKind::kRemote && c.endpoint.rfind("http://", 0) != 0) {
    fail("endpoint must be an http:// URL");
  }
}

ScorerConfig ScorerConfigFromJson(const nlohmann::json& j, ScorerConfig c) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidConfig, "config must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "kind") c.kind = ParseScorerKind(value.get<std::string>());
      else if (key == "endpoint") c.endpoint = value.get<std::string>();
      else if (key == "model") c.model = value.get<std::string>();
      else if (key == "timeout_ms") c.timeout_ms = value.get<int>();
      else if (key == "max_retries") c.max_retries = value.get<int>();
      else if (key == "max_in_flight") c.max_in_flight = value.get<int>();
      else if (key == "backoff_ms") c.backoff_ms = value.get<int>();
      else if (key == "yes_token") c.yes_token = value.get<std::string>();
      else if (key == "no_token") c.no_token = value.get<std::string>();
      else if (key == "api_key_env") c.api_key_env = value.get<std::string>();
      else if (key == "k1") c.k1 = value.get<double>();
      else if (key == "b") c.b = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "mock_vocab_size") c.mock_vocab_size = value.get<std::size_t>();
      else throw Error(ErrorCode::kInvalidConfig, "unknown config key " + key);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidConfig, "bad value for " + key + ": " + e.what());
    }
  }
  ValidateScorerConfig(c);
  return c;
}

ContinuationScore UnigramContinuation(std::string_view prompt,
                                      std::string_view target,
                                      std::size_t vocab_size) {
  const std::vector<std::string> target_tokens = Tokenize(target);
  if (target_tokens.empty()) {
    throw Error(ErrorCode::kInvalidTarget, "target has no tokens");
  }
  const std::vector<std::string> history = Tokenize(SplitPrompt(prompt).graph_text);
  std::unordered_map<std::string_view, std::size_t> counts;
  for (const std::string& t : history) ++counts[t];
  const double denom = static_cast<double>(history.size() + vocab_size);
  std::vector<double> lps;
  lps.reserve(target_tokens.size());
  for (const std::string& t : target_tokens) {
    auto it = counts.find(t);
    const double count = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    lps.push_back(std::log((count + 1.0) / denom));
  }
  return MakeContinuationScore(std::move(lps));
}

MockScorer::MockScorer(std::uint64_t seed, std::size_t vocab_size)
    : seed_(seed), vocab_size_(vocab_size) {}

AnswerScore MockScorer::ScoreAnswer(std::string_view prompt) {
  RequirePrompt(prompt);
  double jaccard = 0;
  std::string src, dst;
  if (LastClauseTexts(prompt, &src, &dst)) {
    const auto a = Tokenize(src);
    const auto b = Tokenize(dst);
    const std::set<std::string> sa(a.begin(), a.end());
    const std::set<std::string> sb(b.begin(), b.end());
    std::size_t common = 0;
    for (const auto& t : sa) common += sb.count(t);
    const std::size_t uni = sa.size() + sb.size() - common;
    if (uni > 0) jaccard = static_cast<double>(common) / static_cast<double>(uni);
  }
  const std::uint64_t h = MixSeed(Fnv1a64(prompt, MixSeed(seed_)));
  const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;
  const double noise = (unit * 2.0 - 1.0) * 0.01;
  return MakeAnswerScore(4.0 * jaccard - 2.0 + noise, 0.0);
}

ContinuationScore MockScorer::ScoreContinuation(std::string_view prompt,
                                                std::string_view target) {
  return UnigramContinuation(prompt, target, vocab_size_);
}

Bm25Stats BuildBm25Stats(std::span<const std::vector<std::string>> docs) {
  Bm25Stats stats;
  std::size_t total_len = 0;
  for (const auto& doc : docs) {
    ++stats.doc_count;
    total_len += doc.size();
    std::unordered_set<std::string_view> seen;
    for (const std::string& t : doc) {
      if (seen.insert(t).second) ++stats.df[t];
    }
  }
  if (stats.doc_count > 0) {
    stats.avgdl = static_cast<double>(total_len) / static_cast<double>(stats.doc_count);
  }
  return stats;
}

Bm25Stats BuildBm25Stats(std::span<const Session> sessions) {
  std::vector<std::vector<std::string>> docs;
  std::unordered_set<std::string> seen;
  for (const Session& s : sessions) {
    for (const Query& q : s.queries) {
      for (const Document& d : q.candidates) {
        if (seen.insert(d.doc_id).second) docs.push_back(Tokenize(d.text));
      }
    }
  }
  return BuildBm25Stats(docs);
}

double Bm25Score(std::span<const std::string> query_tokens,
                 std::span<const std::string> doc_tokens,
                 const Bm25Stats& stats, double k1, double b) {
  if (stats.doc_count == 0 || !(stats.avgdl > 0)) {
    throw Error(ErrorCode::kEmptyCorpusStats, "BM25 needs N > 0 and avgdl > 0");
  }
  std::unordered_map<std::string_view, std::size_t> tf;
  for (const std::string& t : doc_tokens) ++tf[t];
  const double n = static_cast<double>(stats.doc_count);
  const double dl = static_cast<double>(doc_tokens.size());
  const double norm = k1 * (1.0 - b + b * dl / stats.avgdl);
  double score = 0;
  for (const std::string& t : query_tokens) {
    auto it = tf.find(t);
    if (it == tf.end()) continue;
    auto df_it = stats.df.find(t);
    const double df = df_it == stats.df.end() ? 0.0 : static_cast<double>(df_it->second);
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    const double f = static_cast<double>(it->second);
    score += idf * f * (k1 + 1.0) / (f + norm);
  }
  return score;
}

Bm25Scorer::Bm25Scorer(Bm25Stats stats, double k1, double b,
                       std::size_t vocab_size)
    : stats_(std::move(stats)), k1_(k1), b_(b), vocab_size_(vocab_size) {
  if (stats_.doc_count == 0 || !(stats_.avgdl > 0)) {
    throw Error(ErrorCode::kEmptyCorpusStats, "BM25 needs N > 0 and avgdl > 0");
  }
}

AnswerScore Bm25Scorer::ScoreAnswer(std::string_view prompt) {
  RequirePrompt(prompt);
  std::string src, dst;
  double s = 0;
  if (LastClauseTexts(prompt, &src, &dst)) {
    s = Bm25Score(Tokenize(src), Tokenize(dst), stats_, k1_, b_);
  }
  return MakeAnswerScore(4.0 * s / (1.0 + s) - 2.0, 0.0);
}

ContinuationScore Bm25Scorer::ScoreContinuation(std::string_view prompt,
                                                std::string_view target) {
  return UnigramContinuation(prompt, target, vocab_size_);
}

}  // namespace sgr
