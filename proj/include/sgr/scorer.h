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

#ifndef SGR_SCORER_H_
#define SGR_SCORER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "sgr/session.h"

namespace sgr {

struct AnswerScore {
  double yes_logit = 0;
  double no_logit = 0;
  // Two-way softmax over (yes, no).
  double prob_yes = 0.5;
};

// Builds an AnswerScore with prob_yes computed without overflow.
AnswerScore MakeAnswerScore(double yes_logit, double no_logit);

struct ContinuationScore {
  std::vector<double> token_logprobs;
  double total = 0;
};

// Throws kInvalidArgument if any entry is positive or not finite.
ContinuationScore MakeContinuationScore(std::vector<double> token_logprobs);

// Yes/no answer evidence and target log-likelihoods for assembled prompts.
// Implementations must tolerate concurrent calls.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual AnswerScore ScoreAnswer(std::string_view prompt) = 0;
  virtual ContinuationScore ScoreContinuation(std::string_view prompt,
                                              std::string_view target) = 0;
};

enum class ScorerKind { kMock, kBm25, kRemote };

struct ScorerConfig {
  ScorerKind kind = ScorerKind::kMock;

  // Remote.
  std::string endpoint = "http://127.0.0.1:8000/v1/completions";
  std::string model = "sgr";
  int timeout_ms = 10000;
  int max_retries = 3;
  int max_in_flight = 4;
  int backoff_ms = 100;
  std::string yes_token = "yes";
  std::string no_token = "no";
  // Name of the environment variable holding the bearer token.
  std::string api_key_env = "SGR_API_KEY";

  // BM25.
  double k1 = 1.2;
  double b = 0.75;

  // Mock.
  std::uint64_t seed = 0;
  std::size_t mock_vocab_size = 50000;
};

std::string_view ScorerKindName(ScorerKind kind);
// Throws kInvalidConfig for names other than mock, bm25, remote.
ScorerKind ParseScorerKind(std::string_view name);

// Throws kInvalidConfig when an invariant does not hold.
void ValidateScorerConfig(const ScorerConfig& config);

// Overlays the keys of a JSON config object on `base`. Unknown keys and
// wrongly typed values throw kInvalidConfig.
ScorerConfig ScorerConfigFromJson(const nlohmann::json& j, ScorerConfig base = {});

// Synthetic unigram model used by the offline scorers: the graph line of
// the prompt is the history, each target token gets
// log((count + 1) / (history_tokens + vocab_size)). Throws kInvalidTarget
// when the target has no tokens.
ContinuationScore UnigramContinuation(std::string_view prompt,
                                      std::string_view target,
                                      std::size_t vocab_size);

// Deterministic stand-in for a fine-tuned model. The yes logit is
// 4 * Jaccard(src tokens, dst tokens) - 2 over the prompt's last clause plus
// seeded noise in [-0.01, 0.01]; the no logit is 0.
class MockScorer : public Scorer {
 public:
  explicit MockScorer(std::uint64_t seed = 0, std::size_t vocab_size = 50000);

  AnswerScore ScoreAnswer(std::string_view prompt) override;
  ContinuationScore ScoreContinuation(std::string_view prompt,
                                      std::string_view target) override;

 private:
  std::uint64_t seed_;
  std::size_t vocab_size_;
};

struct Bm25Stats {
  std::size_t doc_count = 0;
  double avgdl = 0;
  std::unordered_map<std::string, std::size_t> df;
};

Bm25Stats BuildBm25Stats(std::span<const std::vector<std::string>> docs);

// Unique candidate documents (by doc_id) of a corpus, tokenized.
Bm25Stats BuildBm25Stats(std::span<const Session> sessions);

// Robertson BM25 with idf = ln(1 + (N - df + 0.5) / (df + 0.5)). Repeated
// query terms contribute once per occurrence. Throws kEmptyCorpusStats.
double Bm25Score(std::span<const std::string> query_tokens,
                 std::span<const std::string> doc_tokens,
                 const Bm25Stats& stats, double k1 = 1.2, double b = 0.75);

// BM25 between the last clause's query and document, squashed to a yes
// logit in [-2, 2) by 4 * s / (1 + s) - 2.
class Bm25Scorer : public Scorer {
 public:
  Bm25Scorer(Bm25Stats stats, double k1, double b,
             std::size_t vocab_size = 50000);

  AnswerScore ScoreAnswer(std::string_view prompt) override;
  ContinuationScore ScoreContinuation(std::string_view prompt,
                                      std::string_view target) override;

 private:
  Bm25Stats stats_;
  double k1_;
  double b_;
  std::size_t vocab_size_;
};

}  // namespace sgr

#endif  // SGR_SCORER_H_
