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

#ifndef SGR_REMOTE_SCORER_H_
#define SGR_REMOTE_SCORER_H_

#include <atomic>
#include <cstddef>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>

#include "json.hpp"
#include "sgr/scorer.h"

namespace sgr {

// Scores prompts against a completions-style HTTP endpoint.
//
// Request body (identical across retries):
//   {"model": ..., "prompt": ..., "max_tokens": n, "logprobs": true,
//    "echo": bool}
// Answers use max_tokens 1 without echo and read the yes/no entries of
// choices[0].logprobs.top_logprobs[0]. Continuations send prompt + " " +
// target with max_tokens 0 and echo, and keep the echoed tokens whose
// text_offset is at or past the end of the prompt.
//
// Connection failures, timeouts, 429 and 5xx responses are retried up to
// max_retries times with exponential backoff; other failures are not.
class RemoteScorer : public Scorer {
 public:
  explicit RemoteScorer(ScorerConfig config);
  ~RemoteScorer() override;

  AnswerScore ScoreAnswer(std::string_view prompt) override;
  ContinuationScore ScoreContinuation(std::string_view prompt,
                                      std::string_view target) override;

  // Requests sent, counting retries.
  std::size_t attempts() const { return attempts_.load(); }

  nlohmann::json AnswerRequest(std::string_view prompt) const;
  nlohmann::json ContinuationRequest(std::string_view prompt,
                                     std::string_view target) const;

 private:
  nlohmann::json Post(const nlohmann::json& body);

  ScorerConfig config_;
  std::string host_;
  int port_ = 80;
  std::string path_;
  std::string bearer_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
  std::atomic<std::size_t> attempts_{0};
};

}  // namespace sgr

#endif  // SGR_REMOTE_SCORER_H_
