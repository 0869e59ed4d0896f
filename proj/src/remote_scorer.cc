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

#include "sgr/remote_scorer.h"

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "sgr/text_util.h"

namespace sgr {
namespace {

struct SlotGuard {
  explicit SlotGuard(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
  ~SlotGuard() { sem.release(); }
  std::counting_semaphore<>& sem;
};

[[noreturn]] void Protocol(const std::string& what) {
  throw Error(ErrorCode::kRemoteProtocolError, what);
}

const nlohmann::json& LogprobsOf(const nlohmann::json& response) {
  if (!response.is_object() || !response.contains("choices") ||
      !response["choices"].is_array() || response["choices"].empty()) {
    Protocol("response has no choices");
  }
  const auto& choice = response["choices"][0];
  if (!choice.is_object() || !choice.contains("logprobs") ||
      !choice["logprobs"].is_object()) {
    Protocol("choice has no logprobs object");
  }
  return choice["logprobs"];
}

}  // namespace

RemoteScorer::RemoteScorer(ScorerConfig config) : config_(std::move(config)) {
  ValidateScorerConfig(config_);
  std::string rest = config_.endpoint.substr(std::string("http://").size());
  const std::size_t slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  const std::size_t colon = authority.rfind(':');
  if (colon != std::string::npos) {
    host_ = authority.substr(0, colon);
    try {
      port_ = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidConfig, "bad port in " + config_.endpoint);
    }
  } else {
    host_ = authority;
  }
  if (host_.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "no host in " + config_.endpoint);
  }
  if (const char* key = std::getenv(config_.api_key_env.c_str())) bearer_ = key;
  in_flight_ = std::make_unique<std::counting_semaphore<>>(config_.max_in_flight);
}

RemoteScorer::~RemoteScorer() = default;

nlohmann::json RemoteScorer::AnswerRequest(std::string_view prompt) const {
  return {{"model", config_.model},
          {"prompt", std::string(prompt)},
          {"max_tokens", 1},
          {"logprobs", true},
          {"echo", false}};
}

nlohmann::json RemoteScorer::ContinuationRequest(std::string_view prompt,
                                                 std::string_view target) const {
  return {{"model", config_.model},
          {"prompt", std::string(prompt) + " " + std::string(target)},
          {"max_tokens", 0},
          {"logprobs", true},
          {"echo", true}};
}

nlohmann::json RemoteScorer::Post(const nlohmann::json& body) {
  const std::string payload = body.dump();
  SlotGuard slot(*in_flight_);
  std::string last_failure;
  bool last_was_transport = true;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<long long>(config_.backoff_ms)
                                    << (attempt - 1)));
    }
    ++attempts_;
    httplib::Client client(host_, port_);
    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!bearer_.empty()) headers.emplace("Authorization", "Bearer " + bearer_);
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      last_was_transport = true;
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      last_was_transport = false;
      continue;
    }
    if (res->status != 200) {
      Protocol("HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      Protocol(std::string("response is not JSON: ") + e.what());
    }
  }
  const std::string what = "gave up after " +
                           std::to_string(config_.max_retries + 1) +
                           " attempts; last failure: " + last_failure;
  throw Error(last_was_transport ? ErrorCode::kRemoteTimeout
                                 : ErrorCode::kRemoteProtocolError,
              what);
}

AnswerScore RemoteScorer::ScoreAnswer(std::string_view prompt) {
  if (prompt.empty()) throw Error(ErrorCode::kInvalidArgument, "empty prompt");
  const nlohmann::json response = Post(AnswerRequest(prompt));
  const auto& lp = LogprobsOf(response);
  if (!lp.contains("top_logprobs") || !lp["top_logprobs"].is_array() ||
      lp["top_logprobs"].empty() || !lp["top_logprobs"][0].is_object()) {
    Protocol("logprobs.top_logprobs[0] missing");
  }
  const auto& top = lp["top_logprobs"][0];
  const auto read = [&](const std::string& token) {
    auto it = top.find(token);
    if (it == top.end()) {
      throw Error(ErrorCode::kTokenNotInVocabulary,
                  "endpoint reported no logprob for token \"" + token + "\"");
    }
    if (!it->is_number()) Protocol("logprob for \"" + token + "\" is not a number");
    return it->get<double>();
  };
  const double yes = read(config_.yes_token);
  const double no = read(config_.no_token);
  return MakeAnswerScore(yes, no);
}

ContinuationScore RemoteScorer::ScoreContinuation(std::string_view prompt,
                                                  std::string_view target) {
  if (Tokenize(target).empty()) {
    throw Error(ErrorCode::kInvalidTarget, "target has no tokens");
  }
  const nlohmann::json response = Post(ContinuationRequest(prompt, target));
  const auto& lp = LogprobsOf(response);
  if (!lp.contains("token_logprobs") || !lp.contains("text_offset") ||
      !lp["token_logprobs"].is_array() || !lp["text_offset"].is_array() ||
      lp["token_logprobs"].size() != lp["text_offset"].size()) {
    Protocol("echo response needs aligned token_logprobs and text_offset");
  }
  std::vector<double> out;
  const auto& values = lp["token_logprobs"];
  const auto& offsets = lp["text_offset"];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!offsets[i].is_number_integer()) Protocol("text_offset must be integers");
    if (offsets[i].get<long long>() < static_cast<long long>(prompt.size())) continue;
    if (!values[i].is_number()) Protocol("target token without a logprob");
    out.push_back(values[i].get<double>());
  }
  if (out.empty()) Protocol("no echoed tokens cover the target");
  try {
    return MakeContinuationScore(std::move(out));
  } catch (const Error& e) {
    Protocol(e.what());
  }
}

}  // namespace sgr
