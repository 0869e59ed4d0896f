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

#ifndef SGR_STUB_SERVER_H_
#define SGR_STUB_SERVER_H_

#include <cstddef>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace sgr {

// One scripted reply, keyed by PromptHash() of the request's prompt field.
//
// Fixture lines (JSONL) look like
//   {"prompt_hash": "0123456789abcdef", "top_logprobs": {"yes": -0.1, "no": -2.3}}
//   {"prompt": "...", "target_tokens": [" (d1,", " x)"], "target_logprobs": [-0.1, -0.2]}
// "prompt" may replace "prompt_hash". Optional "delay_ms" delays every
// reply and "fail_times" answers the first n requests with HTTP 503.
struct StubEntry {
  std::string prompt_hash;
  std::map<std::string, double> top_logprobs;
  std::vector<std::string> target_tokens;
  std::vector<double> target_logprobs;
  int delay_ms = 0;
  int fail_times = 0;
};

// Throws Error(kMalformedRecord) with the line number.
std::vector<StubEntry> LoadStubScript(std::istream& in);

// Completions endpoint that replays a script, for tests and offline
// replays. Unknown prompts get HTTP 404.
class StubCompletionServer {
 public:
  explicit StubCompletionServer(std::vector<StubEntry> script,
                                std::string path = "/v1/completions");
  ~StubCompletionServer();

  StubCompletionServer(const StubCompletionServer&) = delete;
  StubCompletionServer& operator=(const StubCompletionServer&) = delete;

  // Binds to host:port (port 0 picks a free one) and serves on a
  // background thread. Returns the bound port.
  int Start(const std::string& host = "127.0.0.1", int port = 0);
  void Stop();

  // Blocks until Stop() is called from another thread or a signal handler.
  void Wait();

  std::size_t requests() const;
  std::size_t requests_for(const std::string& prompt_hash) const;
  // Raw request bodies in arrival order.
  std::vector<std::string> bodies() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sgr

#endif  // SGR_STUB_SERVER_H_
