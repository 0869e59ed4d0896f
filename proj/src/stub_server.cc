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

#include "sgr/stub_server.h"

#include <chrono>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "sgr/error.h"
#include "sgr/text_util.h"

namespace sgr {

std::vector<StubEntry> LoadStubScript(std::istream& in) {
  std::vector<StubEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      StubEntry e;
      if (j.contains("prompt_hash")) {
        e.prompt_hash = j["prompt_hash"].get<std::string>();
      } else {
        e.prompt_hash = PromptHash(j.at("prompt").get<std::string>());
      }
      if (j.contains("top_logprobs")) {
        e.top_logprobs = j["top_logprobs"].get<std::map<std::string, double>>();
      }
      if (j.contains("target_tokens")) {
        e.target_tokens = j["target_tokens"].get<std::vector<std::string>>();
        e.target_logprobs = j.at("target_logprobs").get<std::vector<double>>();
        if (e.target_tokens.size() != e.target_logprobs.size()) {
          throw Error(ErrorCode::kMalformedRecord,
                      "target_tokens and target_logprobs differ in length");
        }
      }
      e.delay_ms = j.value("delay_ms", 0);
      e.fail_times = j.value("fail_times", 0);
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::kMalformedRecord,
                  "stub script line " + std::to_string(line_no) + ": " + ex.what());
    } catch (const Error& ex) {
      throw Error(ErrorCode::kMalformedRecord,
                  "stub script line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

struct StubCompletionServer::Impl {
  std::map<std::string, StubEntry> script;
  std::string path;
  httplib::Server server;
  std::thread thread;
  mutable std::mutex mu;
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> bodies;
  std::size_t total = 0;

  void Handle(const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error&) {
      res.status = 400;
      res.set_content(R"({"error":"body is not JSON"})", "application/json");
      return;
    }
    if (!body.contains("prompt") || !body["prompt"].is_string()) {
      res.status = 400;
      res.set_content(R"({"error":"missing prompt"})", "application/json");
      return;
    }
    const std::string prompt = body["prompt"].get<std::string>();
    const std::string hash = PromptHash(prompt);
    std::size_t seen;
    {
      std::lock_guard<std::mutex> lock(mu);
      ++total;
      seen = counts[hash]++;
      bodies.push_back(req.body);
    }
    auto it = script.find(hash);
    if (it == script.end()) {
      res.status = 404;
      res.set_content(nlohmann::json{{"error", "no scripted reply"},
                                     {"prompt_hash", hash}}
                          .dump(),
                      "application/json");
      return;
    }
    const StubEntry& e = it->second;
    if (e.delay_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(e.delay_ms));
    }
    if (static_cast<int>(seen) < e.fail_times) {
      res.status = 503;
      res.set_content(R"({"error":"scripted failure"})", "application/json");
      return;
    }
    nlohmann::json logprobs;
    if (body.value("echo", false)) {
      std::string suffix;
      for (const auto& t : e.target_tokens) suffix += t;
      if (suffix.empty() || suffix.size() > prompt.size() ||
          prompt.compare(prompt.size() - suffix.size(), suffix.size(), suffix) != 0) {
        res.status = 422;
        res.set_content(R"({"error":"target tokens do not end the prompt"})",
                        "application/json");
        return;
      }
      const std::size_t prefix_len = prompt.size() - suffix.size();
      nlohmann::json tokens = {prompt.substr(0, prefix_len)};
      nlohmann::json values = {nullptr};
      nlohmann::json offsets = {0};
      std::size_t offset = prefix_len;
      for (std::size_t i = 0; i < e.target_tokens.size(); ++i) {
        tokens.push_back(e.target_tokens[i]);
        values.push_back(e.target_logprobs[i]);
        offsets.push_back(offset);
        offset += e.target_tokens[i].size();
      }
      logprobs = {{"tokens", tokens},
                  {"token_logprobs", values},
                  {"text_offset", offsets},
                  {"top_logprobs", nullptr}};
    } else {
      std::string best;
      double best_lp = -1e300;
      for (const auto& [token, lp] : e.top_logprobs) {
        if (lp > best_lp) {
          best = token;
          best_lp = lp;
        }
      }
      logprobs = {{"tokens", {best}},
                  {"token_logprobs", {best_lp}},
                  {"text_offset", {prompt.size()}},
                  {"top_logprobs", {e.top_logprobs}}};
    }
    const nlohmann::json reply = {
        {"object", "text_completion"},
        {"model", body.value("model", "")},
        {"choices", {{{"index", 0}, {"text", ""}, {"logprobs", logprobs}}}}};
    res.set_content(reply.dump(), "application/json");
  }
};

StubCompletionServer::StubCompletionServer(std::vector<StubEntry> script,
                                           std::string path)
    : impl_(std::make_unique<Impl>()) {
  for (auto& e : script) {
    std::string key = e.prompt_hash;
    impl_->script[key] = std::move(e);
  }
  impl_->path = std::move(path);
  impl_->server.Post(impl_->path, [this](const httplib::Request& req,
                                         httplib::Response& res) {
    impl_->Handle(req, res);
  });
}

StubCompletionServer::~StubCompletionServer() { Stop(); }

int StubCompletionServer::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void StubCompletionServer::Stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void StubCompletionServer::Wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::size_t StubCompletionServer::requests() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->total;
}

std::size_t StubCompletionServer::requests_for(const std::string& hash) const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  auto it = impl_->counts.find(hash);
  return it == impl_->counts.end() ? 0 : it->second;
}

std::vector<std::string> StubCompletionServer::bodies() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->bodies;
}

}  // namespace sgr
