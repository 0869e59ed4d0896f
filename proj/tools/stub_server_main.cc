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

// Replays scripted completions for offline runs of `sgr rank --scorer remote`.

#include <csignal>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "sgr/error.h"
#include "sgr/stub_server.h"

namespace {
sgr::StubCompletionServer* g_server = nullptr;
void OnSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scripted completions endpoint", "sgr_stub_server"};
  std::string script_path, host = "127.0.0.1", path = "/v1/completions";
  int port = 8000;
  app.add_option("--script", script_path, "Script JSONL")->required()->check(CLI::ExistingFile);
  app.add_option("--host", host, "Bind address")->capture_default_str();
  app.add_option("--port", port, "Port (0 picks one)")->capture_default_str();
  app.add_option("--path", path, "Endpoint path")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(script_path);
    sgr::StubCompletionServer server(sgr::LoadStubScript(in), path);
    g_server = &server;
    std::signal(SIGINT, OnSignal);
    std::signal(SIGTERM, OnSignal);
    const int bound = server.Start(host, port);
    std::cout << "listening on http://" << host << ":" << bound << path << std::endl;
    server.Wait();
  } catch (const sgr::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
