// Copyright 2026 The kgnav Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "kgnav/config.hpp"

namespace httplib {
class Server;
}

namespace kgnav {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  size_t max_concurrency = 4;
};

struct ServiceReply {
  int status = 200;
  nlohmann::json body;
};

// Handles one POST /answer body against a loaded runtime. Bad input maps to
// 400; engine failures to 500 with an opaque id (details go to the log).
ServiceReply handle_answer(const Runtime& runtime, const std::string& body);

// Minimal HTTP front end:
//   GET  /healthz  200 once stores are loaded, 503 before
//   POST /answer   {"question": "...", "overrides": {...}}
// Stores load on a background thread so the health probe answers at once.
class AnswerService {
 public:
  using Loader = std::function<std::shared_ptr<Runtime>()>;

  AnswerService(Loader loader, ServiceOptions options);
  ~AnswerService();

  AnswerService(const AnswerService&) = delete;
  AnswerService& operator=(const AnswerService&) = delete;

  // Binds the socket and starts loading. Returns the bound port.
  int start();
  // Serves until stop(); in-flight requests finish before it returns.
  void serve();
  void stop();

  bool ready() const noexcept { return ready_.load(); }
  bool load_failed() const noexcept { return load_failed_.load(); }

 private:
  void install_routes();

  Loader loader_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread load_thread_;
  std::mutex mu_;
  std::shared_ptr<const Runtime> runtime_;
  std::atomic<bool> ready_{false};
  std::atomic<bool> load_failed_{false};
};

}  // namespace kgnav
