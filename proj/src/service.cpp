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

#include "kgnav/service.hpp"

#include <random>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "kgnav/errors.hpp"
#include "kgnav/serialization.hpp"

namespace kgnav {

using nlohmann::json;

namespace {

std::string incident_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

ServiceReply bad_request(const std::string& reason) {
  return {400, {{"schema", kRecordSchema}, {"error", reason}}};
}

}  // namespace

ServiceReply handle_answer(const Runtime& runtime, const std::string& body) {
  const json request = json::parse(body, nullptr, false);
  if (request.is_discarded() || !request.is_object()) {
    return bad_request("body must be a JSON object");
  }
  auto q = request.find("question");
  if (q == request.end() || !q->is_string() || q->get_ref<const std::string&>().empty()) {
    return bad_request("missing string field 'question'");
  }

  EngineConfig config = runtime.config().engine;
  if (auto o = request.find("overrides"); o != request.end() && !o->is_null()) {
    try {
      apply_engine_overrides(config, *o);
    } catch (const ConfigError& e) {
      return bad_request(e.what());
    }
  }

  try {
    const Engine engine = runtime.engine(config);
    const AnswerRecord record = engine.run(q->get<std::string>());
    return {200, to_json(record, runtime.graph())};
  } catch (const std::exception& e) {
    const std::string id = incident_id();
    spdlog::error("answer request {} failed: {}", id, e.what());
    return {500, {{"schema", kRecordSchema}, {"error", "internal error"}, {"id", id}}};
  }
}

AnswerService::AnswerService(Loader loader, ServiceOptions options)
    : loader_(std::move(loader)),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  const size_t workers = std::max<size_t>(options_.max_concurrency, 1);
  server_->new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
  install_routes();
}

AnswerService::~AnswerService() {
  stop();
  if (load_thread_.joinable()) load_thread_.join();
}

void AnswerService::install_routes() {
  auto send = [](httplib::Response& res, const ServiceReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  };

  server_->Get("/healthz", [this, send](const httplib::Request&, httplib::Response& res) {
    if (ready()) {
      send(res, {200, {{"status", "ok"}}});
    } else {
      send(res, {503, {{"status", load_failed() ? "load failed" : "loading"}}});
    }
  });

  server_->Post("/answer", [this, send](const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<const Runtime> runtime;
    {
      std::lock_guard lock(mu_);
      runtime = runtime_;
    }
    if (!runtime) {
      send(res, {503, {{"schema", kRecordSchema}, {"error", "stores not loaded"}}});
      return;
    }
    send(res, handle_answer(*runtime, req.body));
  });
}

int AnswerService::start() {
  int port = options_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(options_.host);
  } else if (!server_->bind_to_port(options_.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error("cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }

  load_thread_ = std::thread([this] {
    try {
      auto runtime = loader_();
      {
        std::lock_guard lock(mu_);
        runtime_ = std::move(runtime);
      }
      ready_ = true;
      spdlog::info("stores loaded; ready");
    } catch (const std::exception& e) {
      load_failed_ = true;
      spdlog::error("failed to load stores: {}", e.what());
    }
  });
  return port;
}

void AnswerService::serve() { server_->listen_after_bind(); }

void AnswerService::stop() {
  if (server_) server_->stop();
}

}  // namespace kgnav
