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

#include "kgnav/llm_gateway.hpp"

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "kgnav/errors.hpp"
#include "kgnav/hashing.hpp"
#include "kgnav/http_util.hpp"
#include "kgnav/prompts.hpp"

namespace kgnav {

using nlohmann::json;

std::string_view to_string(GenMode mode) noexcept {
  return mode == GenMode::kExploration ? "exploration" : "reasoning";
}

void GenConfig::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw ConfigError("temperature must lie in [0, 2]");
  }
  if (max_tokens <= 0) throw ConfigError("max_tokens must be positive");
}

// --- HTTP transport ---------------------------------------------------------

HttpChatTransport::HttpChatTransport(HttpChatOptions options)
    : options_(std::move(options)) {
  std::string url = options_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  auto parts = split_url(url + "/chat/completions");
  origin_ = std::move(parts.origin);
  path_ = std::move(parts.path);
  if (options_.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
}

json HttpChatTransport::request_body(const HttpChatOptions& options,
                                     const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  return {{"model", options.model},
          {"messages", std::move(messages)},
          {"temperature", request.gen.temperature},
          {"max_tokens", request.gen.max_tokens}};
}

ChatResponse HttpChatTransport::send(const ChatRequest& request) {
  const std::string body = request_body(options_, request).dump();
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }

  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);

  std::string last_error;
  auto backoff = options_.initial_backoff;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(origin_);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("chat endpoint returned HTTP " + std::to_string(res->status) +
                           ": " + res->body);
    }
    auto reply = json::parse(res->body, nullptr, false);
    try {
      const auto& choice = reply.at("choices").at(0);
      ChatResponse out;
      out.content = choice.at("message").at("content").get<std::string>();
      if (auto it = choice.find("finish_reason"); it != choice.end() && it->is_string()) {
        out.finish_reason = it->get<std::string>();
      }
      return out;
    } catch (const json::exception&) {
      throw TransportError("chat endpoint reply has no choices[0].message.content");
    }
  }
  throw TransportError("chat request failed after " +
                       std::to_string(options_.max_attempts) + " attempts (" +
                       last_error + ")");
}

// --- Scripted transport -----------------------------------------------------

std::shared_ptr<ScriptedTransport> ScriptedTransport::from_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read script " + path.string());
  auto doc = json::parse(in, nullptr, false);
  if (!doc.is_array()) throw LoadError("script must be a JSON array: " + path.string());
  std::vector<ScriptRule> rules;
  try {
    for (const auto& r : doc) {
      ScriptRule rule;
      if (r.contains("template")) rule.template_id = r["template"].get<std::string>();
      if (r.contains("contains")) {
        if (r["contains"].is_string()) {
          rule.contains.push_back(r["contains"].get<std::string>());
        } else {
          rule.contains = r["contains"].get<std::vector<std::string>>();
        }
      }
      rule.response = r.at("response").get<std::string>();
      rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw LoadError("bad script rule in " + path.string() + ": " + e.what());
  }
  return std::make_shared<ScriptedTransport>(std::move(rules));
}

ChatResponse ScriptedTransport::send(const ChatRequest& request) {
  const std::string_view prompt = task_section(request.messages.back().content);
  for (const auto& rule : rules_) {
    if (rule.template_id && *rule.template_id != request.template_id) continue;
    bool all = true;
    for (const auto& needle : rule.contains) {
      if (prompt.find(needle) == std::string::npos) {
        all = false;
        break;
      }
    }
    if (all) return {rule.response, "stop"};
  }
  throw TransportError("script has no rule for a " + request.template_id + " prompt");
}

// --- Transcripts ------------------------------------------------------------

namespace {

json to_json(const TranscriptRecord& r) {
  json j = {{"key", r.key},
            {"template_id", r.template_id},
            {"prompt_sha256", r.prompt_sha256},
            {"response", r.response}};
  if (r.truncated) j["truncated"] = true;
  return j;
}

}  // namespace

std::shared_ptr<TranscriptStore> TranscriptStore::in_memory() {
  return std::shared_ptr<TranscriptStore>(new TranscriptStore());
}

void TranscriptStore::read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read transcripts " + path.string());
  std::string line;
  size_t line_no = 0;
  std::vector<size_t> bad;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = json::parse(line, nullptr, false);
    try {
      insert_locked({j.at("key").get<std::string>(), j.at("template_id").get<std::string>(),
                     j.at("prompt_sha256").get<std::string>(),
                     j.at("response").get<std::string>(), j.value("truncated", false)});
    } catch (const json::exception&) {
      bad.push_back(line_no);
    }
  }
  if (!bad.empty()) throw MalformedRowError(path.string(), std::move(bad));
}

std::shared_ptr<TranscriptStore> TranscriptStore::open(const std::filesystem::path& path) {
  auto store = std::shared_ptr<TranscriptStore>(new TranscriptStore());
  if (std::filesystem::exists(path)) store->read_file(path);
  store->file_.emplace(path, std::ios::app);
  if (!*store->file_) throw LoadError("cannot append to transcripts " + path.string());
  return store;
}

std::shared_ptr<TranscriptStore> TranscriptStore::load(const std::filesystem::path& path) {
  auto store = std::shared_ptr<TranscriptStore>(new TranscriptStore());
  store->read_file(path);
  return store;
}

void TranscriptStore::insert_locked(const TranscriptRecord& record) {
  if (auto it = index_.find(record.key); it != index_.end()) {
    if (records_[it->second].response != record.response) {
      throw LoadError("conflicting transcript responses for key " + record.key);
    }
    return;
  }
  index_.emplace(record.key, records_.size());
  records_.push_back(record);
}

std::optional<TranscriptRecord> TranscriptStore::lookup(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return records_[it->second];
}

void TranscriptStore::append(const TranscriptRecord& record) {
  std::lock_guard lock(mu_);
  const size_t before = records_.size();
  insert_locked(record);
  if (file_ && records_.size() > before) {
    *file_ << to_json(record).dump() << '\n';
    file_->flush();
  }
}

std::vector<TranscriptRecord> TranscriptStore::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

size_t TranscriptStore::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::string transcript_key(std::string_view template_id, std::string_view prompt,
                           const GenConfig& gen) {
  const json canonical = {{"template_id", template_id},
                          {"prompt", prompt},
                          {"temperature", gen.temperature},
                          {"max_tokens", gen.max_tokens},
                          {"mode", to_string(gen.mode)}};
  return sha256_hex(canonical.dump());
}

// --- Counters ---------------------------------------------------------------

void CallCounter::increment(const std::string& template_id) {
  {
    std::lock_guard lock(mu_);
    ++counts_[template_id];
  }
  if (parent_) parent_->increment(template_id);
}

std::map<std::string, size_t> CallCounter::snapshot() const {
  std::lock_guard lock(mu_);
  return {counts_.begin(), counts_.end()};
}

size_t CallCounter::count(std::string_view template_id) const {
  std::lock_guard lock(mu_);
  auto it = counts_.find(template_id);
  return it == counts_.end() ? 0 : it->second;
}

// --- Gateway ----------------------------------------------------------------

LlmGateway::LlmGateway(GatewayMode mode, std::shared_ptr<ChatTransport> transport,
                       std::shared_ptr<TranscriptStore> store)
    : mode_(mode),
      transport_(std::move(transport)),
      store_(std::move(store)),
      counter_(std::make_shared<CallCounter>()) {}

LlmGateway LlmGateway::live(std::shared_ptr<ChatTransport> transport) {
  if (!transport) throw ConfigError("live gateway needs a transport");
  return LlmGateway(GatewayMode::kLive, std::move(transport), nullptr);
}

LlmGateway LlmGateway::record(std::shared_ptr<ChatTransport> transport,
                              std::shared_ptr<TranscriptStore> store) {
  if (!transport || !store) throw ConfigError("record gateway needs a transport and a store");
  return LlmGateway(GatewayMode::kRecord, std::move(transport), std::move(store));
}

LlmGateway LlmGateway::replay(std::shared_ptr<TranscriptStore> store) {
  if (!store) throw ConfigError("replay gateway needs a store");
  return LlmGateway(GatewayMode::kReplay, nullptr, std::move(store));
}

LlmGateway LlmGateway::fork() const {
  LlmGateway child(mode_, transport_, store_);
  child.counter_ = std::make_shared<CallCounter>(counter_);
  return child;
}

Completion LlmGateway::complete(std::string_view template_id, const std::string& prompt,
                                const GenConfig& gen) const {
  gen.validate();
  const std::string id(template_id);
  counter_->increment(id);

  const std::string key = mode_ == GatewayMode::kLive
                              ? std::string()
                              : transcript_key(template_id, prompt, gen);
  if (mode_ != GatewayMode::kLive) {
    if (auto hit = store_->lookup(key)) return {hit->response, hit->truncated};
    if (mode_ == GatewayMode::kReplay) throw ReplayMissError(key);
  }

  ChatRequest request{id, {{"user", prompt}}, gen};
  ChatResponse reply = transport_->send(request);
  Completion out{std::move(reply.content), reply.finish_reason == "length"};
  if (mode_ == GatewayMode::kRecord) {
    store_->append({key, id, sha256_hex(prompt), out.text, out.truncated});
  }
  return out;
}

}  // namespace kgnav
