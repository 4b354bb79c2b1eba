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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace kgnav {

enum class GenMode { kExploration, kReasoning };

std::string_view to_string(GenMode mode) noexcept;

struct GenConfig {
  double temperature = 0.0;
  int max_tokens = 256;
  GenMode mode = GenMode::kReasoning;

  // Pruning and query formulation calls.
  static GenConfig exploration() { return {0.4, 256, GenMode::kExploration}; }
  // Examine-and-reason and final answer calls.
  static GenConfig reasoning() { return {0.0, 256, GenMode::kReasoning}; }

  void validate() const;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string template_id;  // bookkeeping only, never sent on the wire
  std::vector<ChatMessage> messages;
  GenConfig gen;
};

struct ChatResponse {
  std::string content;
  std::string finish_reason = "stop";
};

// Something that turns a chat request into a model reply.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual ChatResponse send(const ChatRequest& request) = 0;
};

struct HttpChatOptions {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::string model = "gpt-3.5-turbo";
  std::chrono::milliseconds timeout{60000};
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
};

// POST {base_url}/chat/completions with `model`, `messages`, `temperature`
// and `max_tokens`. Connection failures, 429 and 5xx are retried with
// exponential backoff up to max_attempts; other errors fail immediately.
class HttpChatTransport final : public ChatTransport {
 public:
  explicit HttpChatTransport(HttpChatOptions options);
  ChatResponse send(const ChatRequest& request) override;

  static nlohmann::json request_body(const HttpChatOptions& options,
                                     const ChatRequest& request);

 private:
  HttpChatOptions options_;
  std::string origin_;
  std::string path_;
};

class FunctionTransport final : public ChatTransport {
 public:
  using Handler = std::function<ChatResponse(const ChatRequest&)>;
  explicit FunctionTransport(Handler handler) : handler_(std::move(handler)) {}
  ChatResponse send(const ChatRequest& request) override { return handler_(request); }

 private:
  Handler handler_;
};

// Offline stand-in for a model: the first rule whose template matches and
// whose `contains` strings all occur in the task section of the prompt
// (demonstrations are not searched) supplies the reply.
struct ScriptRule {
  std::optional<std::string> template_id;
  std::vector<std::string> contains;
  std::string response;
};

class ScriptedTransport final : public ChatTransport {
 public:
  explicit ScriptedTransport(std::vector<ScriptRule> rules) : rules_(std::move(rules)) {}
  // JSON array of {"template"?, "contains"?, "response"}.
  static std::shared_ptr<ScriptedTransport> from_file(const std::filesystem::path& path);

  ChatResponse send(const ChatRequest& request) override;

 private:
  std::vector<ScriptRule> rules_;
};

struct TranscriptRecord {
  std::string key;
  std::string template_id;
  std::string prompt_sha256;
  std::string response;
  bool truncated = false;
};

// Key -> response store persisted as one JSON object per line. Appends are
// serialized; a key recorded twice with different responses is rejected.
class TranscriptStore {
 public:
  static std::shared_ptr<TranscriptStore> in_memory();
  // Loads an existing file (if any) and appends new records to it.
  static std::shared_ptr<TranscriptStore> open(const std::filesystem::path& path);
  // Read-only view of an existing file; appends stay in memory.
  static std::shared_ptr<TranscriptStore> load(const std::filesystem::path& path);

  std::optional<TranscriptRecord> lookup(const std::string& key) const;
  void append(const TranscriptRecord& record);
  std::vector<TranscriptRecord> records() const;
  size_t size() const;

 private:
  TranscriptStore() = default;
  void read_file(const std::filesystem::path& path);
  void insert_locked(const TranscriptRecord& record);

  mutable std::mutex mu_;
  std::unordered_map<std::string, size_t> index_;
  std::vector<TranscriptRecord> records_;
  std::optional<std::ofstream> file_;
};

// Hash of (template id, rendered prompt, generation config).
std::string transcript_key(std::string_view template_id, std::string_view prompt,
                           const GenConfig& gen);

// Per-template call counters. Counts propagate to the parent, so a gateway
// and all of its forks can be read independently.
class CallCounter {
 public:
  explicit CallCounter(std::shared_ptr<CallCounter> parent = nullptr)
      : parent_(std::move(parent)) {}

  void increment(const std::string& template_id);
  std::map<std::string, size_t> snapshot() const;
  size_t count(std::string_view template_id) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, size_t, std::less<>> counts_;
  std::shared_ptr<CallCounter> parent_;
};

enum class GatewayMode { kLive, kRecord, kReplay };

struct Completion {
  std::string text;
  bool truncated = false;
};

class LlmGateway {
 public:
  static LlmGateway live(std::shared_ptr<ChatTransport> transport);
  static LlmGateway record(std::shared_ptr<ChatTransport> transport,
                           std::shared_ptr<TranscriptStore> store);
  static LlmGateway replay(std::shared_ptr<TranscriptStore> store);

  // Same backend, fresh counters whose calls also count toward this gateway.
  LlmGateway fork() const;

  // Live: ask the transport. Record: reuse a stored reply for the key or ask
  // the transport and store the reply. Replay: stored reply or
  // ReplayMissError.
  Completion complete(std::string_view template_id, const std::string& prompt,
                      const GenConfig& gen) const;

  std::map<std::string, size_t> call_counts() const { return counter_->snapshot(); }
  size_t calls(std::string_view template_id) const { return counter_->count(template_id); }
  GatewayMode mode() const noexcept { return mode_; }

 private:
  LlmGateway(GatewayMode mode, std::shared_ptr<ChatTransport> transport,
             std::shared_ptr<TranscriptStore> store);

  GatewayMode mode_;
  std::shared_ptr<ChatTransport> transport_;
  std::shared_ptr<TranscriptStore> store_;
  std::shared_ptr<CallCounter> counter_;
};

}  // namespace kgnav
