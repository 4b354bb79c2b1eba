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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "kgnav/corpus.hpp"
#include "kgnav/engine.hpp"
#include "kgnav/kg_store.hpp"
#include "kgnav/llm_gateway.hpp"
#include "kgnav/prompts.hpp"
#include "kgnav/retriever.hpp"

namespace kgnav {

struct EmbedderSpec {
  std::string kind = "hashing";  // "hashing" or "http"
  size_t dimension = 512;
  uint64_t seed = 0;
  size_t max_ngram = 1;
  std::string url;
  std::chrono::milliseconds timeout{30000};
};

struct LlmSpec {
  HttpChatOptions http;
  std::string api_key_env = "OPENAI_API_KEY";
};

// Everything needed to stand up an engine. Mirrors the JSON config file:
//
//   {
//     "graph": {"triples": "...", "labels": "..."},
//     "corpus": "...",
//     "prompts_dir": "...",                      (optional)
//     "engine": { ...EngineConfig fields... },
//     "embedder": {"coarse": {...}, "rerank": {...}},
//     "llm": {"base_url", "model", "api_key_env", "timeout_ms", "max_attempts"},
//     "replay": "...", "record": "...", "script": "..."   (optional)
//   }
//
// Relative paths are resolved against the config file's directory.
struct AppConfig {
  std::filesystem::path triples;
  std::filesystem::path labels;
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> prompts_dir;
  EngineConfig engine;
  EmbedderSpec coarse{"hashing", 512, 1, 1, {}, std::chrono::milliseconds{30000}};
  EmbedderSpec rerank{"hashing", 1024, 2, 2, {}, std::chrono::milliseconds{30000}};
  LlmSpec llm;
  std::optional<std::filesystem::path> replay;
  std::optional<std::filesystem::path> record;
  std::optional<std::filesystem::path> script;

  static AppConfig from_json(const nlohmann::json& doc,
                             const std::filesystem::path& base_dir);
  static AppConfig load(const std::filesystem::path& path);
};

// Applies `engine`-section keys onto `config`. Unknown keys and wrong types
// raise ConfigError; the result is validated.
void apply_engine_overrides(EngineConfig& config, const nlohmann::json& overrides);

nlohmann::json to_json(const EngineConfig& config);

std::shared_ptr<const Embedder> make_embedder(const EmbedderSpec& spec);

// Loaded stores plus the shared model plumbing. Immutable once built; hands
// out engines that borrow from it.
class Runtime {
 public:
  static std::shared_ptr<Runtime> create(const AppConfig& config);
  static std::shared_ptr<Runtime> create(const AppConfig& config, LlmGateway gateway);

  Engine engine() const { return engine(config_.engine); }
  Engine engine(const EngineConfig& config) const;

  const AppConfig& config() const noexcept { return config_; }
  const GraphStore& graph() const noexcept { return graph_; }
  const Corpus& corpus() const noexcept { return corpus_; }
  const LlmGateway& gateway() const noexcept { return gateway_; }
  size_t corpus_duplicates() const noexcept { return corpus_duplicates_; }

 private:
  Runtime(const AppConfig& config, LlmGateway gateway);

  AppConfig config_;
  GraphStore graph_;
  Corpus corpus_;
  size_t corpus_duplicates_ = 0;
  Retriever retriever_;
  LlmGateway gateway_;
  std::optional<PromptLibrary> prompts_;
};

// Gateway described by the config: replay > record > live. The transport is
// the script when one is given, otherwise the HTTP chat endpoint.
LlmGateway make_gateway(const AppConfig& config);

}  // namespace kgnav
