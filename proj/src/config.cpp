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

#include "kgnav/config.hpp"

#include <cstdlib>
#include <fstream>

#include "kgnav/errors.hpp"

namespace kgnav {

using nlohmann::json;

namespace {

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

size_t get_count(const json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError("config key '" + key + "' must be a non-negative integer");
  }
  return j.get<size_t>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const json& j,
                              const std::string& key) {
  std::filesystem::path p = get_as<std::string>(j, key);
  return p.is_absolute() ? p : base / p;
}

void apply_gen(GenConfig& gen, const json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigError("config key '" + key + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "temperature") {
      gen.temperature = get_as<double>(v, key + ".temperature");
    } else if (k == "max_tokens") {
      gen.max_tokens = get_as<int>(v, key + ".max_tokens");
    } else {
      throw ConfigError("unknown config key '" + key + "." + k + "'");
    }
  }
}

EmbedderSpec embedder_from_json(const json& j, EmbedderSpec spec, const std::string& key) {
  for (const auto& [k, v] : j.items()) {
    if (k == "kind") spec.kind = get_as<std::string>(v, key + ".kind");
    else if (k == "dimension") spec.dimension = get_count(v, key + ".dimension");
    else if (k == "seed") spec.seed = get_as<uint64_t>(v, key + ".seed");
    else if (k == "max_ngram") spec.max_ngram = get_count(v, key + ".max_ngram");
    else if (k == "url") spec.url = get_as<std::string>(v, key + ".url");
    else if (k == "timeout_ms") spec.timeout = std::chrono::milliseconds(get_count(v, key + ".timeout_ms"));
    else throw ConfigError("unknown config key '" + key + "." + k + "'");
  }
  return spec;
}

}  // namespace

void apply_engine_overrides(EngineConfig& c, const json& overrides) {
  if (!overrides.is_object()) throw ConfigError("engine overrides must be an object");
  for (const auto& [k, v] : overrides.items()) {
    if (k == "width") c.width = get_count(v, k);
    else if (k == "max_depth") c.max_depth = get_count(v, k);
    else if (k == "top_k") c.top_k = get_count(v, k);
    else if (k == "top_l") c.top_l = get_count(v, k);
    else if (k == "alpha") c.alpha = get_as<double>(v, k);
    else if (k == "coarse_keep") c.coarse_keep = get_count(v, k);
    else if (k == "rank_origin") c.rank_origin = get_count(v, k);
    else if (k == "parallelism") c.parallelism = get_count(v, k);
    else if (k == "chunk_size") c.chunking.size_words = get_count(v, k);
    else if (k == "chunk_overlap") c.chunking.overlap_words = get_count(v, k);
    else if (k == "topic_prune") c.flags.topic_prune = get_as<bool>(v, k);
    else if (k == "batched_relation_prune") c.flags.batched_relation_prune = get_as<bool>(v, k);
    else if (k == "clue_query") c.flags.clue_query = get_as<bool>(v, k);
    else if (k == "exploration") apply_gen(c.exploration, v, k);
    else if (k == "reasoning") apply_gen(c.reasoning, v, k);
    else if (k == "top_k_scope") {
      const auto scope = get_as<std::string>(v, k);
      if (scope == "per_entity") c.top_k_scope = TopKScope::kPerEntity;
      else if (scope == "global") c.top_k_scope = TopKScope::kGlobal;
      else throw ConfigError("top_k_scope must be 'per_entity' or 'global'");
    } else {
      throw ConfigError("unknown engine setting '" + k + "'");
    }
  }
  c.validate();
}

json to_json(const EngineConfig& c) {
  return {{"width", c.width},
          {"max_depth", c.max_depth},
          {"top_k", c.top_k},
          {"top_l", c.top_l},
          {"alpha", c.alpha},
          {"coarse_keep", c.coarse_keep},
          {"rank_origin", c.rank_origin},
          {"top_k_scope", c.top_k_scope == TopKScope::kGlobal ? "global" : "per_entity"},
          {"parallelism", c.parallelism},
          {"chunk_size", c.chunking.size_words},
          {"chunk_overlap", c.chunking.overlap_words},
          {"topic_prune", c.flags.topic_prune},
          {"batched_relation_prune", c.flags.batched_relation_prune},
          {"clue_query", c.flags.clue_query},
          {"exploration",
           {{"temperature", c.exploration.temperature}, {"max_tokens", c.exploration.max_tokens}}},
          {"reasoning",
           {{"temperature", c.reasoning.temperature}, {"max_tokens", c.reasoning.max_tokens}}}};
}

AppConfig AppConfig::from_json(const json& doc, const std::filesystem::path& base) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  AppConfig cfg;
  for (const auto& [k, v] : doc.items()) {
    if (k == "graph") {
      if (!v.contains("triples")) throw ConfigError("graph.triples is required");
      cfg.triples = resolve(base, v["triples"], "graph.triples");
      if (v.contains("labels")) cfg.labels = resolve(base, v["labels"], "graph.labels");
    } else if (k == "corpus") {
      cfg.corpus = resolve(base, v, k);
    } else if (k == "prompts_dir") {
      cfg.prompts_dir = resolve(base, v, k);
    } else if (k == "engine") {
      apply_engine_overrides(cfg.engine, v);
    } else if (k == "embedder") {
      for (const auto& [ek, ev] : v.items()) {
        if (ek == "coarse") cfg.coarse = embedder_from_json(ev, cfg.coarse, "embedder.coarse");
        else if (ek == "rerank") cfg.rerank = embedder_from_json(ev, cfg.rerank, "embedder.rerank");
        else throw ConfigError("unknown config key 'embedder." + ek + "'");
      }
    } else if (k == "llm") {
      for (const auto& [lk, lv] : v.items()) {
        if (lk == "base_url") cfg.llm.http.base_url = get_as<std::string>(lv, "llm.base_url");
        else if (lk == "model") cfg.llm.http.model = get_as<std::string>(lv, "llm.model");
        else if (lk == "api_key_env") cfg.llm.api_key_env = get_as<std::string>(lv, "llm.api_key_env");
        else if (lk == "timeout_ms") cfg.llm.http.timeout = std::chrono::milliseconds(get_count(lv, "llm.timeout_ms"));
        else if (lk == "max_attempts") cfg.llm.http.max_attempts = static_cast<int>(get_count(lv, "llm.max_attempts"));
        else if (lk == "initial_backoff_ms") cfg.llm.http.initial_backoff = std::chrono::milliseconds(get_count(lv, "llm.initial_backoff_ms"));
        else throw ConfigError("unknown config key 'llm." + lk + "'");
      }
    } else if (k == "replay") {
      cfg.replay = resolve(base, v, k);
    } else if (k == "record") {
      cfg.record = resolve(base, v, k);
    } else if (k == "script") {
      cfg.script = resolve(base, v, k);
    } else {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
  if (cfg.triples.empty()) throw ConfigError("graph.triples is required");
  return cfg;
}

AppConfig AppConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config is not valid JSON: " + path.string());
  return from_json(doc, path.parent_path());
}

std::shared_ptr<const Embedder> make_embedder(const EmbedderSpec& spec) {
  if (spec.kind == "hashing") {
    return std::make_shared<HashingEmbedder>(spec.dimension, spec.seed, spec.max_ngram);
  }
  if (spec.kind == "http") {
    return std::make_shared<HttpEmbedder>(HttpEmbedderOptions{spec.url, spec.dimension, spec.timeout});
  }
  throw ConfigError("unknown embedder kind '" + spec.kind + "'");
}

LlmGateway make_gateway(const AppConfig& config) {
  if (config.replay) return LlmGateway::replay(TranscriptStore::load(*config.replay));

  std::shared_ptr<ChatTransport> transport;
  if (config.script) {
    transport = ScriptedTransport::from_file(*config.script);
  } else {
    HttpChatOptions http = config.llm.http;
    if (const char* url = std::getenv("KGNAV_LLM_BASE_URL")) http.base_url = url;
    if (const char* model = std::getenv("KGNAV_LLM_MODEL")) http.model = model;
    if (const char* key = std::getenv(config.llm.api_key_env.c_str())) http.api_key = key;
    transport = std::make_shared<HttpChatTransport>(std::move(http));
  }
  if (config.record) return LlmGateway::record(transport, TranscriptStore::open(*config.record));
  return LlmGateway::live(transport);
}

Runtime::Runtime(const AppConfig& config, LlmGateway gateway)
    : config_(config),
      retriever_(make_embedder(config.coarse), make_embedder(config.rerank)),
      gateway_(std::move(gateway)) {
  config_.engine.validate();
  graph_ = load_graph(config_.triples, config_.labels);
  if (!config_.corpus.empty()) {
    auto loaded = load_corpus(config_.corpus);
    corpus_ = std::move(loaded.corpus);
    corpus_duplicates_ = loaded.duplicate_count;
  }
  if (config_.prompts_dir) prompts_ = PromptLibrary::from_directory(*config_.prompts_dir);
}

std::shared_ptr<Runtime> Runtime::create(const AppConfig& config) {
  return create(config, make_gateway(config));
}

std::shared_ptr<Runtime> Runtime::create(const AppConfig& config, LlmGateway gateway) {
  return std::shared_ptr<Runtime>(new Runtime(config, std::move(gateway)));
}

Engine Runtime::engine(const EngineConfig& config) const {
  return Engine(graph_, corpus_, retriever_, gateway_, config,
                prompts_ ? *prompts_ : PromptLibrary::builtin());
}

}  // namespace kgnav
