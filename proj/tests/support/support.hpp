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
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "kgnav/corpus.hpp"
#include "kgnav/embedder.hpp"
#include "kgnav/engine.hpp"
#include "kgnav/kg_store.hpp"
#include "kgnav/llm_gateway.hpp"
#include "kgnav/retriever.hpp"

namespace kgnav::testing {

std::filesystem::path fixture_path(const std::string& relative);

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

using Rng = std::mt19937_64;

size_t uniform(Rng& rng, size_t lo, size_t hi);  // inclusive
double uniform_real(Rng& rng, double lo, double hi);
bool coin(Rng& rng, double p = 0.5);

// Random graph over entities e0..e{n-1} labelled "Entity <i>", with a corpus
// covering most entities. Every entity has at least one incident triple.
struct RandomWorld {
  GraphStore graph;
  Corpus corpus;
  std::vector<EntityId> entities;
  std::string question;  // mentions one to three entity labels
};

RandomWorld random_world(Rng& rng);

// Layered graph: root -> `fanout` children per node for `depth` layers, each
// node with a short document. Used to force a fixed number of iterations.
RandomWorld layered_world(size_t fanout, size_t depth);

// Deterministic stand-in for a model that reads the task section of each
// prompt and answers in the expected grammar. Choices are pseudo-random but
// depend only on (seed, prompt), so recording and replaying agree.
struct PolicyOptions {
  uint64_t seed = 0;
  double answer_probability = 0.3;  // examine step answers instead of continuing
  double garbage_probability = 0.05;
  double hallucination_probability = 0.1;
  size_t max_relations = 4;
  bool select_all_relations = false;
};

std::shared_ptr<ChatTransport> policy_transport(PolicyOptions options);

// Wraps a transport and keeps every request it forwards.
class CapturingTransport final : public ChatTransport {
 public:
  explicit CapturingTransport(std::shared_ptr<ChatTransport> inner) : inner_(std::move(inner)) {}
  ChatResponse send(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;
  std::vector<std::string> prompts_for(const std::string& template_id) const;

 private:
  std::shared_ptr<ChatTransport> inner_;
  mutable std::mutex mu_;
  std::vector<ChatRequest> requests_;
};

// Embedder with exactly known cosines: "score:<s>" maps to (s, sqrt(1-s^2))
// and every other text to (1, 0), so cosine(query, chunk) == s.
class ScoreEmbedder final : public Embedder {
 public:
  size_t dimension() const override { return 2; }
  std::vector<Vector> embed(std::span<const std::string> texts) const override;
};

// Decayed sum evaluated in 50-digit decimal arithmetic.
double decayed_sum_oracle(const std::vector<double>& scores_desc, double alpha, size_t top_k,
                          size_t rank_origin = 0);

// Cosine by definition, no shortcuts.
double cosine_oracle(const std::vector<double>& a, const std::vector<double>& b);

// Checks every structural promise an AnswerRecord makes. Returns a
// description of the first violation, or "" when the record is sound.
std::string check_record_invariants(const AnswerRecord& record, const GraphStore& graph,
                                    const EngineConfig& config);

}  // namespace kgnav::testing
