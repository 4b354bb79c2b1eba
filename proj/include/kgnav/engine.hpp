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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgnav/corpus.hpp"
#include "kgnav/kg_store.hpp"
#include "kgnav/llm_gateway.hpp"
#include "kgnav/prompts.hpp"
#include "kgnav/retriever.hpp"

namespace kgnav {

// Feature switches for the three ablations: topic pruning, one relation
// prune call per iteration for all topics, and clue queries.
struct EngineFlags {
  bool topic_prune = true;
  bool batched_relation_prune = true;
  bool clue_query = true;
};

struct EngineConfig {
  size_t width = 3;       // relations kept per topic and the entity beam size
  size_t max_depth = 3;   // iterations before a forced final answer
  size_t top_k = 5;       // chunks per entity in the decayed-sum score
  size_t top_l = 3;       // evidence chunks handed to the model, <= top_k
  double alpha = 0.5;     // decay rate
  size_t coarse_keep = 20;
  size_t rank_origin = 0;
  TopKScope top_k_scope = TopKScope::kPerEntity;
  size_t parallelism = 1;
  ChunkingParams chunking;
  EngineFlags flags;
  GenConfig exploration = GenConfig::exploration();
  GenConfig reasoning = GenConfig::reasoning();

  // Throws ConfigError on out-of-range values, including top_l > top_k.
  void validate() const;
  RankingParams ranking() const;
};

using TriplePath = std::vector<PathStep>;

// Every step is a stored triple and each step leaves from the entity the
// previous one reached.
bool is_valid_path(const TriplePath& path, const GraphStore& graph);

struct TopicEntity {
  EntityId entity;
  std::string clue_query;
  TriplePath path;
  std::vector<ScoredChunk> evidence;
};

struct LinkedEntity {
  std::string surface;
  EntityId entity;
};

struct Verdict {
  enum class Kind { kAnswer, kContinue };

  Kind kind = Kind::kContinue;
  std::string answer;
  std::map<EntityId, std::string> new_clue_queries;
  std::string rationale;
  bool parsed = true;
};

struct Survivor {
  EntityId entity;
  double rank_score = 0.0;
  TriplePath path;
};

struct IterationReport {
  size_t iteration = 0;
  // Topics entering the iteration with their clue queries.
  std::vector<EntityId> topics;
  std::vector<std::string> clue_queries;
  std::map<EntityId, std::vector<RelationRef>> selected_relations;
  size_t candidate_count = 0;
  std::vector<Survivor> survivors;
  std::vector<ScoredChunk> evidence;  // top-L of this iteration
  std::string verdict;                // "answer", "continue" or "none"
  std::vector<std::string> notes;
};

struct AnswerRecord {
  std::string question;
  std::string answer;
  bool degraded = false;
  std::string degraded_reason;
  std::vector<TriplePath> paths;
  std::vector<ScoredChunk> evidence;
  std::vector<IterationReport> reports;
  std::map<std::string, size_t> call_counts;
  std::vector<std::string> notes;

  size_t iterations() const noexcept { return reports.size(); }
};

// Mutable per-run bits: a gateway fork with its own call counters and the
// warnings collected along the way.
struct RunContext {
  LlmGateway gateway;
  std::vector<std::string> notes;
};

struct EntityPruneResult {
  std::vector<TopicEntity> topics;
  std::vector<ScoredChunk> evidence;
  std::vector<Survivor> survivors;
  size_t candidate_count = 0;
};

// The exploration loop: link question entities, prune them to starting
// points, then repeat relation prune -> entity prune -> examine until the
// model answers or max_depth is reached.
//
// The stores and retriever are borrowed and must outlive the engine. One
// engine may serve concurrent run() calls.
class Engine {
 public:
  Engine(const GraphStore& graph, const Corpus& corpus, const Retriever& retriever,
         LlmGateway gateway, EngineConfig config,
         const PromptLibrary& prompts = PromptLibrary::builtin());

  AnswerRecord run(const std::string& question) const;

  const EngineConfig& config() const noexcept { return config_; }
  RunContext new_context() const { return {gateway_.fork(), {}}; }

  // Individual steps, exposed for tests and tools.
  std::vector<LinkedEntity> extract_topic_entities(const std::string& question,
                                                   RunContext& ctx) const;
  std::vector<TopicEntity> topic_prune(const std::string& question,
                                       const std::vector<LinkedEntity>& linked,
                                       RunContext& ctx) const;
  void generate_clue_queries(const std::string& question,
                             std::vector<TopicEntity>& topics, RunContext& ctx) const;
  std::map<EntityId, std::vector<RelationRef>> relation_prune(
      const std::string& question, const std::vector<TopicEntity>& topics,
      RunContext& ctx) const;
  EntityPruneResult entity_prune(
      const std::string& question, const std::vector<TopicEntity>& topics,
      const std::map<EntityId, std::vector<RelationRef>>& relations) const;
  Verdict examine_and_reason(const std::string& question,
                             const std::vector<TopicEntity>& topics,
                             const std::vector<ScoredChunk>& evidence,
                             RunContext& ctx) const;
  std::string final_answer(const std::string& question,
                           const std::vector<TopicEntity>& topics,
                           const std::vector<ScoredChunk>& evidence,
                           RunContext& ctx) const;

 private:
  std::string complete(TemplateId id, const Bindings& bindings, const GenConfig& gen,
                       RunContext& ctx) const;
  std::string describe_entity(const EntityId& e) const;
  std::string render_evidence(const std::vector<ScoredChunk>& evidence) const;
  std::string render_paths(const std::vector<TopicEntity>& topics) const;

  const GraphStore& graph_;
  const Corpus& corpus_;
  const Retriever& retriever_;
  LlmGateway gateway_;
  EngineConfig config_;
  const PromptLibrary& prompts_;
};

}  // namespace kgnav
