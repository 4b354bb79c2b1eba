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

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kgnav/corpus.hpp"
#include "kgnav/embedder.hpp"
#include "kgnav/kg_store.hpp"

namespace kgnav {

// Retrieval query built from the question, the current clue query and the
// textual form of the path that reached a candidate. Clue and path may be
// empty (first iteration).
struct ComposedQuery {
  std::string question;
  std::string clue_query;
  std::string path_text;
};

// Non-empty parts joined by '\n'.
std::string compose_query_text(const ComposedQuery& query);

// `Head -[rel]-> Tail` for outgoing steps and `Tail <-[rel]- Head` for
// incoming ones, always written from the entity the walk left from.
std::string serialize_step(const PathStep& step, const GraphStore& store);

// Steps joined by "; "; an empty path gives "".
std::string serialize_path(std::span<const PathStep> path,
                           const GraphStore& store);

enum class Stage { kCoarse, kRerank };

struct ScoredChunk {
  Chunk chunk;
  double score = 0.0;
  Stage stage = Stage::kRerank;
};

// Score descending, then (entity id, chunk index) ascending.
bool ranks_before(const ScoredChunk& a, const ScoredChunk& b);

// Stage 1 scores every chunk with the coarse embedder and keeps the best
// `coarse_keep`; stage 2 rescores those survivors with the rerank embedder.
// Output is sorted with ranks_before and carries rerank scores.
std::vector<ScoredChunk> two_stage_rank(const ComposedQuery& query,
                                        std::span<const Chunk> chunks,
                                        size_t coarse_keep,
                                        const Embedder& coarse,
                                        const Embedder& rerank);

// Decayed sum of the best `top_k` scores: sum_i scores[i] * exp(-alpha * (i + origin)).
// `scores_desc` must be sorted in non-increasing order (ContractViolation
// otherwise). An empty list scores 0.
double entity_rank_score(std::span<const double> scores_desc, double alpha,
                         size_t top_k, size_t rank_origin = 0);

// Whether a candidate's top-K is drawn from its own chunks or from the pool
// of all candidates' chunks.
enum class TopKScope { kPerEntity, kGlobal };

struct RankingParams {
  size_t width = 3;
  size_t top_k = 5;
  double alpha = 0.5;
  size_t coarse_keep = 20;
  size_t rank_origin = 0;
  TopKScope scope = TopKScope::kPerEntity;
  // Candidates scored concurrently; 1 scores them in order on the caller.
  size_t parallelism = 1;

  void validate() const;
};

struct CandidateInput {
  EntityId entity;
  PathStep via;
  std::vector<Chunk> chunks;
  ComposedQuery query;
};

struct CandidateEntity {
  EntityId entity;
  PathStep via;
  double rank_score = 0.0;
  std::vector<ScoredChunk> top_chunks;  // sorted, at most top_k
  size_t source = 0;                    // index into the input list
};

class Retriever {
 public:
  Retriever(std::shared_ptr<const Embedder> coarse,
            std::shared_ptr<const Embedder> rerank);

  std::vector<ScoredChunk> two_stage_rank(const ComposedQuery& query,
                                          std::span<const Chunk> chunks,
                                          size_t coarse_keep) const;

  // Scores every candidate and returns the best `width` distinct entities,
  // ordered by rank score descending, then entity id, then the step that
  // reached them. When an entity appears more than once only its best entry
  // is kept. Candidates without chunks score 0 and stay eligible.
  std::vector<CandidateEntity> rank_candidates(
      std::span<const CandidateInput> candidates,
      const RankingParams& params) const;

  const Embedder& coarse() const { return *coarse_; }
  const Embedder& rerank() const { return *rerank_; }

 private:
  std::shared_ptr<const Embedder> coarse_;
  std::shared_ptr<const Embedder> rerank_;
};

}  // namespace kgnav
