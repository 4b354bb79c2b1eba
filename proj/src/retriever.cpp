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

#include "kgnav/retriever.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "kgnav/errors.hpp"

namespace kgnav {

std::string compose_query_text(const ComposedQuery& query) {
  std::string out;
  for (const std::string* part :
       {&query.question, &query.clue_query, &query.path_text}) {
    if (part->empty()) continue;
    if (!out.empty()) out.push_back('\n');
    out += *part;
  }
  return out;
}

std::string serialize_step(const PathStep& step, const GraphStore& store) {
  const std::string& rel = step.triple.relation.str();
  if (step.direction == Direction::kOutgoing) {
    return store.label(step.triple.head) + " -[" + rel + "]-> " +
           store.label(step.triple.tail);
  }
  return store.label(step.triple.tail) + " <-[" + rel + "]- " +
         store.label(step.triple.head);
}

std::string serialize_path(std::span<const PathStep> path,
                           const GraphStore& store) {
  std::string out;
  for (const PathStep& step : path) {
    if (!out.empty()) out += "; ";
    out += serialize_step(step, store);
  }
  return out;
}

bool ranks_before(const ScoredChunk& a, const ScoredChunk& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.chunk.entity != b.chunk.entity) return a.chunk.entity < b.chunk.entity;
  return a.chunk.index < b.chunk.index;
}

namespace {

std::vector<ScoredChunk> score_all(const std::string& query_text,
                                   std::span<const Chunk> chunks,
                                   const Embedder& embedder, Stage stage) {
  std::vector<std::string> texts;
  texts.reserve(chunks.size() + 1);
  texts.push_back(query_text);
  for (const Chunk& c : chunks) texts.push_back(c.text);
  const auto vectors = embedder.embed(texts);
  if (vectors.size() != texts.size()) {
    throw ContractViolation("embedder returned wrong number of vectors");
  }

  std::vector<ScoredChunk> scored;
  scored.reserve(chunks.size());
  for (size_t i = 0; i < chunks.size(); ++i) {
    scored.push_back({chunks[i], cosine(vectors[0], vectors[i + 1]), stage});
  }
  std::sort(scored.begin(), scored.end(), ranks_before);
  return scored;
}

std::vector<double> scores_of(std::span<const ScoredChunk> chunks) {
  std::vector<double> out;
  out.reserve(chunks.size());
  for (const auto& c : chunks) out.push_back(c.score);
  return out;
}

}  // namespace

std::vector<ScoredChunk> two_stage_rank(const ComposedQuery& query,
                                        std::span<const Chunk> chunks,
                                        size_t coarse_keep,
                                        const Embedder& coarse,
                                        const Embedder& rerank) {
  if (coarse_keep == 0) throw ParameterError("coarse_keep must be positive");
  if (chunks.empty()) return {};

  const std::string query_text = compose_query_text(query);
  auto first = score_all(query_text, chunks, coarse, Stage::kCoarse);
  if (first.size() > coarse_keep) first.resize(coarse_keep);

  std::vector<Chunk> survivors;
  survivors.reserve(first.size());
  for (auto& s : first) survivors.push_back(std::move(s.chunk));
  return score_all(query_text, survivors, rerank, Stage::kRerank);
}

double entity_rank_score(std::span<const double> scores_desc, double alpha,
                         size_t top_k, size_t rank_origin) {
  if (!std::is_sorted(scores_desc.begin(), scores_desc.end(),
                      std::greater<>())) {
    throw ContractViolation("entity_rank_score expects scores sorted descending");
  }
  if (alpha < 0.0) throw ParameterError("alpha must be non-negative");
  if (top_k == 0) throw ParameterError("top_k must be positive");

  const size_t n = std::min(top_k, scores_desc.size());
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    total += scores_desc[i] * std::exp(-alpha * static_cast<double>(i + rank_origin));
  }
  return total;
}

void RankingParams::validate() const {
  if (width == 0) throw ParameterError("width must be positive");
  if (top_k == 0) throw ParameterError("top_k must be positive");
  if (coarse_keep == 0) throw ParameterError("coarse_keep must be positive");
  if (!(alpha >= 0.0)) throw ParameterError("alpha must be non-negative");
}

Retriever::Retriever(std::shared_ptr<const Embedder> coarse,
                     std::shared_ptr<const Embedder> rerank)
    : coarse_(std::move(coarse)), rerank_(std::move(rerank)) {
  if (!coarse_ || !rerank_) throw ParameterError("retriever needs two embedders");
}

std::vector<ScoredChunk> Retriever::two_stage_rank(const ComposedQuery& query,
                                                   std::span<const Chunk> chunks,
                                                   size_t coarse_keep) const {
  return kgnav::two_stage_rank(query, chunks, coarse_keep, *coarse_, *rerank_);
}

std::vector<CandidateEntity> Retriever::rank_candidates(
    std::span<const CandidateInput> candidates,
    const RankingParams& params) const {
  params.validate();

  std::vector<std::vector<ScoredChunk>> ranked(candidates.size());
  auto score_one = [&](size_t i) {
    ranked[i] = two_stage_rank(candidates[i].query, candidates[i].chunks,
                               params.coarse_keep);
  };
  if (params.parallelism <= 1 || candidates.size() <= 1) {
    for (size_t i = 0; i < candidates.size(); ++i) score_one(i);
  } else {
    for (size_t begin = 0; begin < candidates.size(); begin += params.parallelism) {
      const size_t end = std::min(begin + params.parallelism, candidates.size());
      std::vector<std::future<void>> wave;
      for (size_t i = begin; i < end; ++i) {
        wave.push_back(std::async(std::launch::async, score_one, i));
      }
      for (auto& f : wave) f.get();
    }
  }

  if (params.scope == TopKScope::kGlobal) {
    // Keep only chunks inside the global top-K pool.
    std::vector<std::pair<const ScoredChunk*, size_t>> pool;
    for (size_t i = 0; i < ranked.size(); ++i) {
      for (const auto& sc : ranked[i]) pool.emplace_back(&sc, i);
    }
    std::stable_sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
      return ranks_before(*a.first, *b.first);
    });
    if (pool.size() > params.top_k) pool.resize(params.top_k);
    std::vector<std::vector<ScoredChunk>> kept(ranked.size());
    for (const auto& [chunk, owner] : pool) kept[owner].push_back(*chunk);
    ranked = std::move(kept);
  }

  std::vector<CandidateEntity> out;
  out.reserve(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    auto& chunks = ranked[i];
    if (chunks.size() > params.top_k) chunks.resize(params.top_k);
    const auto scores = scores_of(chunks);
    out.push_back({candidates[i].entity, candidates[i].via,
                   entity_rank_score(scores, params.alpha, params.top_k,
                                     params.rank_origin),
                   std::move(chunks), i});
  }

  std::sort(out.begin(), out.end(),
            [](const CandidateEntity& a, const CandidateEntity& b) {
              if (a.rank_score != b.rank_score) return a.rank_score > b.rank_score;
              if (a.entity != b.entity) return a.entity < b.entity;
              if (a.via != b.via) return a.via < b.via;
              return a.source < b.source;
            });
  std::vector<CandidateEntity> selected;
  for (auto& c : out) {
    if (selected.size() == params.width) break;
    const bool seen = std::any_of(selected.begin(), selected.end(),
                                  [&](const auto& s) { return s.entity == c.entity; });
    if (!seen) selected.push_back(std::move(c));
  }
  return selected;
}

}  // namespace kgnav
