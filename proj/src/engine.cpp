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

#include "kgnav/engine.hpp"

#include <algorithm>
#include <set>

#include "kgnav/errors.hpp"
#include "kgnav/response_parsing.hpp"
#include "kgnav/text.hpp"

namespace kgnav {

void EngineConfig::validate() const {
  if (width == 0) throw ConfigError("width must be positive");
  if (max_depth == 0) throw ConfigError("max_depth must be positive");
  if (top_k == 0) throw ConfigError("top_k must be positive");
  if (top_l == 0) throw ConfigError("top_l must be positive");
  if (top_l > top_k) throw ConfigError("top_l must not exceed top_k");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  if (coarse_keep == 0) throw ConfigError("coarse_keep must be positive");
  if (parallelism == 0) throw ConfigError("parallelism must be positive");
  try {
    chunking.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  exploration.validate();
  reasoning.validate();
}

RankingParams EngineConfig::ranking() const {
  return {width, top_k, alpha, coarse_keep, rank_origin, top_k_scope, parallelism};
}

namespace {

std::vector<ScoredChunk> merge_top(std::vector<ScoredChunk> a,
                                   const std::vector<ScoredChunk>& b, size_t limit) {
  for (const auto& chunk : b) {
    auto same = std::find_if(a.begin(), a.end(), [&](const ScoredChunk& x) {
      return x.chunk.entity == chunk.chunk.entity && x.chunk.index == chunk.chunk.index;
    });
    if (same == a.end()) {
      a.push_back(chunk);
    } else if (chunk.score > same->score) {
      *same = chunk;
    }
  }
  std::sort(a.begin(), a.end(), ranks_before);
  if (a.size() > limit) a.resize(limit);
  return a;
}

std::string relation_label(const RelationRef& r) {
  return r.relation.str() + (r.direction == Direction::kOutgoing ? " (out)" : " (in)");
}

}  // namespace

bool is_valid_path(const TriplePath& path, const GraphStore& graph) {
  for (size_t i = 0; i < path.size(); ++i) {
    if (!graph.contains(path[i].triple)) return false;
    if (i > 0 && path[i].from() != path[i - 1].to()) return false;
  }
  return true;
}

Engine::Engine(const GraphStore& graph, const Corpus& corpus, const Retriever& retriever,
               LlmGateway gateway, EngineConfig config, const PromptLibrary& prompts)
    : graph_(graph),
      corpus_(corpus),
      retriever_(retriever),
      gateway_(std::move(gateway)),
      config_(std::move(config)),
      prompts_(prompts) {
  config_.validate();
}

std::string Engine::complete(TemplateId id, const Bindings& bindings, const GenConfig& gen,
                             RunContext& ctx) const {
  const std::string prompt = prompts_.render(id, bindings);
  Completion c = ctx.gateway.complete(to_string(id), prompt, gen);
  if (c.truncated) {
    ctx.notes.push_back(std::string(to_string(id)) + " reply was truncated at max_tokens");
  }
  return std::move(c.text);
}

std::string Engine::describe_entity(const EntityId& e) const {
  return e.str() + " (" + graph_.label(e) + ")";
}

std::string Engine::render_evidence(const std::vector<ScoredChunk>& evidence) const {
  if (evidence.empty()) return "(none)";
  std::string out;
  for (size_t i = 0; i < evidence.size(); ++i) {
    const auto& c = evidence[i].chunk;
    const Document* doc = corpus_.find(c.entity);
    const std::string title = doc && !doc->title.empty() ? doc->title : graph_.label(c.entity);
    if (i > 0) out += '\n';
    out += "[" + std::to_string(i + 1) + "] " + title + ": " + c.text;
  }
  return out;
}

std::string Engine::render_paths(const std::vector<TopicEntity>& topics) const {
  std::string out;
  for (const auto& t : topics) {
    if (t.path.empty()) continue;
    if (!out.empty()) out += '\n';
    out += "- " + serialize_path(t.path, graph_);
  }
  return out.empty() ? "(none)" : out;
}

std::vector<LinkedEntity> Engine::extract_topic_entities(const std::string& question,
                                                         RunContext& ctx) const {
  const std::string reply = complete(TemplateId::kEntityExtraction, {{"question", question}},
                                     config_.exploration, ctx);
  auto mentions = parsing::string_list(reply);
  if (!mentions) {
    ctx.notes.push_back("entity extraction reply had no mention list");
    mentions.emplace();
  }

  std::vector<LinkedEntity> linked;
  for (const auto& mention : *mentions) {
    const auto ids = graph_.resolve_label(mention);
    if (ids.empty()) {
      ctx.notes.push_back("unlinked mention: " + mention);
      continue;
    }
    for (const auto& id : ids) {
      const bool seen = std::any_of(linked.begin(), linked.end(),
                                    [&](const LinkedEntity& l) { return l.entity == id; });
      if (!seen) linked.push_back({mention, id});
    }
  }
  if (linked.empty()) throw NoStartingPointError();
  return linked;
}

std::vector<TopicEntity> Engine::topic_prune(const std::string& question,
                                             const std::vector<LinkedEntity>& linked,
                                             RunContext& ctx) const {
  if (linked.empty()) throw ContractViolation("topic_prune needs linked entities");
  std::vector<TopicEntity> all;
  for (const auto& l : linked) all.push_back({l.entity, {}, {}, {}});
  if (!config_.flags.topic_prune) return all;

  std::string listing;
  for (const auto& l : linked) {
    if (!listing.empty()) listing += '\n';
    listing += "- " + describe_entity(l.entity) + ", mentioned as \"" + l.surface + "\"";
  }
  const std::string reply = complete(TemplateId::kTopicPrune,
                                     {{"question", question}, {"entities", listing}},
                                     config_.exploration, ctx);
  const auto picked = parsing::string_list(reply);
  if (!picked) {
    ctx.notes.push_back("topic prune reply unparseable; keeping all linked entities");
    return all;
  }

  std::vector<TopicEntity> kept;
  for (const auto& l : linked) {
    const bool chosen = std::any_of(picked->begin(), picked->end(), [&](const std::string& p) {
      const auto trimmed = text::trim(p);
      return trimmed == l.entity.str() ||
             text::normalize_label(p) == text::normalize_label(graph_.label(l.entity));
    });
    if (chosen) kept.push_back({l.entity, {}, {}, {}});
  }
  if (kept.empty()) {
    ctx.notes.push_back("topic prune selected nothing; keeping all linked entities");
    return all;
  }
  return kept;
}

void Engine::generate_clue_queries(const std::string& question,
                                   std::vector<TopicEntity>& topics, RunContext& ctx) const {
  if (!config_.flags.clue_query) {
    for (auto& t : topics) t.clue_query.clear();
    return;
  }
  std::string listing;
  for (const auto& t : topics) {
    if (!listing.empty()) listing += '\n';
    listing += "- " + describe_entity(t.entity);
  }
  const std::string reply = complete(TemplateId::kClueQuery,
                                     {{"question", question}, {"topics", listing}},
                                     config_.exploration, ctx);
  const auto clues = parsing::tagged_lines(reply, "CLUE");
  for (auto& t : topics) {
    auto it = clues.find(t.entity);
    if (it == clues.end() || it->second.empty()) {
      ctx.notes.push_back("no clue query for " + t.entity.str());
      t.clue_query.clear();
    } else {
      t.clue_query = it->second;
    }
  }
}

namespace {

std::vector<RelationRef> select_relations(const EntityId& entity,
                                          const std::vector<RelationRef>& candidates,
                                          const std::vector<parsing::RelationChoice>& choices,
                                          size_t width, std::vector<std::string>& notes) {
  std::vector<RelationRef> out;
  for (const auto& choice : choices) {
    if (out.size() >= width) break;
    bool matched = false;
    for (const auto& c : candidates) {
      if (c.relation.str() != choice.relation) continue;
      if (choice.direction && to_string(c.direction) != *choice.direction) continue;
      matched = true;
      if (out.size() < width && std::find(out.begin(), out.end(), c) == out.end()) {
        out.push_back(c);
      }
    }
    if (!matched) {
      notes.push_back("dropped relation " + choice.relation + " for " + entity.str() +
                      ": not incident");
    }
  }
  if (out.empty() && !candidates.empty()) {
    notes.push_back("no valid relation selected for " + entity.str() +
                    "; using first candidates");
    out.assign(candidates.begin(),
               candidates.begin() + static_cast<std::ptrdiff_t>(std::min(width, candidates.size())));
  }
  return out;
}

std::string relation_listing(const std::vector<RelationRef>& candidates) {
  if (candidates.empty()) return "(none)";
  std::vector<std::string> parts;
  for (const auto& c : candidates) parts.push_back(relation_label(c));
  return text::join(parts, "; ");
}

}  // namespace

std::map<EntityId, std::vector<RelationRef>> Engine::relation_prune(
    const std::string& question, const std::vector<TopicEntity>& topics,
    RunContext& ctx) const {
  if (topics.empty()) throw ContractViolation("relation_prune needs topics");
  const std::string width = std::to_string(config_.width);
  std::map<EntityId, std::vector<RelationRef>> selected;

  if (config_.flags.batched_relation_prune) {
    std::string blocks;
    for (const auto& t : topics) {
      if (!blocks.empty()) blocks += "\n\n";
      blocks += "Entity: " + describe_entity(t.entity) + "\n";
      blocks += "Clue query: " + (t.clue_query.empty() ? "(none)" : t.clue_query) + "\n";
      blocks += "Path so far: " +
                (t.path.empty() ? std::string("(none)") : serialize_path(t.path, graph_)) + "\n";
      blocks += "Candidate relations: " + relation_listing(graph_.relations_of(t.entity));
    }
    const std::string reply = complete(
        TemplateId::kRelationPruneBatched,
        {{"question", question}, {"width", width}, {"topics", blocks}},
        config_.exploration, ctx);
    const auto lines = parsing::tagged_lines(reply, "RELATIONS");
    for (const auto& t : topics) {
      auto it = lines.find(t.entity);
      const auto choices = it == lines.end() ? std::vector<parsing::RelationChoice>{}
                                             : parsing::relation_choices(it->second);
      selected[t.entity] = select_relations(t.entity, graph_.relations_of(t.entity), choices,
                                            config_.width, ctx.notes);
    }
    return selected;
  }

  for (const auto& t : topics) {
    const auto candidates = graph_.relations_of(t.entity);
    const std::string reply = complete(
        TemplateId::kRelationPruneSingle,
        {{"question", question},
         {"width", width},
         {"entity", describe_entity(t.entity)},
         {"entity_id", t.entity.str()},
         {"clue_query", t.clue_query.empty() ? "(none)" : t.clue_query},
         {"path", t.path.empty() ? std::string("(none)") : serialize_path(t.path, graph_)},
         {"relations", relation_listing(candidates)}},
        config_.exploration, ctx);
    std::optional<std::string> line;
    const auto tagged = parsing::tagged_lines(reply, "RELATIONS");
    if (auto it = tagged.find(t.entity); it != tagged.end()) {
      line = it->second;
    } else {
      line = parsing::untagged_line(reply, "RELATIONS");
    }
    const auto choices = line ? parsing::relation_choices(*line)
                              : std::vector<parsing::RelationChoice>{};
    selected[t.entity] =
        select_relations(t.entity, candidates, choices, config_.width, ctx.notes);
  }
  return selected;
}

EntityPruneResult Engine::entity_prune(
    const std::string& question, const std::vector<TopicEntity>& topics,
    const std::map<EntityId, std::vector<RelationRef>>& relations) const {
  std::vector<CandidateInput> inputs;
  std::vector<size_t> parent_of;
  std::vector<TriplePath> path_of;

  for (size_t j = 0; j < topics.size(); ++j) {
    const TopicEntity& topic = topics[j];
    auto rel_it = relations.find(topic.entity);
    if (rel_it == relations.end()) continue;

    std::set<EntityId> on_path{topic.entity};
    for (const auto& step : topic.path) {
      on_path.insert(step.triple.head);
      on_path.insert(step.triple.tail);
    }
    for (const RelationRef& ref : rel_it->second) {
      for (const EntityId& next : graph_.neighbors(topic.entity, ref.relation, ref.direction)) {
        if (on_path.contains(next)) continue;
        PathStep step = ref.direction == Direction::kOutgoing
                            ? PathStep{{topic.entity, ref.relation, next}, Direction::kOutgoing}
                            : PathStep{{next, ref.relation, topic.entity}, Direction::kIncoming};
        TriplePath path = topic.path;
        path.push_back(step);

        CandidateInput input{next, step, {}, {question, topic.clue_query,
                                              serialize_path(path, graph_)}};
        if (const Document* doc = corpus_.find(next)) {
          input.chunks = chunk_document(*doc, config_.chunking);
        }
        inputs.push_back(std::move(input));
        parent_of.push_back(j);
        path_of.push_back(std::move(path));
      }
    }
  }

  EntityPruneResult result;
  result.candidate_count = inputs.size();
  if (inputs.empty()) return result;

  auto ranked = retriever_.rank_candidates(inputs, config_.ranking());
  for (auto& c : ranked) {
    const TopicEntity& parent = topics[parent_of[c.source]];
    TriplePath path = path_of[c.source];
    if (!is_valid_path(path, graph_)) {
      throw ContractViolation("entity prune produced an invalid path");
    }
    result.survivors.push_back({c.entity, c.rank_score, path});
    result.evidence = merge_top(std::move(result.evidence), c.top_chunks, config_.top_l);
    result.topics.push_back({c.entity, parent.clue_query, std::move(path),
                             std::move(c.top_chunks)});
  }
  return result;
}

Verdict Engine::examine_and_reason(const std::string& question,
                                   const std::vector<TopicEntity>& topics,
                                   const std::vector<ScoredChunk>& evidence,
                                   RunContext& ctx) const {
  std::string listing;
  for (const auto& t : topics) {
    if (!listing.empty()) listing += '\n';
    listing += "- " + describe_entity(t.entity) + " | clue query: " +
               (t.clue_query.empty() ? "(none)" : t.clue_query);
  }
  const std::string reply = complete(TemplateId::kExamineReason,
                                     {{"question", question},
                                      {"topics", listing.empty() ? "(none)" : listing},
                                      {"paths", render_paths(topics)},
                                      {"evidence", render_evidence(evidence)}},
                                     config_.reasoning, ctx);
  const auto parsed = parsing::verdict(reply);
  Verdict v;
  v.rationale = parsed.rationale;
  switch (parsed.kind) {
    case parsing::ParsedVerdict::Kind::kAnswer:
      v.kind = Verdict::Kind::kAnswer;
      v.answer = parsed.answer;
      break;
    case parsing::ParsedVerdict::Kind::kContinue:
      v.kind = Verdict::Kind::kContinue;
      v.new_clue_queries = parsed.clues;
      break;
    case parsing::ParsedVerdict::Kind::kUnparsed:
      v.kind = Verdict::Kind::kContinue;
      v.parsed = false;
      ctx.notes.push_back("examine reply had no ANSWER/CONTINUE marker; continuing");
      break;
  }
  return v;
}

std::string Engine::final_answer(const std::string& question,
                                 const std::vector<TopicEntity>& topics,
                                 const std::vector<ScoredChunk>& evidence,
                                 RunContext& ctx) const {
  const std::string reply = complete(
      TemplateId::kFinalAnswer,
      {{"question", question}, {"paths", render_paths(topics)},
       {"evidence", render_evidence(evidence)}},
      config_.reasoning, ctx);
  return parsing::final_answer(reply);
}

AnswerRecord Engine::run(const std::string& question) const {
  RunContext ctx = new_context();
  AnswerRecord record;
  record.question = question;

  auto finish = [&](AnswerRecord& r) {
    r.call_counts = ctx.gateway.call_counts();
    r.notes = ctx.notes;
  };

  std::vector<TopicEntity> topics;
  try {
    const auto linked = extract_topic_entities(question, ctx);
    topics = topic_prune(question, linked, ctx);
    generate_clue_queries(question, topics, ctx);
  } catch (const NoStartingPointError&) {
    ctx.notes.push_back("no starting point; answering from the question alone");
    record.degraded = true;
    record.degraded_reason = "no starting point";
    record.answer = final_answer(question, {}, {}, ctx);
    finish(record);
    return record;
  }

  std::vector<ScoredChunk> accumulated;
  for (size_t i = 0; i < config_.max_depth; ++i) {
    const size_t notes_before = ctx.notes.size();
    IterationReport report;
    report.iteration = i;
    for (const auto& t : topics) {
      report.topics.push_back(t.entity);
      report.clue_queries.push_back(t.clue_query);
    }

    report.selected_relations = relation_prune(question, topics, ctx);
    EntityPruneResult ep = entity_prune(question, topics, report.selected_relations);
    report.candidate_count = ep.candidate_count;
    report.survivors = ep.survivors;
    report.evidence = ep.evidence;

    if (ep.topics.empty()) {
      ctx.notes.push_back("iteration " + std::to_string(i) + ": no candidates to expand");
      report.verdict = "none";
      report.notes.assign(ctx.notes.begin() + static_cast<std::ptrdiff_t>(notes_before),
                          ctx.notes.end());
      record.reports.push_back(std::move(report));
      record.degraded = true;
      record.degraded_reason = "exploration exhausted";
      record.answer = final_answer(question, topics, accumulated, ctx);
      record.evidence = accumulated;
      break;
    }

    topics = std::move(ep.topics);
    accumulated = merge_top(std::move(accumulated), ep.evidence, config_.top_l);

    const Verdict verdict = examine_and_reason(question, topics, ep.evidence, ctx);
    report.verdict = verdict.kind == Verdict::Kind::kAnswer ? "answer" : "continue";

    if (verdict.kind == Verdict::Kind::kAnswer) {
      report.notes.assign(ctx.notes.begin() + static_cast<std::ptrdiff_t>(notes_before),
                          ctx.notes.end());
      record.reports.push_back(std::move(report));
      record.answer = verdict.answer;
      record.evidence = ep.evidence;
      break;
    }

    if (config_.flags.clue_query) {
      for (const auto& [entity, clue] : verdict.new_clue_queries) {
        auto it = std::find_if(topics.begin(), topics.end(),
                               [&](const TopicEntity& t) { return t.entity == entity; });
        if (it == topics.end()) {
          ctx.notes.push_back("clue query for unknown topic " + entity.str() + " ignored");
        } else {
          it->clue_query = clue;
        }
      }
    }

    const bool last = i + 1 == config_.max_depth;
    if (last) {
      ctx.notes.push_back("max depth reached; forcing a final answer");
    }
    report.notes.assign(ctx.notes.begin() + static_cast<std::ptrdiff_t>(notes_before),
                        ctx.notes.end());
    record.reports.push_back(std::move(report));
    if (last) {
      record.degraded = true;
      record.degraded_reason = "max depth reached";
      record.answer = final_answer(question, topics, accumulated, ctx);
      record.evidence = accumulated;
    }
  }

  for (const auto& t : topics) {
    if (!t.path.empty()) record.paths.push_back(t.path);
  }
  finish(record);
  return record;
}

}  // namespace kgnav
