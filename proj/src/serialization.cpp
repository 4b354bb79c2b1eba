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

#include "kgnav/serialization.hpp"

namespace kgnav {

using nlohmann::json;

json to_json(const PathStep& step) {
  return {{"head", step.triple.head.str()},
          {"relation", step.triple.relation.str()},
          {"tail", step.triple.tail.str()},
          {"direction", to_string(step.direction)}};
}

json to_json(const ScoredChunk& chunk) {
  return {{"entity", chunk.chunk.entity.str()},
          {"index", chunk.chunk.index},
          {"span", {chunk.chunk.span.start, chunk.chunk.span.end}},
          {"score", chunk.score},
          {"text", chunk.chunk.text}};
}

json to_json(const TriplePath& path, const GraphStore& graph) {
  json steps = json::array();
  for (const auto& s : path) steps.push_back(to_json(s));
  return {{"steps", std::move(steps)}, {"text", serialize_path(path, graph)}};
}

namespace {

json chunks_json(const std::vector<ScoredChunk>& chunks) {
  json out = json::array();
  for (const auto& c : chunks) out.push_back(to_json(c));
  return out;
}

json report_json(const IterationReport& r, const GraphStore& graph) {
  json topics = json::array();
  for (size_t i = 0; i < r.topics.size(); ++i) {
    topics.push_back({{"entity", r.topics[i].str()}, {"clue_query", r.clue_queries[i]}});
  }
  json relations = json::object();
  for (const auto& [entity, refs] : r.selected_relations) {
    json list = json::array();
    for (const auto& ref : refs) {
      list.push_back({{"relation", ref.relation.str()}, {"direction", to_string(ref.direction)}});
    }
    relations[entity.str()] = std::move(list);
  }
  json survivors = json::array();
  for (const auto& s : r.survivors) {
    survivors.push_back({{"entity", s.entity.str()},
                         {"rank_score", s.rank_score},
                         {"path", to_json(s.path, graph)}});
  }
  return {{"iteration", r.iteration},
          {"topics", std::move(topics)},
          {"selected_relations", std::move(relations)},
          {"candidate_count", r.candidate_count},
          {"survivors", std::move(survivors)},
          {"evidence", chunks_json(r.evidence)},
          {"verdict", r.verdict},
          {"notes", r.notes}};
}

}  // namespace

json to_json(const AnswerRecord& record, const GraphStore& graph) {
  json paths = json::array();
  for (const auto& p : record.paths) paths.push_back(to_json(p, graph));
  json reports = json::array();
  for (const auto& r : record.reports) reports.push_back(report_json(r, graph));
  json counts = json::object();
  for (const auto& [id, n] : record.call_counts) counts[id] = n;
  return {{"schema", kRecordSchema},
          {"question", record.question},
          {"answer", record.answer},
          {"degraded", record.degraded},
          {"degraded_reason", record.degraded_reason},
          {"iterations", record.iterations()},
          {"paths", std::move(paths)},
          {"evidence", chunks_json(record.evidence)},
          {"call_counts", std::move(counts)},
          {"reports", std::move(reports)},
          {"notes", record.notes}};
}

}  // namespace kgnav
