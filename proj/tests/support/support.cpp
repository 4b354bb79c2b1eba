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

#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "kgnav/prompts.hpp"
#include "kgnav/text.hpp"

#ifndef KGNAV_FIXTURES_DIR
#error "KGNAV_FIXTURES_DIR must be defined"
#endif

namespace kgnav::testing {

namespace fs = std::filesystem;

fs::path fixture_path(const std::string& relative) {
  return fs::path(KGNAV_FIXTURES_DIR) / relative;
}

TempDir::TempDir() {
  static std::atomic<uint64_t> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() /
          ("kgnav-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

size_t uniform(Rng& rng, size_t lo, size_t hi) {
  return std::uniform_int_distribution<size_t>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

namespace {

const std::vector<std::string> kVocabulary = {
    "river", "company", "founded", "city", "member", "award", "film", "director",
    "school", "studied", "born", "capital", "province", "leader", "product", "released",
    "album", "team", "league", "player", "coach", "museum", "painting", "author",
    "novel", "bridge", "railway", "station", "island", "mountain", "elected", "council"};

std::string entity_label(size_t i) { return "Entity " + std::to_string(i); }

}  // namespace

RandomWorld random_world(Rng& rng) {
  RandomWorld w;
  const size_t n = uniform(rng, 4, 24);
  const size_t m = uniform(rng, 1, 5);
  std::unordered_map<EntityId, std::string> labels;
  for (size_t i = 0; i < n; ++i) {
    w.entities.emplace_back("e" + std::to_string(i));
    labels[w.entities.back()] = entity_label(i);
  }
  auto relation = [&] { return RelationId("r" + std::to_string(uniform(rng, 0, m - 1))); };

  std::vector<Triple> triples;
  for (size_t i = 1; i < n; ++i) {
    const size_t j = uniform(rng, 0, i - 1);
    if (coin(rng)) {
      triples.push_back({w.entities[j], relation(), w.entities[i]});
    } else {
      triples.push_back({w.entities[i], relation(), w.entities[j]});
    }
  }
  const size_t extra = uniform(rng, 0, 2 * n);
  for (size_t k = 0; k < extra; ++k) {
    const size_t a = uniform(rng, 0, n - 1);
    const size_t b = uniform(rng, 0, n - 1);
    if (a != b) triples.push_back({w.entities[a], relation(), w.entities[b]});
  }
  w.graph = GraphStore::from_triples(std::move(triples), std::move(labels));

  for (size_t i = 0; i < n; ++i) {
    if (coin(rng, 0.15)) continue;  // some entities have no document
    std::string body = entity_label(i) + " is";
    const size_t words = uniform(rng, 3, 60);
    for (size_t k = 0; k < words; ++k) {
      body += ' ';
      body += coin(rng, 0.1) ? entity_label(uniform(rng, 0, n - 1))
                             : kVocabulary[uniform(rng, 0, kVocabulary.size() - 1)];
    }
    w.corpus.add({w.entities[i], entity_label(i), body});
  }

  const size_t mentions = uniform(rng, 1, 3);
  w.question = "How is";
  for (size_t k = 0; k < mentions; ++k) {
    if (k > 0) w.question += " related to";
    w.question += ' ' + entity_label(uniform(rng, 0, n - 1));
  }
  w.question += " by " + kVocabulary[uniform(rng, 0, kVocabulary.size() - 1)] + "?";
  return w;
}

RandomWorld layered_world(size_t fanout, size_t depth) {
  RandomWorld w;
  std::vector<Triple> triples;
  std::unordered_map<EntityId, std::string> labels;
  std::vector<std::string> layer = {"root"};
  w.entities.emplace_back("root");
  labels[EntityId("root")] = "Root";
  for (size_t d = 0; d < depth; ++d) {
    std::vector<std::string> next;
    for (const auto& parent : layer) {
      for (size_t c = 0; c < fanout; ++c) {
        const std::string child = parent + "_" + std::to_string(c);
        triples.push_back({EntityId(parent), RelationId("child"), EntityId(child)});
        w.entities.emplace_back(child);
        labels[EntityId(child)] = "Node " + child;
        next.push_back(child);
      }
    }
    layer = std::move(next);
  }
  for (const auto& e : w.entities) {
    w.corpus.add({e, labels[e], labels[e] + " is a node of the layered graph reached from Root"});
  }
  w.graph = GraphStore::from_triples(std::move(triples), std::move(labels));
  w.question = "Which leaf can be reached from Root?";
  return w;
}

namespace {

std::vector<std::string> lines_of(std::string_view s) {
  std::vector<std::string> out;
  for (auto part : text::split(s, '\n')) out.emplace_back(part);
  return out;
}

// Ids introduced as "- <id> (" at the start of a line.
std::vector<std::string> listed_ids(std::string_view task) {
  static const std::regex re(R"(^- (\S+) \()");
  std::vector<std::string> out;
  for (const auto& line : lines_of(task)) {
    std::smatch m;
    if (std::regex_search(line, m, re)) out.push_back(m[1]);
  }
  return out;
}

template <typename T>
std::vector<T> random_subset(const std::vector<T>& items, size_t max_size, Rng& rng) {
  std::vector<T> shuffled = items;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const size_t k = uniform(rng, 1, std::max<size_t>(1, std::min(max_size, items.size())));
  shuffled.resize(std::min(k, shuffled.size()));
  return shuffled;
}

std::string pick_relations(const std::string& listing, const PolicyOptions& opt, Rng& rng) {
  std::vector<std::string> candidates;
  for (const auto& part : text::split(listing, ';')) {
    const auto t = text::trim(part);
    if (!t.empty() && t != "(none)") candidates.emplace_back(t);
  }
  std::vector<std::string> chosen =
      opt.select_all_relations ? candidates : random_subset(candidates, opt.max_relations, rng);
  if (!opt.select_all_relations && coin(rng, opt.hallucination_probability)) {
    chosen.push_back("made_up_relation (out)");
  }
  return text::join(chosen, "; ");
}

ChatResponse policy_reply(const PolicyOptions& opt, const ChatRequest& request) {
  const std::string prompt = request.messages.back().content;
  const std::string task(task_section(prompt));
  Rng rng(opt.seed ^ std::hash<std::string>{}(request.template_id + '\x1f' + task));
  const std::string& id = request.template_id;

  if (coin(rng, opt.garbage_probability) && id != "entity_extraction") {
    return {"I am not sure how to respond to that.", "stop"};
  }

  if (id == "entity_extraction") {
    static const std::regex re(R"(Entity \d+|Root)");
    std::vector<std::string> mentions;
    const std::string question = lines_of(task).front();
    for (std::sregex_iterator it(question.begin(), question.end(), re), end; it != end; ++it) {
      mentions.push_back(it->str());
    }
    if (coin(rng, opt.hallucination_probability)) mentions.push_back("Nowhere Land");
    std::string out = "[";
    for (size_t i = 0; i < mentions.size(); ++i) {
      out += (i ? ", \"" : "\"") + mentions[i] + "\"";
    }
    return {out + "]", "stop"};
  }

  if (id == "topic_prune") {
    const auto ids = random_subset(listed_ids(task), 3, rng);
    std::string out = "[";
    for (size_t i = 0; i < ids.size(); ++i) out += (i ? ", \"" : "\"") + ids[i] + "\"";
    return {out + "]", "stop"};
  }

  if (id == "clue_query") {
    std::string out;
    for (const auto& e : listed_ids(task)) {
      if (coin(rng, 0.1)) continue;
      out += "CLUE[" + e + "]: facts about " + e + "\n";
    }
    return {out, "stop"};
  }

  if (id == "relation_prune_batched" || id == "relation_prune_single") {
    static const std::regex entity_re(R"(^Entity: (\S+) \()");
    const std::string prefix = "Candidate relations: ";
    std::string current, out;
    for (const auto& line : lines_of(task)) {
      std::smatch m;
      if (std::regex_search(line, m, entity_re)) current = m[1];
      if (text::starts_with_ci(line, prefix)) {
        const std::string chosen = pick_relations(line.substr(prefix.size()), opt, rng);
        out += id == "relation_prune_single" ? "RELATIONS: " + chosen + "\n"
                                             : "RELATIONS[" + current + "]: " + chosen + "\n";
      }
    }
    return {out, "stop"};
  }

  if (id == "examine_reason") {
    const auto ids = listed_ids(task);
    if (coin(rng, opt.answer_probability)) {
      return {"ANSWER: " + (ids.empty() ? std::string("unknown") : ids.front()), "stop"};
    }
    std::string out = "CONTINUE\n";
    for (const auto& e : ids) {
      if (coin(rng, 0.6)) out += "CLUE[" + e + "]: next facts about " + e + "\n";
    }
    return {out, "stop"};
  }

  return {"ANSWER: best guess", "stop"};
}

}  // namespace

std::shared_ptr<ChatTransport> policy_transport(PolicyOptions options) {
  return std::make_shared<FunctionTransport>(
      [options](const ChatRequest& r) { return policy_reply(options, r); });
}

ChatResponse CapturingTransport::send(const ChatRequest& request) {
  {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
  }
  return inner_->send(request);
}

std::vector<ChatRequest> CapturingTransport::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::vector<std::string> CapturingTransport::prompts_for(const std::string& template_id) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& r : requests_) {
    if (r.template_id == template_id) out.push_back(r.messages.back().content);
  }
  return out;
}

std::vector<Vector> ScoreEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<Vector> out;
  for (const auto& t : texts) {
    if (t.rfind("score:", 0) == 0) {
      const double s = std::stod(t.substr(6));
      out.push_back({s, std::sqrt(std::max(0.0, 1.0 - s * s))});
    } else {
      out.push_back({1.0, 0.0});
    }
  }
  return out;
}

double decayed_sum_oracle(const std::vector<double>& scores_desc, double alpha, size_t top_k,
                          size_t rank_origin) {
  using boost::multiprecision::cpp_dec_float_50;
  cpp_dec_float_50 total = 0;
  const size_t n = std::min(top_k, scores_desc.size());
  for (size_t i = 0; i < n; ++i) {
    const cpp_dec_float_50 rank = static_cast<unsigned long long>(i + rank_origin);
    total += cpp_dec_float_50(scores_desc[i]) * exp(-cpp_dec_float_50(alpha) * rank);
  }
  return static_cast<double>(total);
}

double cosine_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  long double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return static_cast<double>(dot / (std::sqrt(na) * std::sqrt(nb)));
}

namespace {

std::string path_problem(const TriplePath& path, const GraphStore& graph) {
  const auto triples = graph.triples();
  for (size_t i = 0; i < path.size(); ++i) {
    const Triple& t = path[i].triple;
    if (std::find(triples.begin(), triples.end(), t) == triples.end()) {
      return "triple " + t.head.str() + " " + t.relation.str() + " " + t.tail.str() +
             " is not in the graph";
    }
    if (i > 0 && path[i].from() != path[i - 1].to()) {
      return "step " + std::to_string(i) + " does not continue from " + path[i - 1].to().str();
    }
  }
  return "";
}

}  // namespace

std::string check_record_invariants(const AnswerRecord& record, const GraphStore& graph,
                                    const EngineConfig& config) {
  if (record.iterations() > config.max_depth) return "more iterations than max_depth";
  if (record.degraded == record.degraded_reason.empty()) {
    return "degraded flag and reason disagree";
  }
  if (record.reports.empty() && record.degraded_reason != "no starting point") {
    return "no iterations without a missing starting point";
  }
  if (!record.degraded && record.reports.back().verdict != "answer") {
    return "undegraded answer without an answer verdict";
  }
  if (record.evidence.size() > config.top_l) return "record evidence exceeds top_l";

  std::set<EntityId> candidates;
  for (size_t i = 0; i < record.reports.size(); ++i) {
    const IterationReport& r = record.reports[i];
    if (r.iteration != i) return "iteration numbers out of order";
    if (i > 0 && r.topics.size() > config.width) return "beam wider than width";
    if (r.survivors.size() > config.width) return "more survivors than width";
    if (r.evidence.size() > config.top_l) return "iteration evidence exceeds top_l";
    if (r.verdict == "answer" && i + 1 != record.reports.size()) {
      return "loop continued after an answer";
    }
    std::set<EntityId> seen;
    for (const auto& s : r.survivors) {
      if (!seen.insert(s.entity).second) return "duplicate survivor " + s.entity.str();
      if (s.path.size() != i + 1) return "survivor path length differs from depth";
      if (s.path.back().to() != s.entity) return "survivor path does not end at survivor";
      if (auto p = path_problem(s.path, graph); !p.empty()) return p;
      std::set<EntityId> visited{s.path.front().from()};
      for (const auto& step : s.path) {
        if (!visited.insert(step.to()).second) return "path revisits " + step.to().str();
      }
      candidates.insert(s.entity);
    }
    if (i + 1 < record.reports.size()) {
      std::set<EntityId> next(record.reports[i + 1].topics.begin(),
                              record.reports[i + 1].topics.end());
      if (next != seen) return "next topics differ from survivors";
    }
    for (const auto& c : r.evidence) {
      if (!seen.contains(c.chunk.entity)) return "evidence from a non-survivor";
    }
  }
  for (const auto& c : record.evidence) {
    if (!candidates.contains(c.chunk.entity)) return "record evidence from unknown entity";
  }
  for (const auto& p : record.paths) {
    if (p.empty() || p.size() > record.iterations()) return "reported path has bad length";
    if (auto problem = path_problem(p, graph); !problem.empty()) return problem;
  }
  return "";
}

}  // namespace kgnav::testing
