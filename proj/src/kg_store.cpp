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

#include "kgnav/kg_store.hpp"

#include <algorithm>
#include <fstream>

#include "kgnav/errors.hpp"
#include "kgnav/text.hpp"

namespace kgnav {

std::string_view to_string(Direction d) noexcept {
  return d == Direction::kOutgoing ? "outgoing" : "incoming";
}

Direction parse_direction(std::string_view s) {
  if (s == "outgoing" || s == "out") return Direction::kOutgoing;
  if (s == "incoming" || s == "in") return Direction::kIncoming;
  throw ParameterError("unknown direction: " + std::string(s));
}

namespace {

bool valid_token(std::string_view s) {
  return !s.empty() && std::none_of(s.begin(), s.end(), text::is_space);
}

template <typename RowFn>
void read_rows(const std::filesystem::path& path, RowFn&& on_row) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read " + path.string());
  std::vector<size_t> bad;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.front() == '#') continue;
    if (!on_row(text::split(line, '\t'))) bad.push_back(line_no);
  }
  if (in.bad()) throw LoadError("read failure on " + path.string());
  if (!bad.empty()) throw MalformedRowError(path.string(), std::move(bad));
}

}  // namespace

GraphStore GraphStore::from_triples(
    std::vector<Triple> triples,
    std::unordered_map<EntityId, std::string> labels) {
  GraphStore store;
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  store.triples_ = std::move(triples);
  store.labels_ = std::move(labels);
  store.build_indexes();
  return store;
}

void GraphStore::build_indexes() {
  for (size_t i = 0; i < triples_.size(); ++i) {
    const Triple& t = triples_[i];
    outgoing_[t.head].push_back(i);
    incoming_[t.tail].push_back(i);
    labels_.try_emplace(t.head, t.head.str());
    labels_.try_emplace(t.tail, t.tail.str());
  }
  for (const auto& [id, label] : labels_) {
    by_label_[text::normalize_label(label)].push_back(id);
  }
  for (auto& [key, ids] : by_label_) std::sort(ids.begin(), ids.end());
}

bool GraphStore::contains(const Triple& t) const {
  return std::binary_search(triples_.begin(), triples_.end(), t);
}

bool GraphStore::has_entity(const EntityId& e) const {
  return outgoing_.contains(e) || incoming_.contains(e);
}

std::vector<RelationRef> GraphStore::relations_of(const EntityId& e) const {
  std::vector<RelationRef> out;
  if (auto it = outgoing_.find(e); it != outgoing_.end()) {
    for (size_t i : it->second) {
      out.push_back({triples_[i].relation, Direction::kOutgoing});
    }
  }
  if (auto it = incoming_.find(e); it != incoming_.end()) {
    for (size_t i : it->second) {
      out.push_back({triples_[i].relation, Direction::kIncoming});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<EntityId> GraphStore::neighbors(const EntityId& e,
                                            const RelationId& r,
                                            Direction direction) const {
  std::vector<EntityId> out;
  const auto& index = direction == Direction::kOutgoing ? outgoing_ : incoming_;
  if (auto it = index.find(e); it != index.end()) {
    for (size_t i : it->second) {
      const Triple& t = triples_[i];
      if (t.relation != r) continue;
      out.push_back(direction == Direction::kOutgoing ? t.tail : t.head);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<EntityId> GraphStore::resolve_label(std::string_view surface) const {
  auto it = by_label_.find(text::normalize_label(surface));
  if (it == by_label_.end()) return {};
  return it->second;
}

std::string GraphStore::label(const EntityId& e) const {
  auto it = labels_.find(e);
  return it == labels_.end() ? e.str() : it->second;
}

GraphStore load_graph(const std::filesystem::path& triples_path,
                      const std::filesystem::path& labels_path) {
  std::vector<Triple> triples;
  read_rows(triples_path, [&](const std::vector<std::string_view>& f) {
    if (f.size() != 3) return false;
    if (!valid_token(f[0]) || f[1].empty() || !valid_token(f[2])) return false;
    triples.push_back({EntityId(f[0]), RelationId(f[1]), EntityId(f[2])});
    return true;
  });

  std::unordered_map<EntityId, std::string> labels;
  if (!labels_path.empty()) {
    read_rows(labels_path, [&](const std::vector<std::string_view>& f) {
      if (f.size() != 2 || !valid_token(f[0])) return false;
      labels[EntityId(f[0])] = std::string(text::trim(f[1]));
      return true;
    });
  }
  return GraphStore::from_triples(std::move(triples), std::move(labels));
}

GraphStore load_graph(const std::filesystem::path& triples_path) {
  return load_graph(triples_path, {});
}

}  // namespace kgnav
