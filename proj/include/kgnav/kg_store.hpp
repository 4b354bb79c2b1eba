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

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgnav/ids.hpp"

namespace kgnav {

// Incoming sorts before outgoing, matching the lexicographic order of the
// direction names.
enum class Direction { kIncoming = 0, kOutgoing = 1 };

std::string_view to_string(Direction d) noexcept;
Direction parse_direction(std::string_view s);

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// A triple as seen while walking the graph from one of its endpoints.
struct PathStep {
  Triple triple;
  Direction direction = Direction::kOutgoing;

  // Entity the walk left from and the entity it reached.
  const EntityId& from() const noexcept {
    return direction == Direction::kOutgoing ? triple.head : triple.tail;
  }
  const EntityId& to() const noexcept {
    return direction == Direction::kOutgoing ? triple.tail : triple.head;
  }

  friend bool operator==(const PathStep&, const PathStep&) = default;
  friend auto operator<=>(const PathStep&, const PathStep&) = default;
};

struct RelationRef {
  RelationId relation;
  Direction direction = Direction::kOutgoing;

  friend bool operator==(const RelationRef&, const RelationRef&) = default;
  friend auto operator<=>(const RelationRef&, const RelationRef&) = default;
};

// Immutable directed labeled multigraph. Safe for concurrent readers.
class GraphStore {
 public:
  GraphStore() = default;

  // Builds a store from in-memory triples. Duplicates are dropped and any
  // entity without a label is labeled with its own id.
  static GraphStore from_triples(
      std::vector<Triple> triples,
      std::unordered_map<EntityId, std::string> labels = {});

  size_t size() const noexcept { return triples_.size(); }
  // Sorted, duplicate-free.
  std::span<const Triple> triples() const noexcept { return triples_; }

  bool contains(const Triple& t) const;
  bool has_entity(const EntityId& e) const;

  std::vector<RelationRef> relations_of(const EntityId& e) const;
  std::vector<EntityId> neighbors(const EntityId& e, const RelationId& r,
                                  Direction direction) const;
  std::vector<EntityId> resolve_label(std::string_view surface) const;

  // Human-readable label; the id itself when none was loaded.
  std::string label(const EntityId& e) const;

 private:
  void build_indexes();

  std::vector<Triple> triples_;
  std::unordered_map<EntityId, std::vector<size_t>> outgoing_;
  std::unordered_map<EntityId, std::vector<size_t>> incoming_;
  std::unordered_map<EntityId, std::string> labels_;
  std::unordered_map<std::string, std::vector<EntityId>> by_label_;
};

// Reads `head<TAB>relation<TAB>tail` rows and optional `id<TAB>label` rows.
// Lines starting with '#' and blank lines are skipped. Throws LoadError for
// unreadable files and MalformedRowError listing every bad line.
GraphStore load_graph(const std::filesystem::path& triples_path,
                      const std::filesystem::path& labels_path);

GraphStore load_graph(const std::filesystem::path& triples_path);

}  // namespace kgnav
