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
#include <string>
#include <unordered_map>
#include <vector>

#include "kgnav/ids.hpp"

namespace kgnav {

struct Document {
  EntityId entity;
  std::string title;
  std::string text;
};

struct WordSpan {
  size_t start = 0;  // inclusive word index
  size_t end = 0;    // exclusive word index

  friend bool operator==(const WordSpan&, const WordSpan&) = default;
};

struct Chunk {
  EntityId entity;
  size_t index = 0;
  std::string text;
  WordSpan span;
};

struct ChunkingParams {
  size_t size_words = 100;
  size_t overlap_words = 20;

  // Throws ParameterError unless size > 0 and overlap < size.
  void validate() const;
  size_t stride() const noexcept { return size_words - overlap_words; }
};

// Sliding window over whitespace-delimited words. The last window may be
// shorter than size_words; empty text yields no chunks.
std::vector<Chunk> chunk_document(const Document& doc,
                                  const ChunkingParams& params);

// One document per entity. Immutable after load.
class Corpus {
 public:
  Corpus() = default;

  // Later documents for the same entity replace earlier ones. Returns true
  // when an existing document was replaced.
  bool add(Document doc);

  const Document* find(const EntityId& entity) const;
  size_t size() const noexcept { return docs_.size(); }

 private:
  std::unordered_map<EntityId, Document> docs_;
};

struct CorpusLoad {
  Corpus corpus;
  size_t duplicate_count = 0;
};

// One JSON object per line with `entity_id`, `title` and `text`. Missing
// title/text default to empty; a missing or non-string entity_id is a
// MalformedRowError.
CorpusLoad load_corpus(const std::filesystem::path& path);

}  // namespace kgnav
