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

#include "kgnav/corpus.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "kgnav/errors.hpp"
#include "kgnav/text.hpp"

namespace kgnav {

void ChunkingParams::validate() const {
  if (size_words == 0) throw ParameterError("chunk size must be positive");
  if (overlap_words >= size_words) {
    throw ParameterError("chunk overlap must be smaller than chunk size");
  }
}

std::vector<Chunk> chunk_document(const Document& doc,
                                  const ChunkingParams& params) {
  params.validate();
  const auto words = text::split_words(doc.text);
  std::vector<Chunk> chunks;
  const size_t n = words.size();
  for (size_t start = 0; start < n; start += params.stride()) {
    const size_t end = std::min(start + params.size_words, n);
    Chunk chunk{doc.entity, chunks.size(), {}, {start, end}};
    for (size_t w = start; w < end; ++w) {
      if (w > start) chunk.text.push_back(' ');
      chunk.text.append(words[w]);
    }
    chunks.push_back(std::move(chunk));
    if (end == n) break;
  }
  return chunks;
}

bool Corpus::add(Document doc) {
  auto [it, inserted] = docs_.insert_or_assign(doc.entity, std::move(doc));
  return !inserted;
}

const Document* Corpus::find(const EntityId& entity) const {
  auto it = docs_.find(entity);
  return it == docs_.end() ? nullptr : &it->second;
}

CorpusLoad load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read " + path.string());

  CorpusLoad result;
  std::vector<size_t> bad;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto record = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!record.is_object()) {
      bad.push_back(line_no);
      continue;
    }
    auto id = record.find("entity_id");
    if (id == record.end() || !id->is_string() ||
        id->get_ref<const std::string&>().empty()) {
      bad.push_back(line_no);
      continue;
    }
    try {
      Document doc{EntityId(id->get<std::string>()),
                   record.value("title", std::string()),
                   record.value("text", std::string())};
      if (result.corpus.add(std::move(doc))) ++result.duplicate_count;
    } catch (const nlohmann::json::type_error&) {
      bad.push_back(line_no);
    }
  }
  if (!bad.empty()) throw MalformedRowError(path.string(), std::move(bad));
  return result;
}

}  // namespace kgnav
