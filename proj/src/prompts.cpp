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

#include "kgnav/prompts.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "kgnav/errors.hpp"
#include "kgnav/text.hpp"

namespace kgnav {

// Defined in the generated builtin_prompts.cpp.
std::string_view builtin_prompt_text(std::string_view template_name);

std::string_view to_string(TemplateId id) noexcept {
  switch (id) {
    case TemplateId::kEntityExtraction: return "entity_extraction";
    case TemplateId::kTopicPrune: return "topic_prune";
    case TemplateId::kClueQuery: return "clue_query";
    case TemplateId::kRelationPruneBatched: return "relation_prune_batched";
    case TemplateId::kRelationPruneSingle: return "relation_prune_single";
    case TemplateId::kExamineReason: return "examine_reason";
    case TemplateId::kFinalAnswer: return "final_answer";
  }
  return "unknown";
}

std::optional<TemplateId> parse_template_id(std::string_view name) {
  for (TemplateId id : kAllTemplates) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

namespace {

enum class Section { kNone, kInstruction, kExample, kInput };

std::optional<Section> marker(std::string_view line) {
  line = text::trim(line);
  if (line == "=== instruction ===") return Section::kInstruction;
  if (line == "=== example ===") return Section::kExample;
  if (line == "=== input ===") return Section::kInput;
  return std::nullopt;
}

std::string strip_blank_edges(const std::string& s) {
  // Keep interior formatting, drop leading/trailing blank lines.
  size_t begin = 0;
  while (begin < s.size() && (s[begin] == '\n' || s[begin] == '\r')) ++begin;
  size_t end = s.size();
  while (end > begin && text::is_space(s[end - 1])) --end;
  return s.substr(begin, end - begin);
}

bool placeholder_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

}  // namespace

PromptTemplate PromptTemplate::parse(TemplateId id, std::string_view body) {
  PromptTemplate tmpl;
  tmpl.id = id;
  std::vector<std::string> examples;
  std::string* target = nullptr;
  bool seen_instruction = false, seen_input = false;

  for (std::string_view line : text::split(body, '\n')) {
    if (auto m = marker(line)) {
      switch (*m) {
        case Section::kInstruction:
          if (seen_instruction) throw ConfigError("duplicate instruction section");
          seen_instruction = true;
          target = &tmpl.instruction;
          break;
        case Section::kExample:
          examples.emplace_back();
          target = &examples.back();
          break;
        case Section::kInput:
          if (seen_input) throw ConfigError("duplicate input section");
          seen_input = true;
          target = &tmpl.input;
          break;
        case Section::kNone:
          break;
      }
      continue;
    }
    if (target == nullptr) {
      if (!text::trim(line).empty()) {
        throw ConfigError("template text before the first section marker");
      }
      continue;
    }
    target->append(line);
    target->push_back('\n');
  }

  const std::string name(to_string(id));
  if (!seen_instruction || !seen_input) {
    throw ConfigError("template " + name + " needs instruction and input sections");
  }
  if (examples.size() != 2) {
    throw ConfigError("template " + name + " must carry exactly 2 demonstrations, found " +
                      std::to_string(examples.size()));
  }
  tmpl.instruction = strip_blank_edges(tmpl.instruction);
  tmpl.input = strip_blank_edges(tmpl.input);
  tmpl.demonstrations = {strip_blank_edges(examples[0]),
                         strip_blank_edges(examples[1])};
  return tmpl;
}

std::string expand_placeholders(std::string_view body, const Bindings& bindings) {
  std::string out;
  out.reserve(body.size());
  for (size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if ((c == '{' || c == '}') && i + 1 < body.size() && body[i + 1] == c) {
      out.push_back(c);
      ++i;
      continue;
    }
    if (c == '{') {
      size_t j = i + 1;
      while (j < body.size() && placeholder_char(body[j])) ++j;
      if (j < body.size() && body[j] == '}' && j > i + 1) {
        const std::string_view name = body.substr(i + 1, j - i - 1);
        auto it = bindings.find(name);
        if (it == bindings.end()) throw RenderError(std::string(name));
        out += it->second;
        i = j;
        continue;
      }
    }
    out.push_back(c);
  }
  return out;
}

std::string render(const PromptTemplate& tmpl, const Bindings& bindings) {
  std::string out = expand_placeholders(tmpl.instruction, bindings);
  for (size_t i = 0; i < tmpl.demonstrations.size(); ++i) {
    out += "\n\n### Example " + std::to_string(i + 1) + "\n";
    out += tmpl.demonstrations[i];
  }
  out += "\n";
  out += kTaskMarker;
  out += expand_placeholders(tmpl.input, bindings);
  return out;
}

std::string_view task_section(std::string_view prompt) noexcept {
  const size_t pos = prompt.rfind(kTaskMarker);
  return pos == std::string_view::npos ? prompt : prompt.substr(pos + kTaskMarker.size());
}

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary library = [] {
    PromptLibrary lib;
    for (TemplateId id : kAllTemplates) {
      lib.templates_.emplace(id, PromptTemplate::parse(id, builtin_prompt_text(to_string(id))));
    }
    return lib;
  }();
  return library;
}

PromptLibrary PromptLibrary::from_directory(const std::filesystem::path& dir) {
  PromptLibrary lib;
  for (TemplateId id : kAllTemplates) {
    const auto path = dir / (std::string(to_string(id)) + ".txt");
    std::ifstream in(path);
    if (!in) throw LoadError("cannot read prompt template " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    lib.templates_.emplace(id, PromptTemplate::parse(id, buf.str()));
  }
  return lib;
}

const PromptTemplate& PromptLibrary::get(TemplateId id) const {
  return templates_.at(id);
}

std::string PromptLibrary::render(TemplateId id, const Bindings& bindings) const {
  return kgnav::render(get(id), bindings);
}

}  // namespace kgnav
