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

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace kgnav {

enum class TemplateId {
  kEntityExtraction,
  kTopicPrune,
  kClueQuery,
  kRelationPruneBatched,
  kRelationPruneSingle,
  kExamineReason,
  kFinalAnswer,
};

inline constexpr std::array<TemplateId, 7> kAllTemplates = {
    TemplateId::kEntityExtraction,     TemplateId::kTopicPrune,
    TemplateId::kClueQuery,            TemplateId::kRelationPruneBatched,
    TemplateId::kRelationPruneSingle,  TemplateId::kExamineReason,
    TemplateId::kFinalAnswer,
};

std::string_view to_string(TemplateId id) noexcept;
std::optional<TemplateId> parse_template_id(std::string_view name);

using Bindings = std::map<std::string, std::string, std::less<>>;

// A prompt with two worked demonstrations. Template files are split into
// sections by marker lines:
//
//   === instruction ===
//   === example ===      (exactly twice)
//   === input ===
//
// `{name}` placeholders are expanded in the instruction and input sections;
// `{{` and `}}` produce literal braces. Demonstrations are copied verbatim.
struct PromptTemplate {
  TemplateId id = TemplateId::kFinalAnswer;
  std::string instruction;
  std::array<std::string, 2> demonstrations;
  std::string input;

  // Throws ConfigError when the text is not a well-formed template.
  static PromptTemplate parse(TemplateId id, std::string_view text);
};

// Single-pass substitution: bound values are inserted literally and never
// re-expanded. Throws RenderError naming the first unbound placeholder.
std::string expand_placeholders(std::string_view body, const Bindings& bindings);

// Rendered prompts are: instruction, "### Example 1", "### Example 2", then
// the task after kTaskMarker.
inline constexpr std::string_view kTaskMarker = "\n### Task\n";

std::string render(const PromptTemplate& tmpl, const Bindings& bindings);

// The part of a rendered prompt after the last task marker (the whole text
// when there is none).
std::string_view task_section(std::string_view prompt) noexcept;

class PromptLibrary {
 public:
  // Templates compiled into the library from the prompts/ directory.
  static const PromptLibrary& builtin();
  // Loads `<dir>/<template_id>.txt` for every template id.
  static PromptLibrary from_directory(const std::filesystem::path& dir);

  const PromptTemplate& get(TemplateId id) const;
  std::string render(TemplateId id, const Bindings& bindings) const;

 private:
  std::map<TemplateId, PromptTemplate> templates_;
};

}  // namespace kgnav
