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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgnav/ids.hpp"

// Parsers for the line grammars the prompt templates ask the model to use.
// All of them tolerate surrounding prose.
namespace kgnav::parsing {

// First JSON array of strings found in the text, or nullopt.
std::optional<std::vector<std::string>> string_list(std::string_view response);

// `TAG[<entity_id>]: <text>` lines, e.g. CLUE[npc]: ... or RELATIONS[x]: ...
// Later lines for the same id replace earlier ones.
std::map<EntityId, std::string> tagged_lines(std::string_view response,
                                             std::string_view tag);

// `TAG: <text>` with no id (single-entity replies). First match wins.
std::optional<std::string> untagged_line(std::string_view response,
                                         std::string_view tag);

struct RelationChoice {
  std::string relation;
  std::optional<std::string> direction;  // "incoming" / "outgoing"
};

// Items separated by ';' or ',' of the form `name`, `name (out)` or
// `name (incoming)`.
std::vector<RelationChoice> relation_choices(std::string_view list);

struct ParsedVerdict {
  enum class Kind { kAnswer, kContinue, kUnparsed };
  Kind kind = Kind::kUnparsed;
  std::string answer;
  std::map<EntityId, std::string> clues;
  std::string rationale;
};

// `ANSWER: <text>` or a `CONTINUE` line followed by CLUE lines. Whichever
// marker appears first decides.
ParsedVerdict verdict(std::string_view response);

// `ANSWER: <text>` when present, else the first non-empty line.
std::string final_answer(std::string_view response);

}  // namespace kgnav::parsing
