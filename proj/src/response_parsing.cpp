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

#include "kgnav/response_parsing.hpp"

#include <nlohmann/json.hpp>

#include "kgnav/text.hpp"

namespace kgnav::parsing {
namespace {

// Strips list bullets and markdown emphasis the model may wrap lines in.
std::string_view clean_line(std::string_view line) {
  line = text::trim(line);
  while (!line.empty() && (line.front() == '-' || line.front() == '*' ||
                           line.front() == '>' || line.front() == '`')) {
    line.remove_prefix(1);
    line = text::trim(line);
  }
  while (!line.empty() && (line.back() == '*' || line.back() == '`')) {
    line.remove_suffix(1);
  }
  return text::trim(line);
}

// Text after a "TAG:" marker, minus emphasis left over from "**TAG:** x".
std::string marker_value(std::string_view rest) {
  rest = text::trim(rest);
  while (!rest.empty() && (rest.front() == '*' || rest.front() == '`')) {
    rest.remove_prefix(1);
    rest = text::trim(rest);
  }
  return std::string(rest);
}

}  // namespace

std::optional<std::vector<std::string>> string_list(std::string_view response) {
  for (size_t start = response.find('['); start != std::string_view::npos;
       start = response.find('[', start + 1)) {
    for (size_t end = response.find(']', start); end != std::string_view::npos;
         end = response.find(']', end + 1)) {
      auto j = nlohmann::json::parse(response.substr(start, end - start + 1), nullptr, false);
      if (!j.is_array()) continue;
      std::vector<std::string> out;
      bool ok = true;
      for (const auto& v : j) {
        if (!v.is_string()) {
          ok = false;
          break;
        }
        out.push_back(v.get<std::string>());
      }
      if (ok) return out;
    }
  }
  return std::nullopt;
}

std::map<EntityId, std::string> tagged_lines(std::string_view response,
                                             std::string_view tag) {
  std::map<EntityId, std::string> out;
  const std::string prefix = std::string(tag) + "[";
  for (std::string_view raw : text::split(response, '\n')) {
    std::string_view line = clean_line(raw);
    if (!text::starts_with_ci(line, prefix)) continue;
    line.remove_prefix(prefix.size());
    const size_t close = line.find(']');
    if (close == std::string_view::npos) continue;
    const std::string_view id = text::trim(line.substr(0, close));
    std::string_view rest = text::trim(line.substr(close + 1));
    if (id.empty() || rest.empty() || rest.front() != ':') continue;
    rest.remove_prefix(1);
    out[EntityId(id)] = std::string(text::trim(rest));
  }
  return out;
}

std::optional<std::string> untagged_line(std::string_view response,
                                         std::string_view tag) {
  const std::string prefix = std::string(tag) + ":";
  for (std::string_view raw : text::split(response, '\n')) {
    std::string_view line = clean_line(raw);
    if (text::starts_with_ci(line, prefix)) {
      return marker_value(line.substr(prefix.size()));
    }
  }
  return std::nullopt;
}

std::vector<RelationChoice> relation_choices(std::string_view list) {
  std::vector<RelationChoice> out;
  std::string normalized(list);
  for (char& c : normalized) {
    if (c == ',') c = ';';
  }
  for (std::string_view item : text::split(normalized, ';')) {
    item = text::trim(item);
    if (item.empty()) continue;
    RelationChoice choice;
    if (item.back() == ')') {
      if (const size_t open = item.rfind('('); open != std::string_view::npos) {
        const std::string dir =
            text::to_lower(text::trim(item.substr(open + 1, item.size() - open - 2)));
        if (dir == "out" || dir == "outgoing") choice.direction = "outgoing";
        if (dir == "in" || dir == "incoming") choice.direction = "incoming";
        item = text::trim(item.substr(0, open));
      }
    }
    if (item.empty()) continue;
    choice.relation = std::string(item);
    out.push_back(std::move(choice));
  }
  return out;
}

ParsedVerdict verdict(std::string_view response) {
  ParsedVerdict out;
  out.rationale = std::string(text::trim(response));
  for (std::string_view raw : text::split(response, '\n')) {
    std::string_view line = clean_line(raw);
    if (text::starts_with_ci(line, "ANSWER:")) {
      out.kind = ParsedVerdict::Kind::kAnswer;
      out.answer = marker_value(line.substr(7));
      if (out.answer.empty()) out.kind = ParsedVerdict::Kind::kUnparsed;
      return out;
    }
    if (text::starts_with_ci(line, "CONTINUE")) {
      out.kind = ParsedVerdict::Kind::kContinue;
      out.clues = tagged_lines(response, "CLUE");
      return out;
    }
  }
  return out;
}

std::string final_answer(std::string_view response) {
  if (auto tagged = untagged_line(response, "ANSWER")) return *tagged;
  for (std::string_view raw : text::split(response, '\n')) {
    std::string_view line = clean_line(raw);
    if (!line.empty()) return std::string(line);
  }
  return {};
}

}  // namespace kgnav::parsing
