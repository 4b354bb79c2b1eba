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

#include <string>
#include <string_view>
#include <vector>

// Small ASCII-oriented string helpers. Bytes >= 0x80 pass through untouched,
// so UTF-8 input is never split mid-codepoint.
namespace kgnav::text {

bool is_space(char c) noexcept;

std::string_view trim(std::string_view s) noexcept;

std::string to_lower(std::string_view s);

// Trim, collapse internal whitespace runs to one space, and lowercase.
std::string normalize_label(std::string_view s);

// Maximal runs of non-whitespace characters.
std::vector<std::string_view> split_words(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_ci(std::string_view s, std::string_view prefix) noexcept;

}  // namespace kgnav::text
