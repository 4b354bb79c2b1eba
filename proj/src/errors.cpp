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

#include "kgnav/errors.hpp"

#include <utility>

namespace kgnav {
namespace {

std::string describe_lines(const std::string& path,
                           const std::vector<size_t>& lines) {
  std::string msg = "malformed rows in " + path + " at line";
  msg += lines.size() == 1 ? " " : "s ";
  for (size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) msg += ", ";
    msg += std::to_string(lines[i]);
  }
  return msg;
}

}  // namespace

MalformedRowError::MalformedRowError(std::string path, std::vector<size_t> lines)
    : LoadError(describe_lines(path, lines)),
      path_(std::move(path)),
      lines_(std::move(lines)) {}

RenderError::RenderError(std::string placeholder)
    : Error("unbound placeholder: " + placeholder),
      placeholder_(std::move(placeholder)) {}

ReplayMissError::ReplayMissError(std::string key)
    : Error("replay miss for key " + key), key_(std::move(key)) {}

}  // namespace kgnav
