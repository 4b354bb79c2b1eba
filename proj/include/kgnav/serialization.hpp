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

#include <nlohmann/json.hpp>

#include "kgnav/engine.hpp"

namespace kgnav {

inline constexpr int kRecordSchema = 1;

nlohmann::json to_json(const PathStep& step);
nlohmann::json to_json(const ScoredChunk& chunk);
nlohmann::json to_json(const TriplePath& path, const GraphStore& graph);

// Full answer record, including per-iteration reports. Key order and number
// formatting are stable, so equal records dump to identical bytes.
nlohmann::json to_json(const AnswerRecord& record, const GraphStore& graph);

}  // namespace kgnav
