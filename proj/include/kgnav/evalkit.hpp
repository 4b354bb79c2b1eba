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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgnav/engine.hpp"

namespace kgnav::eval {

enum class Task { kQa, kFactVerification };

std::string_view to_string(Task task) noexcept;

struct QAExample {
  std::string id;
  std::string question;
  std::vector<std::string> gold_answers;
  Task task = Task::kQa;
};

// Lowercase, drop ASCII punctuation, drop the standalone words a/an/the and
// collapse whitespace.
std::string normalize_answer(std::string_view s);

// True when the normalized prediction equals any normalized gold answer.
// `golds` must be non-empty.
bool exact_match(std::string_view prediction, const std::vector<std::string>& golds);

// Line-delimited records {"id", "question", "answers": [...], "task"}.
// `task` is "qa" (default) or "fact_verification"; fact verification golds
// must normalize to "supports" or "refutes".
std::vector<QAExample> load_dataset(const std::filesystem::path& path);

struct ExampleResult {
  std::string id;
  Task task = Task::kQa;
  std::string prediction;
  bool hit = false;
  bool degraded = false;
  size_t iterations = 0;
  std::map<std::string, size_t> call_counts;
  std::optional<std::string> error;
};

struct MetricReport {
  size_t n = 0;
  size_t qa_total = 0;
  size_t qa_hits = 0;
  size_t fact_total = 0;
  size_t fact_hits = 0;
  std::optional<double> em;        // over qa examples
  std::optional<double> accuracy;  // over fact verification examples
  std::map<std::string, double> mean_call_counts;
  std::vector<ExampleResult> examples;  // sorted by id
};

// Recomputes every aggregate from `examples` (sorted by id in the result).
MetricReport aggregate(std::vector<ExampleResult> examples);

// Scores fixed predictions, keyed by example id. Missing ids count as misses.
MetricReport score_predictions(const std::vector<QAExample>& dataset,
                               const std::map<std::string, std::string>& predictions);

using Answerer = std::function<AnswerRecord(const std::string& question)>;

// Runs `answer` on every example, up to `parallelism` at a time. An example
// whose run throws is recorded as a miss with the error message.
MetricReport run_benchmark(const std::vector<QAExample>& dataset, const Answerer& answer,
                           size_t parallelism = 1);

MetricReport run_benchmark(const std::vector<QAExample>& dataset, const Engine& engine,
                           size_t parallelism = 1);

nlohmann::json to_json(const ExampleResult& r);
nlohmann::json summary_json(const MetricReport& report);

// One summary line, e.g. "n=2 em=1.000 accuracy=n/a".
std::string summary_line(const MetricReport& report);

// Human-readable per-example table followed by the summary line.
std::string format_table(const MetricReport& report);

// Writes `<dir>/report.jsonl`: one record per example and a final summary
// record. Creates the directory when missing.
std::filesystem::path write_report(const MetricReport& report, const std::filesystem::path& dir);

}  // namespace kgnav::eval
