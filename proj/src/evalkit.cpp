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

#include "kgnav/evalkit.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "kgnav/errors.hpp"
#include "kgnav/text.hpp"

namespace kgnav::eval {

using nlohmann::json;

std::string_view to_string(Task task) noexcept {
  return task == Task::kQa ? "qa" : "fact_verification";
}

namespace {

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) || (u >= 91 && u <= 96) ||
         (u >= 123 && u <= 126);
}

}  // namespace

std::string normalize_answer(std::string_view s) {
  std::string cleaned;
  cleaned.reserve(s.size());
  for (char c : s) {
    if (is_ascii_punct(c)) continue;
    cleaned.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
  }
  std::string out;
  for (std::string_view word : text::split_words(cleaned)) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out.append(word);
  }
  return out;
}

bool exact_match(std::string_view prediction, const std::vector<std::string>& golds) {
  if (golds.empty()) throw ContractViolation("exact_match needs at least one gold answer");
  const std::string pred = normalize_answer(prediction);
  return std::any_of(golds.begin(), golds.end(),
                     [&](const std::string& g) { return normalize_answer(g) == pred; });
}

std::vector<QAExample> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read dataset " + path.string());
  std::vector<QAExample> out;
  std::vector<size_t> bad;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto j = json::parse(line, nullptr, false);
    try {
      QAExample ex;
      ex.id = j.at("id").get<std::string>();
      ex.question = j.at("question").get<std::string>();
      ex.gold_answers = j.at("answers").get<std::vector<std::string>>();
      const std::string task = j.value("task", std::string("qa"));
      if (task == "qa") {
        ex.task = Task::kQa;
      } else if (task == "fact_verification") {
        ex.task = Task::kFactVerification;
      } else {
        bad.push_back(line_no);
        continue;
      }
      bool ok = !ex.id.empty() && !ex.gold_answers.empty();
      if (ex.task == Task::kFactVerification) {
        for (const auto& g : ex.gold_answers) {
          const auto n = normalize_answer(g);
          ok = ok && (n == "supports" || n == "refutes");
        }
      }
      if (!ok) {
        bad.push_back(line_no);
        continue;
      }
      out.push_back(std::move(ex));
    } catch (const json::exception&) {
      bad.push_back(line_no);
    }
  }
  if (!bad.empty()) throw MalformedRowError(path.string(), std::move(bad));
  return out;
}

MetricReport aggregate(std::vector<ExampleResult> examples) {
  std::sort(examples.begin(), examples.end(),
            [](const ExampleResult& a, const ExampleResult& b) { return a.id < b.id; });
  MetricReport r;
  r.n = examples.size();
  std::map<std::string, size_t> call_totals;
  for (const auto& ex : examples) {
    if (ex.task == Task::kQa) {
      ++r.qa_total;
      r.qa_hits += ex.hit ? 1 : 0;
    } else {
      ++r.fact_total;
      r.fact_hits += ex.hit ? 1 : 0;
    }
    for (const auto& [id, n] : ex.call_counts) call_totals[id] += n;
  }
  if (r.qa_total > 0) r.em = static_cast<double>(r.qa_hits) / static_cast<double>(r.qa_total);
  if (r.fact_total > 0) {
    r.accuracy = static_cast<double>(r.fact_hits) / static_cast<double>(r.fact_total);
  }
  for (const auto& [id, total] : call_totals) {
    r.mean_call_counts[id] = static_cast<double>(total) / static_cast<double>(r.n);
  }
  r.examples = std::move(examples);
  return r;
}

MetricReport score_predictions(const std::vector<QAExample>& dataset,
                               const std::map<std::string, std::string>& predictions) {
  std::vector<ExampleResult> results;
  for (const auto& ex : dataset) {
    ExampleResult r;
    r.id = ex.id;
    r.task = ex.task;
    if (auto it = predictions.find(ex.id); it != predictions.end()) {
      r.prediction = it->second;
      r.hit = exact_match(r.prediction, ex.gold_answers);
    } else {
      r.error = "no prediction";
    }
    results.push_back(std::move(r));
  }
  return aggregate(std::move(results));
}

MetricReport run_benchmark(const std::vector<QAExample>& dataset, const Answerer& answer,
                           size_t parallelism) {
  if (dataset.empty()) throw ParameterError("empty dataset");
  auto run_one = [&](const QAExample& ex) {
    ExampleResult r;
    r.id = ex.id;
    r.task = ex.task;
    try {
      const AnswerRecord record = answer(ex.question);
      r.prediction = record.answer;
      r.degraded = record.degraded;
      r.iterations = record.iterations();
      r.call_counts = record.call_counts;
      r.hit = exact_match(r.prediction, ex.gold_answers);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  };

  std::vector<ExampleResult> results;
  results.reserve(dataset.size());
  const size_t width = std::max<size_t>(parallelism, 1);
  for (size_t begin = 0; begin < dataset.size(); begin += width) {
    const size_t end = std::min(begin + width, dataset.size());
    if (width == 1) {
      results.push_back(run_one(dataset[begin]));
      continue;
    }
    std::vector<std::future<ExampleResult>> wave;
    for (size_t i = begin; i < end; ++i) {
      wave.push_back(std::async(std::launch::async, run_one, std::cref(dataset[i])));
    }
    for (auto& f : wave) results.push_back(f.get());
  }
  return aggregate(std::move(results));
}

MetricReport run_benchmark(const std::vector<QAExample>& dataset, const Engine& engine,
                           size_t parallelism) {
  return run_benchmark(
      dataset, [&](const std::string& q) { return engine.run(q); }, parallelism);
}

json to_json(const ExampleResult& r) {
  json j = {{"id", r.id},
            {"task", to_string(r.task)},
            {"prediction", r.prediction},
            {"hit", r.hit},
            {"degraded", r.degraded},
            {"iterations", r.iterations},
            {"call_counts", r.call_counts}};
  if (r.error) j["error"] = *r.error;
  return j;
}

json summary_json(const MetricReport& r) {
  return {{"summary", true},
          {"n", r.n},
          {"qa_total", r.qa_total},
          {"qa_hits", r.qa_hits},
          {"fact_total", r.fact_total},
          {"fact_hits", r.fact_hits},
          {"em", r.em ? json(*r.em) : json(nullptr)},
          {"accuracy", r.accuracy ? json(*r.accuracy) : json(nullptr)},
          {"mean_call_counts", r.mean_call_counts}};
}

namespace {

std::string fixed3(std::optional<double> v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", *v);
  return buf;
}

}  // namespace

std::string summary_line(const MetricReport& r) {
  size_t total_calls = 0;
  for (const auto& ex : r.examples) {
    for (const auto& [id, n] : ex.call_counts) total_calls += n;
  }
  const double mean_calls =
      r.n == 0 ? 0.0 : static_cast<double>(total_calls) / static_cast<double>(r.n);
  return "n=" + std::to_string(r.n) + " em=" + fixed3(r.em) + " accuracy=" +
         fixed3(r.accuracy) + " mean_calls=" + fixed3(mean_calls);
}

std::string format_table(const MetricReport& r) {
  std::ostringstream out;
  size_t id_width = 2;
  for (const auto& ex : r.examples) id_width = std::max(id_width, ex.id.size());
  char line[512];
  std::snprintf(line, sizeof(line), "%-*s  %-17s  %-4s  %-5s  %s\n", static_cast<int>(id_width),
                "id", "task", "hit", "iters", "prediction");
  out << line;
  for (const auto& ex : r.examples) {
    std::string pred = ex.error ? "ERROR: " + *ex.error : ex.prediction;
    if (pred.size() > 60) pred = pred.substr(0, 57) + "...";
    std::snprintf(line, sizeof(line), "%-*s  %-17s  %-4s  %-5zu  %s\n",
                  static_cast<int>(id_width), ex.id.c_str(), std::string(to_string(ex.task)).c_str(),
                  ex.hit ? "yes" : "no", ex.iterations, pred.c_str());
    out << line;
  }
  out << summary_line(r) << '\n';
  return out.str();
}

std::filesystem::path write_report(const MetricReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw LoadError("cannot create report directory " + dir.string() + ": " + ec.message());
  const auto path = dir / "report.jsonl";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw LoadError("cannot write " + path.string());
  for (const auto& ex : report.examples) out << to_json(ex).dump() << '\n';
  out << summary_json(report).dump() << '\n';
  out.flush();
  if (!out) throw LoadError("failed writing " + path.string());
  return path;
}

}  // namespace kgnav::eval
