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

// kgnav: answer questions over a knowledge graph, run benchmarks, or serve
// answers over HTTP.
//
//   kgnav answer --config cfg.json "question"
//   kgnav bench  --config cfg.json data.jsonl --out reports/
//   kgnav serve  --config cfg.json --port 8080
//
// Exit codes: 0 success, 1 degraded answer, 2 error.

#include <csignal>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "kgnav/config.hpp"
#include "kgnav/errors.hpp"
#include "kgnav/evalkit.hpp"
#include "kgnav/serialization.hpp"
#include "kgnav/service.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDegraded = 1;
constexpr int kExitError = 2;

struct CommonOptions {
  std::string config;
  std::optional<size_t> width, max_depth, top_k, top_l, coarse_keep, parallelism;
  std::optional<double> alpha;
  bool no_topic_prune = false;
  bool no_batched_rp = false;
  bool no_clue_query = false;
  std::optional<std::string> replay, record, script;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--config", o.config, "JSON config file")->required();
  cmd.add_option("--width", o.width, "Beam width W (relations per entity and entities kept)");
  cmd.add_option("--max-depth", o.max_depth, "Maximum number of iterations");
  cmd.add_option("--top-k", o.top_k, "Chunks per entity in the decayed-sum score");
  cmd.add_option("--top-l", o.top_l, "Evidence chunks shown to the model (<= top-k)");
  cmd.add_option("--alpha", o.alpha, "Decay rate of the chunk weights");
  cmd.add_option("--coarse-keep", o.coarse_keep, "Chunks kept by the first retrieval stage");
  cmd.add_option("--parallelism", o.parallelism, "Candidates scored concurrently");
  cmd.add_flag("--no-topic-prune", o.no_topic_prune, "Keep every linked question entity");
  cmd.add_flag("--no-batched-rp", o.no_batched_rp, "One relation-prune call per entity");
  cmd.add_flag("--no-clue-query", o.no_clue_query, "Disable clue queries");
  cmd.add_option("--replay", o.replay, "Answer model calls from a transcript file");
  cmd.add_option("--record", o.record, "Append model calls to a transcript file");
  cmd.add_option("--script", o.script, "Use a scripted offline model (JSON rules)");
}

kgnav::AppConfig build_config(const CommonOptions& o) {
  kgnav::AppConfig cfg = kgnav::AppConfig::load(o.config);
  nlohmann::json overrides = nlohmann::json::object();
  if (o.width) overrides["width"] = *o.width;
  if (o.max_depth) overrides["max_depth"] = *o.max_depth;
  if (o.top_k) overrides["top_k"] = *o.top_k;
  if (o.top_l) overrides["top_l"] = *o.top_l;
  if (o.alpha) overrides["alpha"] = *o.alpha;
  if (o.coarse_keep) overrides["coarse_keep"] = *o.coarse_keep;
  if (o.parallelism) overrides["parallelism"] = *o.parallelism;
  if (o.no_topic_prune) overrides["topic_prune"] = false;
  if (o.no_batched_rp) overrides["batched_relation_prune"] = false;
  if (o.no_clue_query) overrides["clue_query"] = false;
  kgnav::apply_engine_overrides(cfg.engine, overrides);
  if (o.replay) cfg.replay = *o.replay;
  if (o.record) cfg.record = *o.record;
  if (o.script) cfg.script = *o.script;
  return cfg;
}

void print_record(const kgnav::AnswerRecord& r, const kgnav::GraphStore& graph) {
  std::cout << "answer: " << r.answer << '\n';
  std::cout << "degraded: " << (r.degraded ? "yes (" + r.degraded_reason + ")" : "no") << '\n';
  std::cout << "iterations: " << r.iterations() << '\n';
  std::cout << "paths:\n";
  for (const auto& p : r.paths) std::cout << "  " << kgnav::serialize_path(p, graph) << '\n';
  std::cout << "evidence:\n";
  for (size_t i = 0; i < r.evidence.size(); ++i) {
    const auto& c = r.evidence[i];
    std::string snippet = c.chunk.text;
    if (snippet.size() > 160) snippet = snippet.substr(0, 157) + "...";
    std::cout << "  [" << i + 1 << "] " << c.chunk.entity << '#' << c.chunk.index << " ("
              << c.score << "): " << snippet << '\n';
  }
  std::cout << "calls:";
  for (const auto& [id, n] : r.call_counts) std::cout << ' ' << id << '=' << n;
  std::cout << '\n';
  for (const auto& note : r.notes) std::cout << "note: " << note << '\n';
}

int cmd_answer(const CommonOptions& o, const std::string& question, bool as_json) {
  const auto runtime = kgnav::Runtime::create(build_config(o));
  const auto record = runtime->engine().run(question);
  if (as_json) {
    std::cout << kgnav::to_json(record, runtime->graph()).dump(2) << '\n';
  } else {
    print_record(record, runtime->graph());
  }
  return record.degraded ? kExitDegraded : kExitOk;
}

int cmd_bench(const CommonOptions& o, const std::string& dataset_path, const std::string& out_dir,
              size_t parallelism) {
  const auto dataset = kgnav::eval::load_dataset(dataset_path);
  if (dataset.empty()) {
    std::cerr << "error: empty dataset\n";
    return kExitError;
  }
  const auto runtime = kgnav::Runtime::create(build_config(o));
  const auto engine = runtime->engine();
  const auto report = kgnav::eval::run_benchmark(dataset, engine, parallelism);
  const auto path = kgnav::eval::write_report(report, out_dir);
  std::cout << kgnav::eval::format_table(report);
  std::cout << "report: " << path.string() << '\n';
  return kExitOk;
}

int cmd_serve(const CommonOptions& o, const std::string& host, int port, size_t max_concurrency) {
  const kgnav::AppConfig cfg = build_config(o);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  kgnav::AnswerService service([cfg] { return kgnav::Runtime::create(cfg); },
                               {host, port, max_concurrency});
  const int bound = service.start();
  spdlog::info("listening on {}:{}", host, bound);

  std::thread([&service, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("signal {} received; draining", sig);
    service.stop();
  }).detach();

  service.serve();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-graph guided question answering"};
  app.require_subcommand(1);

  CommonOptions answer_opts;
  std::string question;
  bool as_json = false;
  auto* answer = app.add_subcommand("answer", "Answer one question");
  add_common(*answer, answer_opts);
  answer->add_option("question", question, "Question text")->required();
  answer->add_flag("--json", as_json, "Print the full answer record as JSON");

  CommonOptions bench_opts;
  std::string dataset, out_dir;
  size_t bench_parallelism = 1;
  auto* bench = app.add_subcommand("bench", "Run a benchmark dataset");
  add_common(*bench, bench_opts);
  bench->add_option("dataset", dataset, "Line-delimited dataset file")->required();
  bench->add_option("--out", out_dir, "Report directory")->required();
  bench->add_option("--jobs", bench_parallelism, "Examples run concurrently");

  CommonOptions serve_opts;
  std::string host = "127.0.0.1";
  int port = 8080;
  size_t max_concurrency = 4;
  auto* serve = app.add_subcommand("serve", "Serve answers over HTTP");
  add_common(*serve, serve_opts);
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Bind port (0 picks one)");
  serve->add_option("--max-concurrency", max_concurrency, "Requests handled at once");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (answer->parsed()) return cmd_answer(answer_opts, question, as_json);
    if (bench->parsed()) return cmd_bench(bench_opts, dataset, out_dir, bench_parallelism);
    if (serve->parsed()) return cmd_serve(serve_opts, host, port, max_concurrency);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
