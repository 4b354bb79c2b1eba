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

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kgnav/config.hpp"
#include "kgnav/corpus.hpp"
#include "kgnav/errors.hpp"
#include "kgnav/evalkit.hpp"
#include "kgnav/kg_store.hpp"
#include "kgnav/retriever.hpp"
#include "kgnav/serialization.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;

namespace {

using kgnav::EntityId;
using kgnav::RelationId;

std::vector<std::string> ids_to_strings(const std::vector<EntityId>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(id.str());
  return out;
}

// Owns a runtime built from a config file; answers are returned as the same
// JSON text the CLI and the HTTP service emit.
class Pipeline {
 public:
  Pipeline(const fs::path& config, const std::string& overrides_json,
           std::optional<fs::path> replay, std::optional<fs::path> record,
           std::optional<fs::path> script) {
    kgnav::AppConfig cfg = kgnav::AppConfig::load(config);
    if (!overrides_json.empty()) {
      kgnav::apply_engine_overrides(cfg.engine, nlohmann::json::parse(overrides_json));
    }
    if (replay) cfg.replay = std::move(replay);
    if (record) cfg.record = std::move(record);
    if (script) cfg.script = std::move(script);
    runtime_ = kgnav::Runtime::create(cfg);
  }

  std::string answer(const std::string& question) const {
    const auto record = runtime_->engine().run(question);
    return kgnav::to_json(record, runtime_->graph()).dump();
  }

  std::string engine_config() const { return kgnav::to_json(runtime_->config().engine).dump(); }

 private:
  std::shared_ptr<kgnav::Runtime> runtime_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the kgnav question answering engine";

  static py::exception<kgnav::Error> kgnav_error(m, "KgnavError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const kgnav::Error& e) {
      py::set_error(kgnav_error, e.what());
    } catch (const nlohmann::json::exception& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  py::class_<kgnav::GraphStore>(m, "GraphStore")
      .def_static(
          "load",
          [](const fs::path& triples, std::optional<fs::path> labels) {
            return labels ? kgnav::load_graph(triples, *labels) : kgnav::load_graph(triples);
          },
          py::arg("triples"), py::arg("labels") = py::none())
      .def("__len__", &kgnav::GraphStore::size)
      .def("has_entity",
           [](const kgnav::GraphStore& g, const std::string& e) { return g.has_entity(EntityId(e)); })
      .def("relations_of",
           [](const kgnav::GraphStore& g, const std::string& e) {
             std::vector<std::pair<std::string, std::string>> out;
             for (const auto& r : g.relations_of(EntityId(e))) {
               out.emplace_back(r.relation.str(), std::string(kgnav::to_string(r.direction)));
             }
             return out;
           })
      .def("neighbors",
           [](const kgnav::GraphStore& g, const std::string& e, const std::string& r,
              const std::string& direction) {
             return ids_to_strings(
                 g.neighbors(EntityId(e), RelationId(r), kgnav::parse_direction(direction)));
           },
           py::arg("entity"), py::arg("relation"), py::arg("direction") = "out")
      .def("resolve_label",
           [](const kgnav::GraphStore& g, const std::string& s) {
             return ids_to_strings(g.resolve_label(s));
           })
      .def("label", [](const kgnav::GraphStore& g, const std::string& e) {
        return g.label(EntityId(e));
      });

  m.def(
      "chunk",
      [](const std::string& text, size_t size_words, size_t overlap_words) {
        const kgnav::Document doc{EntityId("doc"), "", text};
        std::vector<std::tuple<size_t, size_t, std::string>> out;
        for (auto& c : kgnav::chunk_document(doc, {size_words, overlap_words})) {
          out.emplace_back(c.span.start, c.span.end, std::move(c.text));
        }
        return out;
      },
      py::arg("text"), py::arg("size_words") = 100, py::arg("overlap_words") = 20,
      "Split text into overlapping word windows: (start, end, text) tuples.");

  m.def(
      "entity_rank_score",
      [](const std::vector<double>& scores, double alpha, size_t top_k, size_t rank_origin) {
        return kgnav::entity_rank_score(scores, alpha, top_k, rank_origin);
      },
      py::arg("scores"), py::arg("alpha"), py::arg("top_k"), py::arg("rank_origin") = 0);

  m.def("normalize_answer", [](const std::string& s) { return kgnav::eval::normalize_answer(s); });
  m.def("exact_match", [](const std::string& pred, const std::vector<std::string>& golds) {
    return kgnav::eval::exact_match(pred, golds);
  });

  py::class_<Pipeline>(m, "Pipeline")
      .def(py::init<const fs::path&, const std::string&, std::optional<fs::path>,
                    std::optional<fs::path>, std::optional<fs::path>>(),
           py::arg("config"), py::arg("overrides_json") = "", py::arg("replay") = py::none(),
           py::arg("record") = py::none(), py::arg("script") = py::none(),
           py::call_guard<py::gil_scoped_release>())
      .def("answer", &Pipeline::answer, py::arg("question"),
           py::call_guard<py::gil_scoped_release>())
      .def("engine_config", &Pipeline::engine_config);
}
