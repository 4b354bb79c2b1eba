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

#include "kgnav/embedder.hpp"

#include <cmath>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "kgnav/errors.hpp"
#include "kgnav/http_util.hpp"

namespace kgnav {

Vector Embedder::embed_one(const std::string& text) const {
  return std::move(embed(std::span<const std::string>(&text, 1)).front());
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ContractViolation("cosine over vectors of different dimension");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

bool token_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

uint64_t fnv1a(std::string_view s, uint64_t seed) {
  uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x9e3779b97f4a7c15ULL);
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::vector<std::string> hashing_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (token_char(c)) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a')
                                               : c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

HashingEmbedder::HashingEmbedder(size_t dimension, uint64_t seed,
                                 size_t max_ngram)
    : dimension_(dimension), seed_(seed), max_ngram_(max_ngram) {
  if (dimension_ == 0) throw ParameterError("embedding dimension must be positive");
  if (max_ngram_ == 0) throw ParameterError("max_ngram must be positive");
}

Vector HashingEmbedder::embed_text(const std::string& text) const {
  Vector v(dimension_, 0.0);
  const auto tokens = hashing_tokens(text);
  for (size_t n = 1; n <= max_ngram_; ++n) {
    for (size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (size_t j = 1; j < n; ++j) gram += ' ' + tokens[i + j];
      v[fnv1a(gram, seed_) % dimension_] += 1.0;
    }
  }
  return v;
}

std::vector<Vector> HashingEmbedder::embed(
    std::span<const std::string> texts) const {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_text(t));
  return out;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderOptions options)
    : options_(std::move(options)) {
  auto parts = split_url(options_.url);
  origin_ = std::move(parts.origin);
  path_ = std::move(parts.path);
  if (options_.dimension == 0) {
    throw ConfigError("http embedder needs a positive dimension");
  }
}

std::vector<Vector> HttpEmbedder::embed(std::span<const std::string> texts) const {
  if (texts.empty()) return {};
  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());

  nlohmann::json body = {{"texts", texts}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw TransportError("embedder request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("embedder returned HTTP " + std::to_string(res->status));
  }
  auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (!reply.is_object() || !reply.contains("vectors") ||
      !reply["vectors"].is_array() || reply["vectors"].size() != texts.size()) {
    throw TransportError("embedder reply missing vectors");
  }
  std::vector<Vector> out;
  out.reserve(texts.size());
  try {
    for (const auto& v : reply["vectors"]) {
      out.push_back(v.get<Vector>());
      if (out.back().size() != options_.dimension) {
        throw TransportError("embedder returned vector of dimension " +
                             std::to_string(out.back().size()));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("embedder reply malformed: ") + e.what());
  }
  return out;
}

}  // namespace kgnav
