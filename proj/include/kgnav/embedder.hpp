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

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kgnav {

using Vector = std::vector<double>;

// Maps text to a fixed-dimension vector. The same text must always map to
// the same vector, and embed() must be safe to call from several threads.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual size_t dimension() const = 0;
  virtual std::vector<Vector> embed(std::span<const std::string> texts) const = 0;

  Vector embed_one(const std::string& text) const;
};

// Cosine similarity; 0 when either vector has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

// Offline embedder: hashes lowercase alphanumeric tokens (and optionally
// word n-grams) into `dimension` buckets. Cosine between two texts then
// tracks their token overlap. Meant for tests and fixtures, not production
// retrieval quality.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(size_t dimension, uint64_t seed = 0,
                           size_t max_ngram = 1);

  size_t dimension() const override { return dimension_; }
  std::vector<Vector> embed(std::span<const std::string> texts) const override;

 private:
  Vector embed_text(const std::string& text) const;

  size_t dimension_;
  uint64_t seed_;
  size_t max_ngram_;
};

// Tokens used by HashingEmbedder: maximal runs of ASCII alphanumerics or
// non-ASCII bytes, lowercased.
std::vector<std::string> hashing_tokens(const std::string& text);

struct HttpEmbedderOptions {
  // Full endpoint URL, e.g. http://127.0.0.1:8081/embed.
  std::string url;
  size_t dimension = 0;
  std::chrono::milliseconds timeout{30000};
};

// Remote embedder speaking POST {"texts": [...]} -> {"vectors": [[...]...]}.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(HttpEmbedderOptions options);

  size_t dimension() const override { return options_.dimension; }
  std::vector<Vector> embed(std::span<const std::string> texts) const override;

 private:
  HttpEmbedderOptions options_;
  std::string origin_;
  std::string path_;
};

}  // namespace kgnav
