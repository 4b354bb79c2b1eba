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

#include <cmath>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "kgnav/embedder.hpp"
#include "kgnav/errors.hpp"
#include "support.hpp"

namespace kgnav {
namespace {

TEST(Cosine, MatchesDefinition) {
  testing::Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t dim = testing::uniform(rng, 1, 16);
    std::vector<double> a(dim), b(dim);
    for (size_t i = 0; i < dim; ++i) {
      a[i] = testing::uniform_real(rng, -2, 2);
      b[i] = testing::uniform_real(rng, -2, 2);
    }
    EXPECT_NEAR(cosine(a, b), testing::cosine_oracle(a, b), 1e-12);
  }
}

TEST(Cosine, ZeroVectorScoresZero) {
  const std::vector<double> z{0, 0}, v{1, 2};
  EXPECT_EQ(cosine(z, v), 0.0);
}

TEST(Cosine, DimensionMismatchIsContractViolation) {
  const std::vector<double> a{1}, b{1, 2};
  EXPECT_THROW(cosine(a, b), ContractViolation);
}

TEST(HashingEmbedder, IsDeterministicAndSelfSimilar) {
  HashingEmbedder e(256, 9, 2);
  const auto a = e.embed_one("Pony Ma founded Tencent");
  const auto b = e.embed_one("Pony Ma founded Tencent");
  EXPECT_EQ(a, b);
  EXPECT_NEAR(cosine(a, b), 1.0, 1e-12);
  EXPECT_EQ(a.size(), 256u);
}

TEST(HashingEmbedder, CaseAndPunctuationDoNotMatter) {
  HashingEmbedder e(128);
  EXPECT_EQ(e.embed_one("Pony MA!"), e.embed_one("pony ma"));
}

TEST(HashingEmbedder, OverlapRaisesSimilarity) {
  HashingEmbedder e(512, 1);
  const auto q = e.embed_one("who founded tencent");
  EXPECT_GT(cosine(q, e.embed_one("tencent was founded by five people")),
            cosine(q, e.embed_one("rivers flow into the sea")));
}

TEST(HashingEmbedder, TokensAreLowercaseAlphanumericRuns) {
  EXPECT_EQ(hashing_tokens("Hello, World-2!"), (std::vector<std::string>{"hello", "world", "2"}));
}


// Local endpoint that maps every text to (length, 1).
class FakeEmbeddingServer {
 public:
  explicit FakeEmbeddingServer(bool wrong_dimension = false) {
    server_.Post("/embed", [wrong_dimension](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json vectors = nlohmann::json::array();
      for (const auto& t : body.at("texts")) {
        const double len = static_cast<double>(t.get<std::string>().size());
        vectors.push_back(wrong_dimension ? nlohmann::json{len} : nlohmann::json{len, 1.0});
      }
      res.set_content(nlohmann::json{{"vectors", vectors}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEmbeddingServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/embed"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpEmbedder, ReturnsServerVectors) {
  FakeEmbeddingServer server;
  HttpEmbedder e({server.url(), 2, std::chrono::milliseconds(5000)});
  const std::vector<std::string> texts{"ab", "abcd"};
  const auto v = e.embed(texts);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[1], (Vector{4.0, 1.0}));
}

TEST(HttpEmbedder, WrongDimensionIsRejected) {
  FakeEmbeddingServer server(true);
  HttpEmbedder e({server.url(), 2, std::chrono::milliseconds(5000)});
  EXPECT_THROW(e.embed_one("x"), TransportError);
}

}  // namespace
}  // namespace kgnav
