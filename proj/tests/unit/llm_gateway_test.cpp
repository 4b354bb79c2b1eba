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

#include <atomic>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "kgnav/errors.hpp"
#include "kgnav/hashing.hpp"
#include "kgnav/llm_gateway.hpp"
#include "support.hpp"

namespace kgnav {
namespace {

using nlohmann::json;

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(TranscriptKey, DependsOnEveryInput) {
  const GenConfig g = GenConfig::reasoning();
  const auto base = transcript_key("t", "p", g);
  EXPECT_EQ(base.size(), 64u);
  EXPECT_EQ(base, transcript_key("t", "p", g));
  EXPECT_NE(base, transcript_key("u", "p", g));
  EXPECT_NE(base, transcript_key("t", "q", g));
  EXPECT_NE(base, transcript_key("t", "p", GenConfig::exploration()));
  GenConfig longer = g;
  longer.max_tokens = 512;
  EXPECT_NE(base, transcript_key("t", "p", longer));
}

TEST(GenConfig, Validation) {
  EXPECT_THROW((GenConfig{2.5, 10, GenMode::kReasoning}.validate()), ConfigError);
  EXPECT_THROW((GenConfig{0.0, 0, GenMode::kReasoning}.validate()), ConfigError);
  EXPECT_NO_THROW(GenConfig::exploration().validate());
}

TEST(Replay, PrimedStoreAnswers) {
  auto store = TranscriptStore::in_memory();
  const auto gen = GenConfig::reasoning();
  store->append({transcript_key("final_answer", "capital of France?", gen), "final_answer",
                 sha256_hex("capital of France?"), "Paris", false});
  const auto gw = LlmGateway::replay(store);
  EXPECT_EQ(gw.complete("final_answer", "capital of France?", gen).text, "Paris");
  EXPECT_EQ(gw.calls("final_answer"), 1u);
}

TEST(Replay, MissCarriesKey) {
  const auto gw = LlmGateway::replay(TranscriptStore::in_memory());
  const auto gen = GenConfig::reasoning();
  try {
    gw.complete("final_answer", "unknown", gen);
    FAIL() << "expected ReplayMissError";
  } catch (const ReplayMissError& e) {
    EXPECT_EQ(e.key(), transcript_key("final_answer", "unknown", gen));
  }
}

TEST(CallCounter, ForksCountIntoParent) {
  auto transport = std::make_shared<FunctionTransport>(
      [](const ChatRequest&) { return ChatResponse{"ok", "stop"}; });
  const auto gw = LlmGateway::live(transport);
  const auto a = gw.fork();
  const auto b = gw.fork();
  a.complete("topic_prune", "x", GenConfig::exploration());
  b.complete("topic_prune", "y", GenConfig::exploration());
  b.complete("clue_query", "y", GenConfig::exploration());
  EXPECT_EQ(a.calls("topic_prune"), 1u);
  EXPECT_EQ(b.call_counts(), (std::map<std::string, size_t>{{"clue_query", 1}, {"topic_prune", 1}}));
  EXPECT_EQ(gw.calls("topic_prune"), 2u);
}

TEST(Completion, LengthFinishMeansTruncated) {
  auto transport = std::make_shared<FunctionTransport>(
      [](const ChatRequest&) { return ChatResponse{"partial", "length"}; });
  EXPECT_TRUE(LlmGateway::live(transport).complete("t", "p", GenConfig::reasoning()).truncated);
}

TEST(ScriptedTransport, MatchesOnlyTheTaskSection) {
  ScriptedTransport t({{std::string("final_answer"), {"needle"}, "hit"},
                       {std::nullopt, {}, "fallback"}});
  ChatRequest r{"final_answer", {{"user", "demo has needle\n### Task\nreal input"}}, {}};
  EXPECT_EQ(t.send(r).content, "fallback");
  r.messages[0].content = "demo\n### Task\nthe needle";
  EXPECT_EQ(t.send(r).content, "hit");
}

TEST(ScriptedTransport, NoRuleIsTransportError) {
  ScriptedTransport t({{std::string("final_answer"), {}, "x"}});
  EXPECT_THROW(t.send({"topic_prune", {{"user", "p"}}, {}}), TransportError);
}

TEST(TranscriptStore, FileRoundTripAndConflicts) {
  testing::TempDir dir;
  const auto path = dir.file("t.jsonl");
  {
    auto store = TranscriptStore::open(path);
    store->append({"k1", "final_answer", sha256_hex("p"), "one", false});
    store->append({"k1", "final_answer", sha256_hex("p"), "one", false});
    store->append({"k2", "topic_prune", sha256_hex("q"), "two", true});
  }
  auto loaded = TranscriptStore::load(path);
  EXPECT_EQ(loaded->size(), 2u);
  EXPECT_EQ(loaded->lookup("k2")->response, "two");
  EXPECT_TRUE(loaded->lookup("k2")->truncated);
  EXPECT_THROW(loaded->append({"k1", "final_answer", "", "different", false}), LoadError);

  const auto first = json::parse(testing::read_file(path).substr(0, testing::read_file(path).find('\n')));
  EXPECT_EQ(first.at("prompt_sha256"), sha256_hex("p"));
  EXPECT_EQ(first.at("template_id"), "final_answer");
}

TEST(TranscriptStore, CorruptLinesAreReported) {
  testing::TempDir dir;
  testing::write_file(dir.file("t.jsonl"), "{\"key\": \"a\", \"response\": \"x\"}\nbroken\n");
  EXPECT_THROW(TranscriptStore::load(dir.file("t.jsonl")), MalformedRowError);
  EXPECT_THROW(TranscriptStore::load(dir.file("missing.jsonl")), LoadError);
}

// OpenAI-style endpoint: answers with the reversed prompt after failing the
// first `failures` requests with `fail_status`.
class FakeChatServer {
 public:
  FakeChatServer(int failures, int fail_status) {
    server_.Post("/v1/chat/completions", [this, failures, fail_status](const httplib::Request& req,
                                                                      httplib::Response& res) {
      const int n = hits_++;
      last_auth_ = req.get_header_value("Authorization");
      if (n < failures) {
        res.status = fail_status;
        return;
      }
      const auto body = json::parse(req.body);
      last_body_ = body;
      std::string prompt = body.at("messages").at(0).at("content");
      std::reverse(prompt.begin(), prompt.end());
      res.set_content(
          json{{"choices", {{{"message", {{"role", "assistant"}, {"content", prompt}}},
                             {"finish_reason", "stop"}}}}}
              .dump(),
          "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeChatServer() {
    server_.stop();
    thread_.join();
  }

  HttpChatOptions options() const {
    HttpChatOptions o;
    o.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1";
    o.api_key = "secret";
    o.model = "test-model";
    o.timeout = std::chrono::milliseconds(5000);
    o.initial_backoff = std::chrono::milliseconds(1);
    return o;
  }
  int hits() const { return hits_; }
  std::string last_auth() const { return last_auth_; }
  json last_body() const { return last_body_; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> hits_{0};
  std::string last_auth_;
  json last_body_;
};

TEST(HttpChatTransport, SendsOpenAiShapedRequest) {
  FakeChatServer server(0, 0);
  HttpChatTransport t(server.options());
  const auto reply = t.send({"final_answer", {{"user", "abc"}}, GenConfig::exploration()});
  EXPECT_EQ(reply.content, "cba");
  EXPECT_EQ(server.last_auth(), "Bearer secret");
  EXPECT_EQ(server.last_body().at("model"), "test-model");
  EXPECT_DOUBLE_EQ(server.last_body().at("temperature").get<double>(), 0.4);
}

TEST(HttpChatTransport, RetriesServerErrorsAndRateLimits) {
  FakeChatServer busy(2, 503);
  EXPECT_EQ(HttpChatTransport(busy.options()).send({"t", {{"user", "ab"}}, {}}).content, "ba");
  EXPECT_EQ(busy.hits(), 3);

  FakeChatServer limited(3, 429);
  EXPECT_THROW(HttpChatTransport(limited.options()).send({"t", {{"user", "ab"}}, {}}),
               TransportError);
  EXPECT_EQ(limited.hits(), 3);
}

TEST(HttpChatTransport, ClientErrorsFailFast) {
  FakeChatServer server(5, 400);
  EXPECT_THROW(HttpChatTransport(server.options()).send({"t", {{"user", "ab"}}, {}}),
               TransportError);
  EXPECT_EQ(server.hits(), 1);
}

TEST(HttpChatTransport, UnreachableEndpointIsTransportError) {
  HttpChatOptions o;
  o.base_url = "http://127.0.0.1:1/v1";
  o.max_attempts = 2;
  o.initial_backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::milliseconds(500);
  EXPECT_THROW(HttpChatTransport(o).send({"t", {{"user", "x"}}, {}}), TransportError);
}

// Record over a live endpoint, then replay the file with no endpoint at all.
TEST(RecordReplay, RoundTripOverLocalEndpoint) {
  testing::TempDir dir;
  const auto path = dir.file("rec.jsonl");
  const auto gen = GenConfig::reasoning();
  std::string recorded;
  {
    FakeChatServer server(0, 0);
    const auto gw = LlmGateway::record(std::make_shared<HttpChatTransport>(server.options()),
                                       TranscriptStore::open(path));
    recorded = gw.complete("final_answer", "hello world", gen).text;
    EXPECT_EQ(gw.complete("final_answer", "hello world", gen).text, recorded);
    EXPECT_EQ(server.hits(), 1);
  }
  const auto replay = LlmGateway::replay(TranscriptStore::load(path));
  EXPECT_EQ(replay.complete("final_answer", "hello world", gen).text, recorded);
  EXPECT_EQ(recorded, "dlrow olleh");
}

}  // namespace
}  // namespace kgnav
