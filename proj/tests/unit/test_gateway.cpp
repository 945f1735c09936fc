#include <cstdlib>
#include <future>

#include "doctest.h"
#include "fnreuse/errors.hpp"
#include "fnreuse/gateway.hpp"
#include "stub_server.hpp"

using namespace fnreuse;
using fnreuse::testing::chat_reply;
using fnreuse::testing::embedding_reply;
using fnreuse::testing::StubReply;
using fnreuse::testing::StubServer;

namespace {

constexpr const char* kKeyVar = "FNREUSE_TEST_API_KEY";

ProviderConfig config_for(const StubServer& server) {
  ::setenv(kKeyVar, "sk-test", 1);
  ProviderConfig cfg;
  cfg.base_url = server.base_url();
  cfg.api_key_env = kKeyVar;
  cfg.model_name = "stub-model";
  cfg.timeout_s = 5;
  cfg.backoff_initial_s = 0.01;
  cfg.backoff_max_s = 0.04;
  return cfg;
}

}  // namespace

TEST_CASE("chat completion happy path") {
  StubServer server;
  server.script("/v1/chat/completions", {{200, chat_reply("Intent Summary: ok")}});
  ModelGateway gw(config_for(server));
  CHECK(gw.chat_complete("prompt text") == "Intent Summary: ok");

  auto seen = server.requests();
  REQUIRE(seen.size() == 1);
  CHECK(seen[0].authorization == "Bearer sk-test");
  auto body = nlohmann::json::parse(seen[0].body);
  CHECK(body["model"] == "stub-model");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["messages"][0]["content"] == "prompt text");
}

TEST_CASE("429 twice then success") {
  StubServer server;
  server.script("/v1/chat/completions",
                {{429, "{}"}, {429, "{}"}, {200, chat_reply("done")}});
  ModelGateway gw(config_for(server));
  CHECK(gw.chat_complete("p") == "done");
  auto t = gw.telemetry();
  CHECK(t.retries == 2);
  CHECK(t.requests == 3);
  REQUIRE(t.backoff_delays_s.size() == 2);
  CHECK(t.backoff_delays_s[0] == doctest::Approx(0.01));
  CHECK(t.backoff_delays_s[1] == doctest::Approx(0.02));
}

TEST_CASE("backoff is capped") {
  StubServer server;
  server.script("/v1/chat/completions", {{503, "{}"}, {502, "{}"}, {500, "{}"}, {503, "{}"}, {200, chat_reply("x")}});
  auto cfg = config_for(server);
  cfg.max_retries = 4;
  ModelGateway gw(cfg);
  CHECK(gw.chat_complete("p") == "x");
  CHECK(gw.telemetry().backoff_delays_s == std::vector<double>{0.01, 0.02, 0.04, 0.04});
}

TEST_CASE("retries run out") {
  StubServer server([](const std::string&, const std::string&) { return StubReply{503, "{}"}; });
  auto cfg = config_for(server);
  cfg.max_retries = 2;
  ModelGateway gw(cfg);
  try {
    gw.chat_complete("p");
    FAIL("expected RetriesExhaustedError");
  } catch (const RetriesExhaustedError& e) {
    CHECK(e.status() == 503);
    CHECK(e.retryable());
  }
  CHECK(server.requests().size() == 3);
}

TEST_CASE("other 4xx is permanent") {
  StubServer server;
  server.script("/v1/chat/completions", {{401, "{\"error\":\"bad key\"}"}, {200, chat_reply("never")}});
  ModelGateway gw(config_for(server));
  try {
    gw.chat_complete("p");
    FAIL("expected TransportError");
  } catch (const RetriesExhaustedError&) {
    FAIL("4xx must not be retried");
  } catch (const TransportError& e) {
    CHECK(e.status() == 401);
    CHECK_FALSE(e.retryable());
  }
  CHECK(server.requests().size() == 1);
}

TEST_CASE("timeouts are retried") {
  StubServer server;
  server.script("/v1/chat/completions", {{200, chat_reply("slow"), 1500}, {200, chat_reply("fast")}});
  auto cfg = config_for(server);
  cfg.timeout_s = 0.3;
  ModelGateway gw(cfg);
  CHECK(gw.chat_complete("p") == "fast");
  CHECK(gw.telemetry().retries == 1);
}

TEST_CASE("connection refused is retried then exhausted") {
  int port = 0;
  {
    StubServer gone;
    port = std::stoi(gone.base_url("").substr(std::string("http://127.0.0.1:").size()));
  }
  ::setenv(kKeyVar, "sk-test", 1);
  ProviderConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  cfg.api_key_env = kKeyVar;
  cfg.max_retries = 1;
  cfg.backoff_initial_s = 0.01;
  cfg.timeout_s = 1;
  ModelGateway gw(cfg);
  CHECK_THROWS_AS(gw.chat_complete("p"), RetriesExhaustedError);
}

TEST_CASE("max_inflight holds under 50 concurrent calls") {
  StubServer server([](const std::string&, const std::string&) { return StubReply{200, chat_reply("ok"), 40}; });
  auto cfg = config_for(server);
  cfg.max_inflight = 3;
  ModelGateway gw(cfg);
  std::vector<std::future<std::string>> calls;
  for (int i = 0; i < 50; ++i)
    calls.push_back(std::async(std::launch::async, [&gw] { return gw.chat_complete("p"); }));
  for (auto& c : calls) CHECK(c.get() == "ok");
  CHECK(server.requests().size() == 50);
  CHECK(server.max_concurrent() <= 3);
  CHECK(server.max_concurrent() >= 2);
  CHECK(gw.telemetry().max_observed_inflight <= 3);
}

TEST_CASE("missing API key fails before any request") {
  StubServer server;
  auto cfg = config_for(server);
  cfg.api_key_env = "FNREUSE_TEST_UNSET_KEY";
  ::unsetenv("FNREUSE_TEST_UNSET_KEY");
  CHECK_THROWS_AS(ModelGateway{cfg}, ConfigError);
  CHECK(server.requests().empty());
}

TEST_CASE("configuration validation") {
  StubServer server;
  auto cfg = config_for(server);
  cfg.temperature = -0.5;
  CHECK_THROWS_AS(ModelGateway{cfg}, ConfigError);
  cfg = config_for(server);
  cfg.max_inflight = 0;
  CHECK_THROWS_AS(ModelGateway{cfg}, ConfigError);
  cfg = config_for(server);
  cfg.base_url = "ftp://x";
  CHECK_THROWS_AS(ModelGateway{cfg}, ConfigError);
}

TEST_CASE("malformed chat response") {
  StubServer server;
  server.script("/v1/chat/completions", {{200, "{\"choices\": []}"}});
  ModelGateway gw(config_for(server));
  CHECK_THROWS_AS(gw.chat_complete("p"), ParseError);
}

TEST_CASE("embeddings are batched and ordered") {
  StubServer server;
  // Second batch answers out of order; "index" decides the slot.
  server.script("/v1/embeddings",
                {{200, embedding_reply({{1, 0}, {0, 1}})},
                 {200, "{\"data\": [{\"index\": 0, \"embedding\": [0.6, 0.8]}]}"}});
  auto cfg = config_for(server);
  cfg.embed_batch_size = 2;
  ModelGateway gw(cfg);
  auto vecs = gw.embed_remote({"a", "b", "c"});
  REQUIRE(vecs.size() == 3);
  CHECK(vecs[0] == Vector{1, 0});
  CHECK(vecs[2] == Vector{0.6, 0.8});
  auto seen = server.requests();
  REQUIRE(seen.size() == 2);
  CHECK(nlohmann::json::parse(seen[0].body)["input"].size() == 2);
  CHECK(nlohmann::json::parse(seen[1].body)["input"].size() == 1);
  CHECK_THROWS_AS(gw.embed_remote({}), ValidationError);
}

TEST_CASE("embedding dimension problems") {
  StubServer server;
  server.script("/v1/embeddings", {{200, embedding_reply({{1, 0}, {0, 1, 0}})}});
  auto gw = std::make_shared<ModelGateway>(config_for(server));
  CHECK_THROWS_AS(gw->embed_remote({"a", "b"}), IntegrityError);

  server.script("/v1/embeddings", {{200, embedding_reply({{1, 0, 0}})}});
  RemoteEmbedder emb(gw, 2);
  CHECK_THROWS_AS(embed_intent("text", emb), DimensionMismatchError);
}

TEST_CASE("remote extractor and embedder wire into the pipeline") {
  StubServer server;
  server.script("/v1/chat/completions",
                {{200, chat_reply("Intent Summary: Tags images.\nServerless Platforms: Lambda\n"
                                  "Cloud Services: S3\nProgramming Languages: None")}});
  server.script("/v1/embeddings", {{200, embedding_reply({{3, 4}})}});
  auto gw = std::make_shared<ModelGateway>(config_for(server));
  RemoteExtractor ex(gw);
  RemoteEmbedder emb(gw, 2);
  auto rep = extract("fn", "code", ex, NormalizationTable::builtin());
  CHECK(rep.provenance == Provenance{"remote", "stub-model", 0.0});
  CHECK(rep.platforms == AttributeSet{"AWS Lambda"});
  auto v = embed_intent(rep.intent_text, emb);
  CHECK(v[0] == doctest::Approx(0.6));
  CHECK(v[1] == doctest::Approx(0.8));
}
