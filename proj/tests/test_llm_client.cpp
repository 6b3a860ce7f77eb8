// Copyright 2026 The PolicyScope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "policyscope/errors.hpp"
#include "policyscope/llm_client.hpp"
#include "policyscope/transcript.hpp"
#include "stub_server.hpp"

using namespace policyscope;
using namespace std::chrono_literals;

namespace {

constexpr const char* kKey = "sk-test-0123456789abcdef";

ChatRequest hello() { return ChatRequest{{{"system", "You are terse."}, {"user", "Say hello."}}}; }

struct Recorder {
  std::vector<std::chrono::milliseconds> slept;
  Sleeper sleeper() {
    return [this](std::chrono::milliseconds d) { slept.push_back(d); };
  }
};

ClientConfig config_for(const StubServer& s, int retries = 3) {
  ClientConfig c;
  c.base_url = s.base_url();
  c.api_key = kKey;
  c.max_retries = retries;
  c.timeout_seconds = 5;
  return c;
}

}  // namespace

TEST_CASE("request body carries exactly the documented fields") {
  ClientConfig c;
  c.base_url = "http://localhost/v1";
  c.api_key = kKey;
  const auto body = nlohmann::json::parse(build_request_body(c, hello()));
  CHECK(body.size() == 4);
  CHECK(body["model"] == c.model);
  CHECK(body["temperature"] == 0.7);
  CHECK(body["max_tokens"] == 1024);
  REQUIRE(body["messages"].size() == 2);
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][1]["content"] == "Say hello.");
  CHECK(body.dump().find(kKey) == std::string::npos);
}

TEST_CASE("request validation") {
  CHECK_THROWS_AS(ChatRequest{}.validate(), ValidationError);
  CHECK_THROWS_AS((ChatRequest{{{"user", "hi"}}}.validate()), ValidationError);
  CHECK_THROWS_AS((ChatRequest{{{"system", "a"}, {"tool", "b"}}}.validate()), ValidationError);
}

TEST_CASE("response parsing") {
  const auto r = parse_response_body(
      R"({"choices":[{"message":{"role":"assistant","content":"hi"},"finish_reason":"stop"}],)"
      R"("usage":{"prompt_tokens":3,"completion_tokens":1,"total_tokens":4}})");
  CHECK(r.content == "hi");
  CHECK(r.finish_reason == "stop");
  REQUIRE(r.usage);
  CHECK(r.usage->total_tokens == 4);
  CHECK_THROWS_AS(parse_response_body("<html>busy</html>"), ProtocolError);
  CHECK_THROWS_AS(parse_response_body(R"({"choices":[]})"), ProtocolError);
  CHECK_THROWS_AS(parse_response_body(R"({"choices":[{"message":{}}]})"), ProtocolError);
}

TEST_CASE("backoff schedule") {
  CHECK(backoff_delay(0, 1.0) == 1000ms);
  CHECK(backoff_delay(1, 1.0) == 2000ms);
  CHECK(backoff_delay(3, 1.0) == 8000ms);
  CHECK(backoff_delay(2, 0.8) == 3200ms);
}

TEST_CASE("client config validation and environment") {
  ClientConfig c;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.base_url = "http://x";
  CHECK_NOTHROW(c.validate());
  c.temperature = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.temperature = 0;
  c.max_retries = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  ::setenv(kApiKeyEnv, "env-key", 1);
  ::setenv(kBaseUrlEnv, "http://env/v1", 1);
  ClientConfig e;
  apply_client_environment(e);
  CHECK(e.api_key == "env-key");
  CHECK(e.base_url == "http://env/v1");
  ClientConfig keep;
  keep.base_url = "http://file/v1";
  apply_client_environment(keep);
  CHECK(keep.base_url == "http://file/v1");
  ::unsetenv(kApiKeyEnv);
  ::unsetenv(kBaseUrlEnv);
}

TEST_CASE("happy path against a stub endpoint") {
  StubServer s([](int, const nlohmann::json&) { return StubServer::Reply{200, "hello"}; });
  Recorder rec;
  HttpLlmClient client(config_for(s), rec.sleeper());
  const ChatResponse r = client.complete(hello());
  CHECK(r.content == "hello");
  CHECK(r.retries == 0);
  CHECK(rec.slept.empty());
  REQUIRE(s.auth_headers().size() == 1);
  CHECK(s.auth_headers()[0] == std::string("Bearer ") + kKey);
  CHECK(s.bodies()[0].find(kKey) == std::string::npos);
}

TEST_CASE("server errors are retried with backoff") {
  StubServer s([](int call, const nlohmann::json&) {
    return call < 2 ? StubServer::Reply{500, ""} : StubServer::Reply{200, "finally"};
  });
  Recorder rec;
  HttpLlmClient client(config_for(s), rec.sleeper());
  const ChatResponse r = client.complete(hello());
  CHECK(r.content == "finally");
  CHECK(r.retries == 2);
  CHECK(s.calls() == 3);
  REQUIRE(rec.slept.size() == 2);
  CHECK((rec.slept[0] >= 800ms && rec.slept[0] <= 1200ms));
  CHECK((rec.slept[1] >= 1600ms && rec.slept[1] <= 2400ms));
  CHECK(client.backoff_history() == rec.slept);
}

TEST_CASE("rate limits exhaust the retry budget") {
  StubServer s([](int, const nlohmann::json&) { return StubServer::Reply{429, ""}; });
  Recorder rec;
  HttpLlmClient client(config_for(s, 2), rec.sleeper());
  try {
    client.complete(hello());
    FAIL("expected TransportError");
  } catch (const AuthError&) {
    FAIL("not an auth error");
  } catch (const TransportError& e) {
    CHECK(e.status() == 429);
    CHECK(e.retries() == 2);
  }
  CHECK(s.calls() == 3);
  CHECK(rec.slept.size() == 2);
}

TEST_CASE("credential rejection is immediate") {
  StubServer s([](int, const nlohmann::json&) { return StubServer::Reply{401, ""}; });
  Recorder rec;
  HttpLlmClient client(config_for(s), rec.sleeper());
  try {
    client.complete(hello());
    FAIL("expected AuthError");
  } catch (const AuthError& e) {
    CHECK(e.status() == 401);
    CHECK(e.retries() == 0);
    CHECK(std::string(e.what()).find(kKey) == std::string::npos);
  }
  CHECK(s.calls() == 1);
  CHECK(rec.slept.empty());
}

TEST_CASE("other client errors fail without retry and never echo the key") {
  StubServer s([](int, const nlohmann::json&) {
    return StubServer::Reply{400, std::string(R"({"error":"bad key )") + kKey + "\"}"};
  });
  Recorder rec;
  HttpLlmClient client(config_for(s), rec.sleeper());
  try {
    client.complete(hello());
    FAIL("expected TransportError");
  } catch (const TransportError& e) {
    CHECK(e.status() == 400);
    CHECK(e.retries() == 0);
    CHECK(std::string(e.what()).find(kKey) == std::string::npos);
  }
  CHECK(s.calls() == 1);
}

TEST_CASE("unreachable endpoint is a transport error after retries") {
  ClientConfig c;
  c.base_url = "http://127.0.0.1:1/v1";
  c.max_retries = 1;
  c.timeout_seconds = 2;
  Recorder rec;
  HttpLlmClient client(c, rec.sleeper());
  CHECK_THROWS_AS(client.complete(hello()), TransportError);
  CHECK(rec.slept.size() == 1);
}

TEST_CASE("mock client serves its script in order") {
  MockLlmClient m({"one", "two"});
  CHECK(m.complete(hello()).content == "one");
  CHECK(m.complete(hello()).content == "two");
  CHECK(m.remaining() == 0);
  CHECK_THROWS_AS(m.complete(hello()), ExhaustionError);
  CHECK(m.requests().size() == 3);
  CHECK(m.served() == 2);
}

TEST_CASE("mock scripts load from JSON") {
  const auto path = std::filesystem::temp_directory_path() / "policyscope_mock_script.json";
  {
    std::ofstream(path) << R"(["a", "b\nc"])";
  }
  CHECK(load_mock_script(path) == std::vector<std::string>{"a", "b\nc"});
  {
    std::ofstream(path) << R"({"not": "a list"})";
  }
  CHECK_THROWS(load_mock_script(path));
  std::filesystem::remove(path);
}

TEST_CASE("transcripts round trip byte for byte") {
  TranscriptFile f;
  f.config_hash = "0123456789abcdef";
  f.repetition = 4;
  f.calls.push_back({4, AgentRole::kStrategy, "<<system>>\nsys\n<<user>>\nu\n",
                     "text with === call 9 === inside\n\n", ParseOutcome::kRetried, 12});
  f.calls.push_back({4, AgentRole::kGeneration, "p", "", ParseOutcome::kOk, 0});
  f.calls.push_back({5, AgentRole::kSingle, std::string("bin\0ary", 7), "r", ParseOutcome::kFallback, 3});
  std::stringstream a;
  write_transcript(a, f);
  const TranscriptFile back = read_transcript(a);
  CHECK(back.config_hash == f.config_hash);
  CHECK(back.repetition == 4);
  CHECK(back.calls == f.calls);
  std::stringstream b;
  write_transcript(b, back);
  CHECK(a.str() == b.str());

  auto replay = make_replay_client(back);
  CHECK(replay->complete(hello()).content == f.calls[0].response);
  CHECK(replay->remaining() == 2);

  std::stringstream broken(a.str().substr(0, a.str().size() / 2));
  CHECK_THROWS_AS(read_transcript(broken), FileError);
  std::stringstream junk("not a transcript");
  CHECK_THROWS_AS(read_transcript(junk), FileError);
}
