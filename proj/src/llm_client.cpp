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

#include "policyscope/llm_client.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include "json.hpp"

#include "policyscope/errors.hpp"
#include "policyscope/random.hpp"

namespace policyscope {

void ClientConfig::validate() const {
  if (base_url.empty()) {
    throw ConfigError(std::string("LLM base_url is empty (set base_url in the config or ") +
                      kBaseUrlEnv + ")");
  }
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (max_tokens <= 0) throw ConfigError("max_tokens must be positive");
  if (timeout_seconds <= 0) throw ConfigError("timeout_seconds must be positive");
}

void apply_client_environment(ClientConfig& cfg) {
  if (cfg.base_url.empty()) {
    if (const char* url = std::getenv(kBaseUrlEnv)) cfg.base_url = url;
  }
  if (const char* key = std::getenv(kApiKeyEnv)) cfg.api_key = key;
}

void ChatRequest::validate() const {
  if (messages.empty()) throw ValidationError("chat request has no messages");
  if (messages.front().role != "system") {
    throw ValidationError("the first chat message must have role 'system'");
  }
  for (const ChatMessage& m : messages) {
    if (m.role != "system" && m.role != "user") {
      throw ValidationError("unsupported chat role '" + m.role + "'");
    }
  }
}

std::string build_request_body(const ClientConfig& cfg, const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const ChatMessage& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  nlohmann::json body = {{"model", cfg.model},
                         {"messages", std::move(messages)},
                         {"temperature", cfg.temperature},
                         {"max_tokens", cfg.max_tokens}};
  return body.dump();
}

namespace {

std::string excerpt(const std::string& body, std::size_t limit = 200) {
  if (body.size() <= limit) return body;
  return body.substr(0, limit) + "...";
}

}  // namespace

ChatResponse parse_response_body(const std::string& body) {
  const auto json = nlohmann::json::parse(body, nullptr, false);
  if (json.is_discarded()) {
    throw ProtocolError("response body is not JSON: " + excerpt(body));
  }
  const auto choices = json.find("choices");
  if (!json.is_object() || choices == json.end() || !choices->is_array() || choices->empty()) {
    throw ProtocolError("response has no choices: " + excerpt(body));
  }
  const auto& first = choices->front();
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object() ||
      !first["message"].contains("content") || !first["message"]["content"].is_string()) {
    throw ProtocolError("first choice has no message content: " + excerpt(body));
  }
  ChatResponse r;
  r.content = first["message"]["content"].get<std::string>();
  if (first.contains("finish_reason") && first["finish_reason"].is_string()) {
    r.finish_reason = first["finish_reason"].get<std::string>();
  }
  if (json.contains("usage") && json["usage"].is_object()) {
    const auto& u = json["usage"];
    TokenUsage usage;
    usage.prompt_tokens = u.value("prompt_tokens", 0);
    usage.completion_tokens = u.value("completion_tokens", 0);
    usage.total_tokens = u.value("total_tokens", 0);
    r.usage = usage;
  }
  return r;
}

std::chrono::milliseconds backoff_delay(int attempt, double jitter) {
  const double base_ms = 1000.0 * static_cast<double>(1ULL << std::min(attempt, 20));
  return std::chrono::milliseconds(static_cast<std::int64_t>(base_ms * jitter));
}

namespace {

// Splits "http://host:port/v1" into ("http://host:port", "/v1").
std::pair<std::string, std::string> split_base_url(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("base_url '" + url + "' has no scheme (http:// or https://)");
  }
  const std::size_t path = url.find('/', scheme + 3);
  std::string host = path == std::string::npos ? url : url.substr(0, path);
  std::string prefix = path == std::string::npos ? "" : url.substr(path);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {host, prefix};
}

std::string redact(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  for (std::size_t pos = text.find(secret); pos != std::string::npos;
       pos = text.find(secret, pos)) {
    text.replace(pos, secret.size(), "<redacted>");
  }
  return text;
}

}  // namespace

HttpLlmClient::HttpLlmClient(ClientConfig cfg, Sleeper sleeper, std::uint64_t jitter_seed)
    : cfg_(std::move(cfg)), sleeper_(std::move(sleeper)), jitter_state_(jitter_seed) {
  cfg_.validate();
  std::tie(scheme_host_port_, path_prefix_) = split_base_url(cfg_.base_url);
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::vector<std::chrono::milliseconds> HttpLlmClient::backoff_history() const {
  std::lock_guard lock(mu_);
  return delays_;
}

ChatResponse HttpLlmClient::complete(const ChatRequest& request) {
  request.validate();
  const std::string body = build_request_body(cfg_, request);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  int last_status = 0;
  std::string last_error;
  for (int attempt = 0;; ++attempt) {
    httplib::Client cli(scheme_host_port_);
    cli.set_connection_timeout(cfg_.timeout_seconds, 0);
    cli.set_read_timeout(cfg_.timeout_seconds, 0);
    cli.set_write_timeout(cfg_.timeout_seconds, 0);
    auto res = cli.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");
    if (!res) {
      last_status = 0;
      last_error = "transport failure: " + httplib::to_string(res.error());
    } else if (res->status >= 200 && res->status < 300) {
      ChatResponse r = parse_response_body(res->body);
      r.retries = attempt;
      return r;
    } else if (res->status == 401 || res->status == 403) {
      throw AuthError("endpoint rejected the credentials (HTTP " +
                          std::to_string(res->status) + ")",
                      res->status, attempt);
    } else if (res->status == 429 || res->status >= 500) {
      last_status = res->status;
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      throw TransportError(redact("endpoint returned HTTP " + std::to_string(res->status) +
                                      ": " + excerpt(res->body),
                                  cfg_.api_key),
                           res->status, attempt);
    }
    if (attempt >= cfg_.max_retries) {
      throw TransportError(redact(last_error + " after " + std::to_string(attempt) +
                                      " retries",
                                  cfg_.api_key),
                           last_status, attempt);
    }
    std::chrono::milliseconds delay;
    {
      std::lock_guard lock(mu_);
      jitter_state_ = mix64(jitter_state_);
      const double u = static_cast<double>(jitter_state_ >> 11) * 0x1.0p-53;
      delay = backoff_delay(attempt, 0.8 + 0.4 * u);
      delays_.push_back(delay);
    }
    sleeper_(delay);
  }
}

MockLlmClient::MockLlmClient(std::vector<std::string> script) : script_(std::move(script)) {}

ChatResponse MockLlmClient::complete(const ChatRequest& request) {
  request.validate();
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  if (next_ >= script_.size()) {
    throw ExhaustionError("mock client script exhausted after " +
                          std::to_string(script_.size()) + " responses");
  }
  ChatResponse r;
  r.content = script_[next_++];
  r.finish_reason = "stop";
  return r;
}

std::vector<ChatRequest> MockLlmClient::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t MockLlmClient::served() const {
  std::lock_guard lock(mu_);
  return next_;
}

std::size_t MockLlmClient::remaining() const {
  std::lock_guard lock(mu_);
  return script_.size() - next_;
}

std::vector<std::string> load_mock_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read mock script " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto json = nlohmann::json::parse(ss.str(), nullptr, false);
  if (json.is_discarded() || !json.is_array()) {
    throw FileError("mock script " + path.string() + " is not a JSON array of strings");
  }
  std::vector<std::string> script;
  for (const auto& item : json) {
    if (!item.is_string()) {
      throw FileError("mock script " + path.string() + " contains a non-string entry");
    }
    script.push_back(item.get<std::string>());
  }
  if (script.empty()) throw FileError("mock script " + path.string() + " is empty");
  return script;
}

}  // namespace policyscope
