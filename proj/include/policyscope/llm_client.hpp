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

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace policyscope {

inline constexpr const char* kApiKeyEnv = "POLICYSCOPE_API_KEY";
inline constexpr const char* kBaseUrlEnv = "POLICYSCOPE_BASE_URL";

struct ClientConfig {
  std::string base_url;
  std::string model = "llama-3.3-70b-instruct";
  double temperature = 0.7;
  int max_tokens = 1024;
  int timeout_seconds = 60;
  int max_retries = 3;
  // Only ever read from the environment; never serialized or logged.
  std::string api_key;

  // Throws ConfigError.
  void validate() const;
};

// Fills base_url (when empty) and api_key from the environment.
void apply_client_environment(ClientConfig& cfg);

struct ChatMessage {
  std::string role;  // "system" or "user"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;

  // Throws ValidationError unless nonempty and the first message is system.
  void validate() const;
};

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int total_tokens = 0;
};

struct ChatResponse {
  std::string content;
  std::string finish_reason;
  std::optional<TokenUsage> usage;
  int retries = 0;
};

// Chat-completion transport. Implementations are callable from any thread.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// JSON body {model, messages, temperature, max_tokens}.
std::string build_request_body(const ClientConfig& cfg, const ChatRequest& request);

// Content of the first choice. Throws ProtocolError with a truncated body
// excerpt when the body is not a chat-completions response.
ChatResponse parse_response_body(const std::string& body);

// Backoff before retry `attempt` (0-based): 1s, 2s, 4s, ... scaled by
// `jitter` in [0.8, 1.2].
std::chrono::milliseconds backoff_delay(int attempt, double jitter);

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// OpenAI-compatible endpoint at `<base_url>/chat/completions`. Retries
// transport failures, 429 and 5xx with exponential backoff; other 4xx fail
// at once (401/403 as AuthError).
class HttpLlmClient final : public LlmClient {
 public:
  explicit HttpLlmClient(ClientConfig cfg, Sleeper sleeper = {},
                         std::uint64_t jitter_seed = 0x5eed);

  ChatResponse complete(const ChatRequest& request) override;

  const ClientConfig& config() const noexcept { return cfg_; }
  // Delays requested so far, for inspection.
  std::vector<std::chrono::milliseconds> backoff_history() const;

 private:
  ClientConfig cfg_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  Sleeper sleeper_;
  mutable std::mutex mu_;
  std::uint64_t jitter_state_;
  std::vector<std::chrono::milliseconds> delays_;
};

// Serves canned responses in order and records every request. Running past
// the end of the script throws ExhaustionError.
class MockLlmClient final : public LlmClient {
 public:
  explicit MockLlmClient(std::vector<std::string> script);

  ChatResponse complete(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;
  std::size_t served() const;
  std::size_t remaining() const;

 private:
  std::vector<std::string> script_;
  mutable std::mutex mu_;
  std::size_t next_ = 0;
  std::vector<ChatRequest> requests_;
};

// Mock script file: a JSON array of response strings.
std::vector<std::string> load_mock_script(const std::filesystem::path& path);

}  // namespace policyscope
