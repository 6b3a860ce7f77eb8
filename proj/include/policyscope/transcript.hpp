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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "policyscope/core.hpp"
#include "policyscope/llm_client.hpp"

namespace policyscope {

enum class AgentRole { kStrategy, kGeneration, kSingle };

std::string_view to_string(AgentRole role);
AgentRole agent_role_from_string(std::string_view text);

// One LLM call, stored verbatim.
struct AgentTranscript {
  std::size_t iteration = 0;
  AgentRole role = AgentRole::kStrategy;
  std::string prompt;    // every request message, see format_prompt()
  std::string response;  // raw response content
  // ok: parsed; retried: did not parse and a corrective re-ask followed;
  // fallback: did not parse and the agent fell back.
  ParseOutcome parse_outcome = ParseOutcome::kOk;
  std::int64_t latency_ms = 0;

  bool operator==(const AgentTranscript&) const = default;
};

// `<<role>>` line followed by the content, per message.
std::string format_prompt(const ChatRequest& request);

// Plain-text transcript file: a short header, then one length-prefixed block
// per call so prompts and responses round-trip byte for byte.
struct TranscriptFile {
  std::string config_hash;
  std::size_t repetition = 0;
  std::vector<AgentTranscript> calls;
};

void write_transcript(std::ostream& out, const TranscriptFile& file);
void write_transcript(const std::filesystem::path& path, const TranscriptFile& file);
// Throws FileError on malformed input.
TranscriptFile read_transcript(std::istream& in);
TranscriptFile read_transcript(const std::filesystem::path& path);

// Serves the recorded responses of a transcript in order.
std::unique_ptr<MockLlmClient> make_replay_client(const TranscriptFile& file);

}  // namespace policyscope
