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

#include "policyscope/transcript.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "policyscope/errors.hpp"

namespace policyscope {

namespace {

constexpr std::string_view kMagic = "policyscope-transcript v1";

}  // namespace

std::string_view to_string(AgentRole role) {
  switch (role) {
    case AgentRole::kStrategy: return "strategy";
    case AgentRole::kGeneration: return "generation";
    case AgentRole::kSingle: return "single";
  }
  return "strategy";
}

AgentRole agent_role_from_string(std::string_view text) {
  if (text == "strategy") return AgentRole::kStrategy;
  if (text == "generation") return AgentRole::kGeneration;
  if (text == "single") return AgentRole::kSingle;
  throw ValidationError("unknown agent role '" + std::string(text) + "'");
}

std::string format_prompt(const ChatRequest& request) {
  std::string out;
  for (const ChatMessage& m : request.messages) {
    out += "<<" + m.role + ">>\n" + m.content + "\n";
  }
  return out;
}

void write_transcript(std::ostream& out, const TranscriptFile& file) {
  out << kMagic << '\n';
  out << "config_hash: " << file.config_hash << '\n';
  out << "repetition: " << file.repetition << '\n';
  std::size_t n = 0;
  for (const AgentTranscript& t : file.calls) {
    out << "\n=== call " << ++n << " ===\n";
    out << "iteration: " << t.iteration << '\n';
    out << "role: " << to_string(t.role) << '\n';
    out << "parse_outcome: " << to_string(t.parse_outcome) << '\n';
    out << "latency_ms: " << t.latency_ms << '\n';
    out << "prompt_bytes: " << t.prompt.size() << '\n' << t.prompt << '\n';
    out << "response_bytes: " << t.response.size() << '\n' << t.response << '\n';
    out << "=== end call " << n << " ===\n";
  }
}

void write_transcript(const std::filesystem::path& path, const TranscriptFile& file) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot write transcript " + path.string());
  write_transcript(out, file);
  if (!out) throw FileError("failed writing transcript " + path.string());
}

namespace {

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) fail("unexpected end of file");
    ++line_no_;
    return s;
  }

  bool at_eof() {
    return in_.peek() == std::char_traits<char>::eof();
  }

  std::string field(std::string_view key) {
    const std::string s = line();
    const std::string prefix = std::string(key) + ": ";
    if (s.rfind(prefix, 0) != 0) fail("expected '" + std::string(key) + ":'");
    return s.substr(prefix.size());
  }

  template <typename T>
  T number(std::string_view key) {
    const std::string s = field(key);
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail("bad number for " + std::string(key));
    return v;
  }

  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) fail("truncated payload");
    for (char c : s) {
      if (c == '\n') ++line_no_;
    }
    if (in_.get() != '\n') fail("payload not followed by a newline");
    ++line_no_;
    return s;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FileError("transcript line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

TranscriptFile read_transcript(std::istream& in) {
  Reader r(in);
  if (r.line() != kMagic) r.fail("not a policyscope transcript");
  TranscriptFile file;
  file.config_hash = r.field("config_hash");
  file.repetition = r.number<std::size_t>("repetition");
  std::size_t n = 0;
  while (!r.at_eof()) {
    const std::string blank = r.line();
    if (blank.empty() && r.at_eof()) break;
    if (!blank.empty()) r.fail("expected a blank line between calls");
    if (r.line() != "=== call " + std::to_string(++n) + " ===") r.fail("expected call header");
    AgentTranscript t;
    t.iteration = r.number<std::size_t>("iteration");
    try {
      t.role = agent_role_from_string(r.field("role"));
      t.parse_outcome = parse_outcome_from_string(r.field("parse_outcome"));
    } catch (const ValidationError& e) {
      r.fail(e.what());
    }
    t.latency_ms = r.number<std::int64_t>("latency_ms");
    t.prompt = r.bytes(r.number<std::size_t>("prompt_bytes"));
    t.response = r.bytes(r.number<std::size_t>("response_bytes"));
    if (r.line() != "=== end call " + std::to_string(n) + " ===") r.fail("expected call trailer");
    file.calls.push_back(std::move(t));
  }
  return file;
}

TranscriptFile read_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read transcript " + path.string());
  return read_transcript(in);
}

std::unique_ptr<MockLlmClient> make_replay_client(const TranscriptFile& file) {
  std::vector<std::string> responses;
  responses.reserve(file.calls.size());
  for (const AgentTranscript& t : file.calls) responses.push_back(t.response);
  return std::make_unique<MockLlmClient>(std::move(responses));
}

}  // namespace policyscope
