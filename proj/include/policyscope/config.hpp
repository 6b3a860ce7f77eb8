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
#include <string>
#include <string_view>
#include <vector>

#include "policyscope/core.hpp"
#include "policyscope/llm_client.hpp"
#include "policyscope/prompts.hpp"

namespace policyscope {

enum class OptimizerKind { kRandom, kGpEi, kGpUcb, kSingleAgent, kMultiAgent, kMultiAgentScripted };

struct OptimizerId {
  OptimizerKind kind = OptimizerKind::kRandom;
  std::string schedule;  // only for kMultiAgentScripted

  bool uses_llm() const noexcept {
    return kind == OptimizerKind::kSingleAgent || kind == OptimizerKind::kMultiAgent;
  }
  bool has_policy() const noexcept {
    return kind == OptimizerKind::kMultiAgent || kind == OptimizerKind::kMultiAgentScripted;
  }
};

// Accepts random, gp_ei, gp_ucb, single_agent, multi_agent and
// multi_agent_scripted:<schedule>. Throws ConfigError.
OptimizerId parse_optimizer(std::string_view id);

// Everything needed to reproduce one run (or a suite of repetitions).
//
// Config files are flat `key = value` lines; `#` starts a comment. Keys match
// the field names below, with `criteria` as a comma-separated list and the
// LLM settings as base_url, model, temperature, max_tokens, timeout_seconds
// and max_retries. The API key is never read from a file.
struct RunConfig {
  std::string benchmark = "rosenbrock";
  std::uint64_t benchmark_seed = 0;
  std::size_t dim = 2;  // rosenbrock only
  std::string optimizer = "random";
  std::size_t budget = 30;
  std::size_t n_init = 3;
  std::uint64_t seed = 0;
  std::size_t repetitions = 10;
  std::vector<Criterion> criteria{kAllCriteria.begin(), kAllCriteria.end()};
  std::filesystem::path output_dir = "results";

  std::size_t pool_size = 512;               // generation agent pool
  std::size_t acquisition_pool_size = 2048;  // GP baselines
  double ucb_beta = 2.0;
  std::size_t cluster_k = 3;
  std::size_t history_max_entries = 0;       // 0: full history (= budget)

  std::string client = "http";  // http | mock
  std::filesystem::path mock_script;
  std::filesystem::path templates_dir;  // empty: built-in templates
  bool timing = true;                   // false: wall_time/latency logged as 0
  std::size_t jobs = 1;                 // parallel repetitions in a suite

  ClientConfig llm;

  // Throws ConfigError.
  void validate() const;

  // Key=value lines of every setting that influences a trajectory.
  std::string canonical() const;
};

// Parses config text. Throws ConfigError naming the line on unknown keys or
// malformed values. Later keys override earlier ones.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path);

// Applies one `key = value` setting (used by both the file parser and CLI
// overrides).
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

// Templates from templates_dir, or the built-in set.
PromptTemplates load_run_templates(const RunConfig& cfg);

// Hex digest of canonical() plus the prompt-template fingerprint.
std::string config_hash(const RunConfig& cfg);

}  // namespace policyscope
