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
#include <optional>
#include <string>
#include <vector>

#include "policyscope/config.hpp"
#include "policyscope/core.hpp"
#include "policyscope/llm_client.hpp"
#include "policyscope/transcript.hpp"

namespace policyscope {

struct RunResult {
  RunConfig config;
  std::string config_hash;
  std::size_t repetition = 0;
  std::uint64_t run_seed = 0;
  ProblemSpec spec;
  std::vector<RunRecord> records;
  std::vector<AgentTranscript> transcripts;
  Evaluation best;
  // Objective calls counted at the evaluator boundary.
  std::size_t evaluations = 0;
};

struct RunOptions {
  // Client for LLM optimizers. When null one is built from the config
  // (http endpoint or mock script).
  std::shared_ptr<LlmClient> client;
  std::size_t repetition = 0;  // run seed = config seed + repetition
  // When set, run_<rep>.csv and run_<rep>.transcript.txt are written here,
  // also (partially) when the run fails.
  std::optional<std::filesystem::path> output_dir;
};

// Client described by the config: mock script or http endpoint (environment
// applied). Throws ConfigError.
std::shared_ptr<LlmClient> make_client(const RunConfig& cfg);

// Seeds n_init uniform points, then runs the optimizer's per-iteration
// protocol until exactly `budget` evaluations exist.
RunResult run_optimization(const RunConfig& cfg, const RunOptions& options = {});

std::string run_csv_name(std::size_t repetition);
std::string run_transcript_name(std::size_t repetition);

// Columns: iteration, x_1..x_d, y, best_so_far, w_exploitation,
// w_informativeness, w_diversity, w_representativeness, parse_outcome,
// wall_time_ms. Weight and parse columns stay empty when absent.
void write_run_csv(std::ostream& out, std::size_t dim, const std::vector<RunRecord>& records);
void write_run_csv(const std::filesystem::path& path, std::size_t dim,
                   const std::vector<RunRecord>& records);

// Parsed per-run CSV.
struct RunTable {
  std::size_t dim = 0;
  std::vector<RunRecord> records;
};

// Throws FileError naming the path on a missing or malformed file.
RunTable read_run_csv(const std::filesystem::path& path);

struct IterationSummary {
  std::size_t iteration = 0;
  std::size_t runs = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct RunStatus {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double final_best = 0.0;
  std::string message;
};

struct SuiteSummary {
  std::vector<IterationSummary> iterations;
  std::vector<RunStatus> runs;

  std::size_t succeeded() const;
  std::size_t failed() const;
};

// Median and quartiles (inclusive linear interpolation) of a sample.
IterationSummary summarize(std::vector<double> values);

// Best-so-far statistics per iteration across runs.
std::vector<IterationSummary> summarize_runs(const std::vector<std::vector<RunRecord>>& runs);

// Runs cfg.repetitions repetitions (seeds seed+0 .. seed+r-1) into
// cfg.output_dir: run CSVs, transcripts, summary.csv and runs.csv. A failing
// repetition is recorded and the rest continue.
SuiteSummary run_suite(const RunConfig& cfg);

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<IterationSummary>& rows);
void write_runs_csv(const std::filesystem::path& path, const std::vector<RunStatus>& runs);

// Re-executes a recorded run, serving the transcript's responses in order.
// Throws ReplayError when the transcript was produced under a different
// config, or when responses are left over.
RunResult replay(const std::filesystem::path& transcript, const RunConfig& cfg,
                 const std::optional<std::filesystem::path>& output_dir = std::nullopt);

}  // namespace policyscope
