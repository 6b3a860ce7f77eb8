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
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "policyscope/core.hpp"
#include "policyscope/llm_client.hpp"
#include "policyscope/metrics.hpp"
#include "policyscope/prompts.hpp"
#include "policyscope/transcript.hpp"

namespace policyscope {

// Per-iteration inputs shared by all agents.
struct StepContext {
  std::size_t iteration = 0;  // 1-based index of the evaluation being proposed
  std::size_t budget = 0;
  std::uint64_t seed = 0;     // per-iteration seed
  std::vector<AgentTranscript>* transcripts = nullptr;
  bool record_timing = true;
  std::size_t history_max_entries = kDefaultHistoryEntries;
};

struct WeightProposal {
  WeightVector weights;
  ParseOutcome outcome = ParseOutcome::kOk;
};

struct CandidateProposal {
  Point point;
  ParseOutcome outcome = ParseOutcome::kOk;
};

// Builds the search policy for one iteration.
class StrategyAgent {
 public:
  virtual ~StrategyAgent() = default;
  virtual WeightProposal propose_weights(const History& h, const StagnationSummary& summary,
                                         std::span<const Criterion> active,
                                         const StepContext& ctx) = 0;
};

// Turns a policy into a concrete in-bounds candidate.
class GenerationAgent {
 public:
  virtual ~GenerationAgent() = default;
  virtual CandidateProposal propose_candidate(const History& h, const WeightVector& weights,
                                              const ProblemSpec& spec,
                                              const StepContext& ctx) = 0;
};

enum class Schedule { kPureExploit, kPureExploreInformativeness, kUniform, kEpsilonDecay };

// Throws ValidationError for unknown names.
Schedule parse_schedule(std::string_view name);
std::string_view to_string(Schedule schedule);

// Deterministic policies:
//   pure_exploit                   unit mass on exploitation
//   pure_explore_informativeness   unit mass on informativeness
//   uniform                        equal weights over the active criteria
//   epsilon_decay                  eps = max(0.05, 1 - t/budget) on
//                                  informativeness, the rest on exploitation
class ScriptedStrategy final : public StrategyAgent {
 public:
  explicit ScriptedStrategy(Schedule schedule) : schedule_(schedule) {}

  WeightProposal propose_weights(const History& h, const StagnationSummary& summary,
                                 std::span<const Criterion> active,
                                 const StepContext& ctx) override;

 private:
  Schedule schedule_;
};

std::unique_ptr<StrategyAgent> scripted_strategy(std::string_view schedule);

// Asks the model for weights between `** weights **` markers. One corrective
// re-ask on a parse failure, uniform weights after a second one.
class LlmStrategy final : public StrategyAgent {
 public:
  LlmStrategy(std::shared_ptr<LlmClient> client, const PromptTemplates& templates);

  WeightProposal propose_weights(const History& h, const StagnationSummary& summary,
                                 std::span<const Criterion> active,
                                 const StepContext& ctx) override;

 private:
  std::shared_ptr<LlmClient> client_;
  PromptTemplates templates_;
};

inline constexpr std::size_t kGenerationPoolSize = 512;
inline constexpr double kGenerationLocalSigma = 0.1;

// Seeded candidate pool: 3/4 uniform points, 1/4 Gaussian perturbations of
// the incumbent (sigma 0.1 in normalized space). Points are clamped and
// integer dims rounded.
std::vector<Point> generation_pool(const History& h, const ProblemSpec& spec,
                                   std::size_t pool_size, std::uint64_t seed);

// Argmax of the weighted criteria over a generation pool.
class PoolGeneration final : public GenerationAgent {
 public:
  explicit PoolGeneration(std::size_t pool_size = kGenerationPoolSize,
                          std::size_t cluster_k = kDefaultClusters);

  CandidateProposal propose_candidate(const History& h, const WeightVector& weights,
                                      const ProblemSpec& spec,
                                      const StepContext& ctx) override;

 private:
  std::size_t pool_size_;
  std::size_t cluster_k_;
};

// Asks the model for a point between `## parameters ##` markers. One
// corrective re-ask, then falls back to pool generation with the same
// weights and seed.
class LlmGeneration final : public GenerationAgent {
 public:
  LlmGeneration(std::shared_ptr<LlmClient> client, const PromptTemplates& templates,
                std::size_t fallback_pool_size = kGenerationPoolSize,
                std::size_t cluster_k = kDefaultClusters);

  CandidateProposal propose_candidate(const History& h, const WeightVector& weights,
                                      const ProblemSpec& spec,
                                      const StepContext& ctx) override;

 private:
  std::shared_ptr<LlmClient> client_;
  PromptTemplates templates_;
  PoolGeneration fallback_;
};

// One prompt per iteration that both reasons about strategy and emits the
// candidate. No weight vector exists; the fallback is a seeded uniform point.
class SingleAgent {
 public:
  SingleAgent(std::shared_ptr<LlmClient> client, const PromptTemplates& templates);

  CandidateProposal propose(const History& h, const StagnationSummary& summary,
                            std::span<const Criterion> active, const StepContext& ctx);

 private:
  std::shared_ptr<LlmClient> client_;
  PromptTemplates templates_;
};

// Seeded uniform point in the box (clamped, integer dims rounded).
Point uniform_point(const ProblemSpec& spec, std::uint64_t seed);

}  // namespace policyscope
