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

#include "policyscope/agents.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <optional>

#include "policyscope/errors.hpp"
#include "policyscope/random.hpp"

namespace policyscope {

Schedule parse_schedule(std::string_view name) {
  if (name == "pure_exploit") return Schedule::kPureExploit;
  if (name == "pure_explore_informativeness") return Schedule::kPureExploreInformativeness;
  if (name == "uniform") return Schedule::kUniform;
  if (name == "epsilon_decay") return Schedule::kEpsilonDecay;
  throw ValidationError("unknown schedule '" + std::string(name) +
                        "' (expected pure_exploit, pure_explore_informativeness, uniform "
                        "or epsilon_decay)");
}

std::string_view to_string(Schedule schedule) {
  switch (schedule) {
    case Schedule::kPureExploit: return "pure_exploit";
    case Schedule::kPureExploreInformativeness: return "pure_explore_informativeness";
    case Schedule::kUniform: return "uniform";
    case Schedule::kEpsilonDecay: return "epsilon_decay";
  }
  return "uniform";
}

WeightProposal ScriptedStrategy::propose_weights(const History&, const StagnationSummary&,
                                                 std::span<const Criterion> active,
                                                 const StepContext& ctx) {
  switch (schedule_) {
    case Schedule::kPureExploit:
      return {WeightVector::unit(active, Criterion::kExploitation), ParseOutcome::kOk};
    case Schedule::kPureExploreInformativeness:
      return {WeightVector::unit(active, Criterion::kInformativeness), ParseOutcome::kOk};
    case Schedule::kUniform:
      return {WeightVector::uniform(active), ParseOutcome::kOk};
    case Schedule::kEpsilonDecay: {
      const double t = static_cast<double>(ctx.iteration);
      const double budget = static_cast<double>(std::max<std::size_t>(ctx.budget, 1));
      const double eps = std::max(0.05, 1.0 - t / budget);
      std::vector<double> raw(active.size(), 0.0);
      bool has_exploit = false;
      bool has_info = false;
      for (std::size_t i = 0; i < active.size(); ++i) {
        if (active[i] == Criterion::kInformativeness) {
          raw[i] = eps;
          has_info = true;
        } else if (active[i] == Criterion::kExploitation) {
          raw[i] = 1.0 - eps;
          has_exploit = true;
        }
      }
      if (!has_exploit || !has_info) {
        throw ValidationError("epsilon_decay needs exploitation and informativeness active");
      }
      return {WeightVector::normalized(active, raw), ParseOutcome::kOk};
    }
  }
  throw ValidationError("unknown schedule");
}

std::unique_ptr<StrategyAgent> scripted_strategy(std::string_view schedule) {
  return std::make_unique<ScriptedStrategy>(parse_schedule(schedule));
}

namespace {

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point start, bool enabled) {
  if (!enabled) return 0;
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - start)
      .count();
}

ChatRequest make_request(const RenderedPrompt& prompt) {
  return ChatRequest{{{"system", prompt.system}, {"user", prompt.user}}};
}

std::string corrective_message(const std::string& previous, const std::string& error) {
  return "\n\nYour previous reply could not be used: " + error +
         "\nYour previous reply was:\n" + previous +
         "\n\nAnswer again and follow the output format exactly.";
}

template <typename T>
struct Asked {
  std::optional<T> value;
  ParseOutcome outcome = ParseOutcome::kOk;
};

// Sends the prompt; on a ParseError re-asks once with the parser's message
// appended. Every call is logged. Transport errors propagate.
template <typename T, typename Parse>
Asked<T> ask_with_reask(LlmClient& client, const RenderedPrompt& prompt, AgentRole role,
                        const StepContext& ctx, Parse&& parse) {
  auto log = [&](const ChatRequest& req, const std::string& response, ParseOutcome outcome,
                 std::int64_t latency) {
    if (ctx.transcripts == nullptr) return;
    ctx.transcripts->push_back(
        AgentTranscript{ctx.iteration, role, format_prompt(req), response, outcome, latency});
  };

  ChatRequest request = make_request(prompt);
  auto start = std::chrono::steady_clock::now();
  ChatResponse first = client.complete(request);
  std::int64_t latency = elapsed_ms(start, ctx.record_timing);
  std::string error;
  try {
    T value = parse(first.content);
    log(request, first.content, ParseOutcome::kOk, latency);
    return {std::move(value), ParseOutcome::kOk};
  } catch (const ParseError& e) {
    error = e.what();
  }
  log(request, first.content, ParseOutcome::kRetried, latency);

  request.messages.back().content += corrective_message(first.content, error);
  start = std::chrono::steady_clock::now();
  ChatResponse second = client.complete(request);
  latency = elapsed_ms(start, ctx.record_timing);
  try {
    T value = parse(second.content);
    log(request, second.content, ParseOutcome::kOk, latency);
    return {std::move(value), ParseOutcome::kRetried};
  } catch (const ParseError&) {
    log(request, second.content, ParseOutcome::kFallback, latency);
  }
  return {std::nullopt, ParseOutcome::kFallback};
}

PromptInputs inputs_for(const History& h, const StagnationSummary& summary,
                        const StepContext& ctx) {
  PromptInputs in;
  in.history = &h;
  in.summary = summary;
  in.budget = ctx.budget;
  in.max_entries = ctx.history_max_entries;
  return in;
}

}  // namespace

LlmStrategy::LlmStrategy(std::shared_ptr<LlmClient> client, const PromptTemplates& templates)
    : client_(std::move(client)), templates_(templates) {
  if (!client_) throw ConfigError("LLM strategy agent needs a client");
}

WeightProposal LlmStrategy::propose_weights(const History& h, const StagnationSummary& summary,
                                            std::span<const Criterion> active,
                                            const StepContext& ctx) {
  const RenderedPrompt prompt =
      render_strategy_prompt(templates_, inputs_for(h, summary, ctx), active);
  auto asked = ask_with_reask<WeightVector>(
      *client_, prompt, AgentRole::kStrategy, ctx,
      [&](const std::string& text) { return parse_weights(text, active); });
  if (asked.value) return {std::move(*asked.value), asked.outcome};
  return {WeightVector::uniform(active), ParseOutcome::kFallback};
}

Point uniform_point(const ProblemSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  Point u(spec.dim);
  for (double& v : u) v = rng.uniform();
  return clamp_point(denormalize_point(u, spec), spec);
}

std::vector<Point> generation_pool(const History& h, const ProblemSpec& spec,
                                   std::size_t pool_size, std::uint64_t seed) {
  if (pool_size == 0) throw ValidationError("generation pool size must be >= 1");
  Rng rng(seed);
  const std::size_t n_local = h.empty() ? 0 : pool_size / 4;
  const std::size_t n_uniform = pool_size - n_local;
  std::vector<Point> pool;
  pool.reserve(pool_size);
  Point u(spec.dim);
  for (std::size_t i = 0; i < n_uniform; ++i) {
    for (double& v : u) v = rng.uniform();
    pool.push_back(clamp_point(denormalize_point(u, spec), spec));
  }
  if (n_local > 0) {
    const Point incumbent = normalize_point(best_so_far(h).point, spec);
    for (std::size_t i = 0; i < n_local; ++i) {
      for (std::size_t j = 0; j < spec.dim; ++j) {
        u[j] = std::clamp(incumbent[j] + kGenerationLocalSigma * rng.normal(), 0.0, 1.0);
      }
      pool.push_back(clamp_point(denormalize_point(u, spec), spec));
    }
  }
  return pool;
}

PoolGeneration::PoolGeneration(std::size_t pool_size, std::size_t cluster_k)
    : pool_size_(pool_size), cluster_k_(cluster_k) {
  if (pool_size_ == 0) throw ValidationError("generation pool size must be >= 1");
}

CandidateProposal PoolGeneration::propose_candidate(const History& h,
                                                    const WeightVector& weights,
                                                    const ProblemSpec& spec,
                                                    const StepContext& ctx) {
  const std::vector<Point> pool =
      generation_pool(h, spec, pool_size_, derive_seed(ctx.seed, "pool"));
  ClusterModel model;
  if (weights.is_active(Criterion::kRepresentativeness)) {
    model = fit_clusters(h, cluster_k_, derive_seed(ctx.seed, "clusters"));
  }
  const CandidateScorer scorer(h, model);
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double s = scorer.score(normalize_point(pool[i], spec), weights);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return {pool[best], ParseOutcome::kOk};
}

LlmGeneration::LlmGeneration(std::shared_ptr<LlmClient> client,
                             const PromptTemplates& templates,
                             std::size_t fallback_pool_size, std::size_t cluster_k)
    : client_(std::move(client)), templates_(templates),
      fallback_(fallback_pool_size, cluster_k) {
  if (!client_) throw ConfigError("LLM generation agent needs a client");
}

CandidateProposal LlmGeneration::propose_candidate(const History& h,
                                                   const WeightVector& weights,
                                                   const ProblemSpec& spec,
                                                   const StepContext& ctx) {
  const StagnationSummary summary = improvement_window(h);
  const RenderedPrompt prompt =
      render_generation_prompt(templates_, inputs_for(h, summary, ctx), weights);
  auto asked = ask_with_reask<Point>(
      *client_, prompt, AgentRole::kGeneration, ctx,
      [&](const std::string& text) { return parse_parameters(text, spec); });
  if (asked.value) return {std::move(*asked.value), asked.outcome};
  CandidateProposal fb = fallback_.propose_candidate(h, weights, spec, ctx);
  fb.outcome = ParseOutcome::kFallback;
  return fb;
}

SingleAgent::SingleAgent(std::shared_ptr<LlmClient> client, const PromptTemplates& templates)
    : client_(std::move(client)), templates_(templates) {
  if (!client_) throw ConfigError("single agent needs a client");
}

CandidateProposal SingleAgent::propose(const History& h, const StagnationSummary& summary,
                                       std::span<const Criterion> active,
                                       const StepContext& ctx) {
  const RenderedPrompt prompt =
      render_single_prompt(templates_, inputs_for(h, summary, ctx), active);
  const ProblemSpec& spec = h.problem();
  auto asked = ask_with_reask<Point>(
      *client_, prompt, AgentRole::kSingle, ctx,
      [&](const std::string& text) { return parse_parameters(text, spec); });
  if (asked.value) return {std::move(*asked.value), asked.outcome};
  return {uniform_point(spec, derive_seed(ctx.seed, "single_fallback")),
          ParseOutcome::kFallback};
}

}  // namespace policyscope
