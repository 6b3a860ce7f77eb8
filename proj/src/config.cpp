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

#include "policyscope/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "policyscope/agents.hpp"
#include "policyscope/benchmarks.hpp"
#include "policyscope/errors.hpp"
#include "policyscope/random.hpp"

namespace policyscope {

OptimizerId parse_optimizer(std::string_view id) {
  OptimizerId out;
  if (id == "random") {
    out.kind = OptimizerKind::kRandom;
  } else if (id == "gp_ei") {
    out.kind = OptimizerKind::kGpEi;
  } else if (id == "gp_ucb") {
    out.kind = OptimizerKind::kGpUcb;
  } else if (id == "single_agent") {
    out.kind = OptimizerKind::kSingleAgent;
  } else if (id == "multi_agent") {
    out.kind = OptimizerKind::kMultiAgent;
  } else if (id.rfind("multi_agent_scripted:", 0) == 0) {
    out.kind = OptimizerKind::kMultiAgentScripted;
    out.schedule = std::string(id.substr(std::string_view("multi_agent_scripted:").size()));
    try {
      parse_schedule(out.schedule);
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
  } else {
    throw ConfigError("unknown optimizer '" + std::string(id) +
                      "' (expected random, gp_ei, gp_ucb, single_agent, multi_agent or "
                      "multi_agent_scripted:<schedule>)");
  }
  return out;
}

void RunConfig::validate() const {
  const OptimizerId opt = parse_optimizer(optimizer);
  const auto names = list_benchmarks();
  if (std::none_of(names.begin(), names.end(),
                   [&](const BenchmarkInfo& b) { return b.name == benchmark; })) {
    throw ConfigError("unknown benchmark '" + benchmark + "'");
  }
  if (benchmark == "rosenbrock" && dim < 2) throw ConfigError("rosenbrock needs dim >= 2");
  if (n_init < 1) throw ConfigError("n_init must be >= 1");
  if (budget < n_init) throw ConfigError("budget must be >= n_init");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (criteria.empty()) throw ConfigError("criteria must name at least one criterion");
  if (pool_size < 1 || acquisition_pool_size < 1) throw ConfigError("pool sizes must be >= 1");
  if (cluster_k < 1) throw ConfigError("cluster_k must be >= 1");
  if (!(ucb_beta >= 0.0)) throw ConfigError("ucb_beta must be >= 0");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (client != "http" && client != "mock") {
    throw ConfigError("client must be 'http' or 'mock', got '" + client + "'");
  }
  if (opt.kind == OptimizerKind::kMultiAgentScripted) {
    auto has = [&](Criterion c) {
      return std::find(criteria.begin(), criteria.end(), c) != criteria.end();
    };
    const Schedule s = parse_schedule(opt.schedule);
    const bool ok =
        (s != Schedule::kPureExploit || has(Criterion::kExploitation)) &&
        (s != Schedule::kPureExploreInformativeness || has(Criterion::kInformativeness)) &&
        (s != Schedule::kEpsilonDecay ||
         (has(Criterion::kExploitation) && has(Criterion::kInformativeness)));
    if (!ok) {
      throw ConfigError("schedule " + opt.schedule + " needs criteria that are not active");
    }
  }
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_unsigned(std::string_view key, std::string_view value) {
  T v{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a nonnegative integer, got '" +
                      std::string(value) + "'");
  }
  return v;
}

int parse_int(std::string_view key, std::string_view value) {
  int v = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size()) {
    throw ConfigError("'" + std::string(key) + "' expects an integer, got '" +
                      std::string(value) + "'");
  }
  return v;
}

double parse_real(std::string_view key, std::string_view value) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" +
                      std::string(value) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "off" || value == "0" || value == "no") return false;
  throw ConfigError("'" + std::string(key) + "' expects true/false, got '" +
                    std::string(value) + "'");
}

}  // namespace

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "benchmark") cfg.benchmark = value;
  else if (key == "benchmark_seed") cfg.benchmark_seed = parse_unsigned<std::uint64_t>(key, value);
  else if (key == "dim") cfg.dim = parse_unsigned<std::size_t>(key, value);
  else if (key == "optimizer") cfg.optimizer = value;
  else if (key == "budget") cfg.budget = parse_unsigned<std::size_t>(key, value);
  else if (key == "n_init") cfg.n_init = parse_unsigned<std::size_t>(key, value);
  else if (key == "seed") cfg.seed = parse_unsigned<std::uint64_t>(key, value);
  else if (key == "repetitions") cfg.repetitions = parse_unsigned<std::size_t>(key, value);
  else if (key == "criteria") {
    try {
      cfg.criteria = parse_criteria_list(value);
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
  }
  else if (key == "output_dir") cfg.output_dir = std::string(value);
  else if (key == "pool_size") cfg.pool_size = parse_unsigned<std::size_t>(key, value);
  else if (key == "acquisition_pool_size") cfg.acquisition_pool_size = parse_unsigned<std::size_t>(key, value);
  else if (key == "ucb_beta") cfg.ucb_beta = parse_real(key, value);
  else if (key == "cluster_k") cfg.cluster_k = parse_unsigned<std::size_t>(key, value);
  else if (key == "history_max_entries") cfg.history_max_entries = parse_unsigned<std::size_t>(key, value);
  else if (key == "client") cfg.client = value;
  else if (key == "mock_script") cfg.mock_script = std::string(value);
  else if (key == "templates_dir") cfg.templates_dir = std::string(value);
  else if (key == "timing") cfg.timing = parse_bool(key, value);
  else if (key == "jobs") cfg.jobs = parse_unsigned<std::size_t>(key, value);
  else if (key == "base_url") cfg.llm.base_url = value;
  else if (key == "model") cfg.llm.model = value;
  else if (key == "temperature") cfg.llm.temperature = parse_real(key, value);
  else if (key == "max_tokens") cfg.llm.max_tokens = parse_int(key, value);
  else if (key == "timeout_seconds") cfg.llm.timeout_seconds = parse_int(key, value);
  else if (key == "max_retries") cfg.llm.max_retries = parse_int(key, value);
  else if (key == "api_key") {
    throw ConfigError(std::string("api_key cannot be set in a config file; use ") + kApiKeyEnv);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      set_config_value(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str());
  // Relative paths in a config file are relative to the file.
  const std::filesystem::path base = path.parent_path();
  for (std::filesystem::path* p : {&cfg.mock_script, &cfg.templates_dir}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  return cfg;
}

std::string RunConfig::canonical() const {
  std::ostringstream out;
  out << "benchmark=" << benchmark << '\n'
      << "benchmark_seed=" << benchmark_seed << '\n'
      << "dim=" << dim << '\n'
      << "optimizer=" << optimizer << '\n'
      << "budget=" << budget << '\n'
      << "n_init=" << n_init << '\n'
      << "seed=" << seed << '\n'
      << "criteria=" << format_criteria_list(criteria) << '\n'
      << "pool_size=" << pool_size << '\n'
      << "acquisition_pool_size=" << acquisition_pool_size << '\n'
      << "ucb_beta=" << fmt_double(ucb_beta) << '\n'
      << "cluster_k=" << cluster_k << '\n'
      << "history_max_entries=" << history_max_entries << '\n'
      << "model=" << llm.model << '\n'
      << "temperature=" << fmt_double(llm.temperature) << '\n'
      << "max_tokens=" << llm.max_tokens << '\n';
  return out.str();
}

PromptTemplates load_run_templates(const RunConfig& cfg) {
  if (cfg.templates_dir.empty()) return PromptTemplates::builtin();
  return PromptTemplates::load(cfg.templates_dir);
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = fnv1a64(cfg.canonical());
  h = mix64(h ^ load_run_templates(cfg).fingerprint);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace policyscope
