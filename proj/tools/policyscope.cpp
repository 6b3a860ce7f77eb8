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

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <regex>
#include <string>

#include "CLI11.hpp"
#include "policyscope/benchmarks.hpp"
#include "policyscope/config.hpp"
#include "policyscope/errors.hpp"
#include "policyscope/harness.hpp"
#include "policyscope/plots.hpp"

namespace fs = std::filesystem;
using namespace policyscope;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> optimizer, benchmark, criteria, output;
  std::optional<std::size_t> budget, reps, jobs;
  std::optional<std::uint64_t> seed;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "config file (key = value lines)");
  cmd->add_option("--optimizer", o.optimizer, "optimizer id");
  cmd->add_option("--benchmark", o.benchmark, "benchmark name");
  cmd->add_option("--budget", o.budget, "total evaluations");
  cmd->add_option("--seed", o.seed, "run seed");
  cmd->add_option("--criteria", o.criteria, "active criteria, comma separated");
  cmd->add_option("--output", o.output, "output directory");
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.optimizer) cfg.optimizer = *o.optimizer;
  if (o.benchmark) cfg.benchmark = *o.benchmark;
  if (o.budget) cfg.budget = *o.budget;
  if (o.seed) cfg.seed = *o.seed;
  if (o.criteria) set_config_value(cfg, "criteria", *o.criteria);
  if (o.output) cfg.output_dir = *o.output;
  if (o.reps) cfg.repetitions = *o.reps;
  if (o.jobs) cfg.jobs = *o.jobs;
  cfg.validate();
  return cfg;
}

int cmd_run(const Overrides& o) {
  const RunConfig cfg = resolve(o);
  RunOptions opts;
  opts.output_dir = cfg.output_dir;
  const RunResult r = run_optimization(cfg, opts);
  std::printf("%s: %zu evaluations, best y = %.10g at iteration %zu\n", cfg.optimizer.c_str(),
              r.evaluations, r.best.value, r.best.iteration);
  std::printf("wrote %s\n", (cfg.output_dir / run_csv_name(0)).string().c_str());
  return 0;
}

int cmd_suite(const Overrides& o) {
  const RunConfig cfg = resolve(o);
  const SuiteSummary s = run_suite(cfg);
  for (const RunStatus& run : s.runs) {
    if (run.ok) {
      std::printf("repetition %zu (seed %llu): best %.10g\n", run.repetition,
                  static_cast<unsigned long long>(run.seed), run.final_best);
    } else {
      std::fprintf(stderr, "repetition %zu (seed %llu) failed: %s\n", run.repetition,
                   static_cast<unsigned long long>(run.seed), run.message.c_str());
    }
  }
  if (!s.iterations.empty()) {
    const IterationSummary& last = s.iterations.back();
    std::printf("final median best %.10g (IQR %.10g .. %.10g) over %zu runs\n", last.median,
                last.q25, last.q75, last.runs);
  }
  std::printf("%zu succeeded, %zu failed; summary in %s\n", s.succeeded(), s.failed(),
              (cfg.output_dir / "summary.csv").string().c_str());
  return s.failed() == 0 ? 0 : 1;
}

int cmd_replay(const std::string& target, const Overrides& o) {
  const RunConfig cfg = resolve(o);
  std::vector<fs::path> transcripts;
  if (fs::is_directory(target)) {
    static const std::regex name(R"(run_\d+\.transcript\.txt)");
    for (const auto& e : fs::directory_iterator(target)) {
      if (std::regex_match(e.path().filename().string(), name)) transcripts.push_back(e.path());
    }
    std::sort(transcripts.begin(), transcripts.end());
    if (transcripts.empty()) throw FileError("no transcripts in " + target);
  } else {
    transcripts.emplace_back(target);
  }
  std::optional<fs::path> out;
  if (o.output) out = *o.output;
  for (const fs::path& t : transcripts) {
    const RunResult r = replay(t, cfg, out);
    std::printf("replayed %s: repetition %zu, best y = %.10g\n", t.string().c_str(),
                r.repetition, r.best.value);
  }
  return 0;
}

int cmd_plot(const std::string& dir) {
  for (const fs::path& p : emit_plots(dir)) std::printf("wrote %s\n", p.string().c_str());
  return 0;
}

int cmd_bench_list() {
  for (const BenchmarkInfo& b : list_benchmarks()) {
    std::printf("%-12s dim %zu  %s\n", b.name.c_str(), b.dim, std::string(to_string(b.sense)).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy-weighted optimization loops and baselines"};
  app.require_subcommand(1);

  Overrides run_o, suite_o, replay_o;
  auto* run = app.add_subcommand("run", "one optimization run");
  add_override_flags(run, run_o);

  auto* suite = app.add_subcommand("suite", "repetitions with a summary table");
  add_override_flags(suite, suite_o);
  suite->add_option("--reps", suite_o.reps, "repetitions");
  suite->add_option("--jobs", suite_o.jobs, "parallel repetitions");

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot", "SVG plots for a results directory");
  plot->add_option("dir", plot_dir, "results directory")->required();

  std::string transcript;
  auto* rep = app.add_subcommand("replay", "re-run from recorded transcripts");
  rep->add_option("transcript", transcript, "transcript file or results directory")->required();
  add_override_flags(rep, replay_o);

  auto* bench = app.add_subcommand("bench", "benchmark registry");
  bench->require_subcommand(1);
  auto* bench_list = bench->add_subcommand("list", "list benchmarks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_o);
    if (*suite) return cmd_suite(suite_o);
    if (*rep) return cmd_replay(transcript, replay_o);
    if (*plot) return cmd_plot(plot_dir);
    if (*bench_list) return cmd_bench_list();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
