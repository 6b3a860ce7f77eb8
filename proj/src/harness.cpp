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

#include "policyscope/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "policyscope/agents.hpp"
#include "policyscope/benchmarks.hpp"
#include "policyscope/errors.hpp"
#include "policyscope/random.hpp"
#include "policyscope/surrogate.hpp"

namespace policyscope {

std::shared_ptr<LlmClient> make_client(const RunConfig& cfg) {
  if (cfg.client == "mock") {
    if (cfg.mock_script.empty()) throw ConfigError("client = mock needs mock_script");
    return std::make_shared<MockLlmClient>(load_mock_script(cfg.mock_script));
  }
  ClientConfig llm = cfg.llm;
  apply_client_environment(llm);
  return std::make_shared<HttpLlmClient>(std::move(llm));
}

namespace {

struct Proposal {
  Point point;
  std::optional<WeightVector> weights;
  std::optional<ParseOutcome> outcome;
};

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual Proposal propose(const History& h, const StepContext& ctx) = 0;
};

class RandomOptimizer final : public Optimizer {
 public:
  Proposal propose(const History& h, const StepContext& ctx) override {
    return {uniform_point(h.problem(), derive_seed(ctx.seed, "random")), {}, {}};
  }
};

class GpOptimizer final : public Optimizer {
 public:
  GpOptimizer(bool use_ei, double beta, std::size_t pool_size)
      : use_ei_(use_ei), beta_(beta), pool_size_(pool_size) {}

  Proposal propose(const History& h, const StepContext& ctx) override {
    const GpModel model = gp_fit(h);
    double y_best = h.internal_value(0);
    for (std::size_t i = 1; i < h.size(); ++i) y_best = std::max(y_best, h.internal_value(i));
    Acquisition acq;
    if (use_ei_) {
      acq = [&](std::span<const double> x) { return expected_improvement(model, x, y_best); };
    } else {
      acq = [&](std::span<const double> x) { return ucb(model, x, beta_); };
    }
    return {maximize_acquisition(model, h.problem(), acq, pool_size_,
                                 derive_seed(ctx.seed, "acquisition")),
            {},
            {}};
  }

 private:
  bool use_ei_;
  double beta_;
  std::size_t pool_size_;
};

class MultiAgentOptimizer final : public Optimizer {
 public:
  MultiAgentOptimizer(std::unique_ptr<StrategyAgent> strategy,
                      std::unique_ptr<GenerationAgent> generation,
                      std::vector<Criterion> active, bool report_outcome)
      : strategy_(std::move(strategy)), generation_(std::move(generation)),
        active_(std::move(active)), report_outcome_(report_outcome) {}

  Proposal propose(const History& h, const StepContext& ctx) override {
    const StagnationSummary summary = improvement_window(h);
    WeightProposal w = strategy_->propose_weights(h, summary, active_, ctx);
    CandidateProposal c = generation_->propose_candidate(h, w.weights, h.problem(), ctx);
    Proposal p{std::move(c.point), std::move(w.weights), {}};
    if (report_outcome_) p.outcome = worst_of(w.outcome, c.outcome);
    return p;
  }

 private:
  std::unique_ptr<StrategyAgent> strategy_;
  std::unique_ptr<GenerationAgent> generation_;
  std::vector<Criterion> active_;
  bool report_outcome_;
};

class SingleAgentOptimizer final : public Optimizer {
 public:
  SingleAgentOptimizer(std::shared_ptr<LlmClient> client, const PromptTemplates& templates,
                       std::vector<Criterion> active)
      : agent_(std::move(client), templates), active_(std::move(active)) {}

  Proposal propose(const History& h, const StepContext& ctx) override {
    CandidateProposal c = agent_.propose(h, improvement_window(h), active_, ctx);
    return {std::move(c.point), {}, c.outcome};
  }

 private:
  SingleAgent agent_;
  std::vector<Criterion> active_;
};

std::unique_ptr<Optimizer> make_optimizer(const RunConfig& cfg, const OptimizerId& id,
                                          const std::shared_ptr<LlmClient>& client,
                                          const PromptTemplates& templates) {
  switch (id.kind) {
    case OptimizerKind::kRandom:
      return std::make_unique<RandomOptimizer>();
    case OptimizerKind::kGpEi:
      return std::make_unique<GpOptimizer>(true, cfg.ucb_beta, cfg.acquisition_pool_size);
    case OptimizerKind::kGpUcb:
      return std::make_unique<GpOptimizer>(false, cfg.ucb_beta, cfg.acquisition_pool_size);
    case OptimizerKind::kSingleAgent:
      return std::make_unique<SingleAgentOptimizer>(client, templates, cfg.criteria);
    case OptimizerKind::kMultiAgent:
      return std::make_unique<MultiAgentOptimizer>(
          std::make_unique<LlmStrategy>(client, templates),
          std::make_unique<LlmGeneration>(client, templates, cfg.pool_size, cfg.cluster_k),
          cfg.criteria, true);
    case OptimizerKind::kMultiAgentScripted:
      return std::make_unique<MultiAgentOptimizer>(
          scripted_strategy(id.schedule),
          std::make_unique<PoolGeneration>(cfg.pool_size, cfg.cluster_k), cfg.criteria,
          false);
  }
  throw ConfigError("unresolvable optimizer '" + cfg.optimizer + "'");
}

std::int64_t ms_since(std::chrono::steady_clock::time_point start, bool enabled) {
  if (!enabled) return 0;
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - start)
      .count();
}

void flush_run(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_run_csv(dir / run_csv_name(r.repetition), r.spec.dim, r.records);
  write_transcript(dir / run_transcript_name(r.repetition),
                   TranscriptFile{r.config_hash, r.repetition, r.transcripts});
}

}  // namespace

std::string run_csv_name(std::size_t repetition) {
  return "run_" + std::to_string(repetition) + ".csv";
}

std::string run_transcript_name(std::size_t repetition) {
  return "run_" + std::to_string(repetition) + ".transcript.txt";
}

RunResult run_optimization(const RunConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const OptimizerId id = parse_optimizer(cfg.optimizer);
  const PromptTemplates templates = load_run_templates(cfg);

  RunResult result;
  result.config = cfg;
  result.config_hash = config_hash(cfg);
  result.repetition = options.repetition;
  result.run_seed = cfg.seed + options.repetition;

  const Benchmark bench = make_benchmark(cfg.benchmark, cfg.benchmark_seed, cfg.dim);
  result.spec = bench.spec;
  const ProblemSpec& spec = bench.spec;
  auto evaluate = [&](const Point& x) {
    ++result.evaluations;
    return bench.evaluate(x);
  };

  std::shared_ptr<LlmClient> client = options.client;
  if (id.uses_llm() && !client) client = make_client(cfg);

  History history(spec);
  const std::size_t max_entries =
      cfg.history_max_entries == 0 ? cfg.budget : cfg.history_max_entries;

  auto log_row = [&](std::int64_t ms, std::optional<WeightVector> weights,
                     std::optional<ParseOutcome> outcome) {
    const Evaluation& e = history.evaluations().back();
    RunRecord rec;
    rec.iteration = e.iteration;
    rec.point = e.point;
    rec.value = e.value;
    rec.best_so_far = best_so_far(history).value;
    rec.weights = std::move(weights);
    rec.parse_outcome = outcome;
    rec.wall_time_ms = ms;
    result.records.push_back(std::move(rec));
  };

  try {
    std::unique_ptr<Optimizer> optimizer = make_optimizer(cfg, id, client, templates);

    for (std::size_t i = 1; i <= cfg.n_init; ++i) {
      const auto start = std::chrono::steady_clock::now();
      Point x = uniform_point(spec, derive_seed(result.run_seed, "init", i));
      const double y = evaluate(x);
      history.append(std::move(x), y);
      log_row(ms_since(start, cfg.timing), std::nullopt, std::nullopt);
    }

    for (std::size_t t = cfg.n_init + 1; t <= cfg.budget; ++t) {
      const auto start = std::chrono::steady_clock::now();
      StepContext ctx;
      ctx.iteration = t;
      ctx.budget = cfg.budget;
      ctx.seed = derive_seed(result.run_seed, "iteration", t);
      ctx.transcripts = &result.transcripts;
      ctx.record_timing = cfg.timing;
      ctx.history_max_entries = max_entries;
      Proposal p = optimizer->propose(history, ctx);
      Point x = clamp_point(p.point, spec);
      const double y = evaluate(x);
      history.append(std::move(x), y);
      log_row(ms_since(start, cfg.timing), std::move(p.weights), p.outcome);
    }
  } catch (...) {
    if (options.output_dir) {
      if (!history.empty()) result.best = best_so_far(history);
      flush_run(result, *options.output_dir);
    }
    throw;
  }

  result.best = best_so_far(history);
  if (options.output_dir) flush_run(result, *options.output_dir);
  return result;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_run_csv(std::ostream& out, std::size_t dim, const std::vector<RunRecord>& records) {
  out << "iteration";
  for (std::size_t j = 1; j <= dim; ++j) out << ",x_" << j;
  out << ",y,best_so_far";
  for (Criterion c : kAllCriteria) out << ",w_" << criterion_name(c);
  out << ",parse_outcome,wall_time_ms\n";
  for (const RunRecord& r : records) {
    out << r.iteration;
    for (double v : r.point) out << ',' << fmt(v);
    out << ',' << fmt(r.value) << ',' << fmt(r.best_so_far);
    for (Criterion c : kAllCriteria) {
      out << ',';
      if (r.weights) out << fmt(r.weights->weight(c));
    }
    out << ',';
    if (r.parse_outcome) out << to_string(*r.parse_outcome);
    out << ',' << r.wall_time_ms << '\n';
  }
}

void write_run_csv(const std::filesystem::path& path, std::size_t dim,
                   const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot write " + path.string());
  write_run_csv(out, dim, records);
  if (!out) throw FileError("failed writing " + path.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool to_double(const std::string& s, double& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

RunTable read_run_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read " + path.string());
  auto fail = [&](std::size_t line, const std::string& what) -> FileError {
    return FileError(path.string() + ":" + std::to_string(line) + ": " + what);
  };
  std::string line;
  if (!std::getline(in, line)) throw fail(1, "empty file");
  const std::vector<std::string> header = split_csv_line(line);
  // iteration, x_1..x_d, y, best_so_far, 4 weights, parse_outcome, wall_time_ms
  if (header.size() < 10 || header.front() != "iteration" || header.back() != "wall_time_ms") {
    throw fail(1, "not a run CSV header");
  }
  RunTable table;
  table.dim = header.size() - 9;
  for (std::size_t j = 0; j < table.dim; ++j) {
    if (header[1 + j] != "x_" + std::to_string(j + 1)) throw fail(1, "unexpected column " + header[1 + j]);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != header.size()) throw fail(line_no, "wrong number of fields");
    RunRecord r;
    double v = 0.0;
    if (!to_double(f[0], v)) throw fail(line_no, "bad iteration");
    r.iteration = static_cast<std::size_t>(v);
    r.point.resize(table.dim);
    for (std::size_t j = 0; j < table.dim; ++j) {
      if (!to_double(f[1 + j], r.point[j])) throw fail(line_no, "bad coordinate");
    }
    std::size_t k = 1 + table.dim;
    if (!to_double(f[k++], r.value) || !to_double(f[k++], r.best_so_far)) {
      throw fail(line_no, "bad objective value");
    }
    std::array<double, 4> w{};
    std::size_t present = 0;
    for (std::size_t c = 0; c < 4; ++c, ++k) {
      if (f[k].empty()) continue;
      if (!to_double(f[k], w[c])) throw fail(line_no, "bad weight");
      ++present;
    }
    if (present == 4) {
      std::vector<Criterion> active;
      std::vector<double> raw;
      for (Criterion c : kAllCriteria) {
        active.push_back(c);
        raw.push_back(w[static_cast<std::size_t>(c)]);
      }
      try {
        r.weights = WeightVector::normalized(active, raw);
      } catch (const ValidationError& e) {
        throw fail(line_no, e.what());
      }
    } else if (present != 0) {
      throw fail(line_no, "partial weight columns");
    }
    if (!f[k].empty()) {
      try {
        r.parse_outcome = parse_outcome_from_string(f[k]);
      } catch (const ValidationError& e) {
        throw fail(line_no, e.what());
      }
    }
    ++k;
    if (!to_double(f[k], v)) throw fail(line_no, "bad wall_time_ms");
    r.wall_time_ms = static_cast<std::int64_t>(v);
    table.records.push_back(std::move(r));
  }
  return table;
}

std::size_t SuiteSummary::succeeded() const {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const RunStatus& s) { return s.ok; }));
}

std::size_t SuiteSummary::failed() const { return runs.size() - succeeded(); }

IterationSummary summarize(std::vector<double> values) {
  IterationSummary s;
  s.runs = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  s.median = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  if (n == 1) {
    s.q25 = s.q75 = values[0];
    return s;
  }
  // Inclusive method: positions i*(n-1)/4 interpolated linearly.
  auto quartile = [&](std::size_t i) {
    const std::size_t m = n - 1;
    const std::size_t j = i * m / 4;
    const std::size_t delta = i * m - j * 4;
    if (delta == 0) return values[j];
    return (values[j] * static_cast<double>(4 - delta) +
            values[j + 1] * static_cast<double>(delta)) / 4.0;
  };
  s.q25 = quartile(1);
  s.q75 = quartile(3);
  return s;
}

std::vector<IterationSummary> summarize_runs(const std::vector<std::vector<RunRecord>>& runs) {
  std::size_t longest = 0;
  for (const auto& r : runs) longest = std::max(longest, r.size());
  std::vector<IterationSummary> out;
  for (std::size_t i = 0; i < longest; ++i) {
    std::vector<double> values;
    for (const auto& r : runs) {
      if (i < r.size()) values.push_back(r[i].best_so_far);
    }
    IterationSummary s = summarize(std::move(values));
    s.iteration = i + 1;
    out.push_back(s);
  }
  return out;
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<IterationSummary>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot write " + path.string());
  out << "iteration,runs,median_best,q25_best,q75_best\n";
  for (const IterationSummary& s : rows) {
    out << s.iteration << ',' << s.runs << ',' << fmt(s.median) << ',' << fmt(s.q25) << ','
        << fmt(s.q75) << '\n';
  }
}

void write_runs_csv(const std::filesystem::path& path, const std::vector<RunStatus>& runs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot write " + path.string());
  out << "repetition,seed,status,final_best,message\n";
  for (const RunStatus& s : runs) {
    std::string message = s.message;
    std::replace(message.begin(), message.end(), ',', ';');
    std::replace(message.begin(), message.end(), '\n', ' ');
    out << s.repetition << ',' << s.seed << ',' << (s.ok ? "ok" : "failed") << ','
        << (s.ok ? fmt(s.final_best) : "") << ',' << message << '\n';
  }
}

SuiteSummary run_suite(const RunConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  const std::size_t reps = cfg.repetitions;
  std::vector<std::vector<RunRecord>> records(reps);
  SuiteSummary summary;
  summary.runs.resize(reps);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      RunStatus& status = summary.runs[r];
      status.repetition = r;
      status.seed = cfg.seed + r;
      try {
        RunOptions opts;
        opts.repetition = r;
        opts.output_dir = cfg.output_dir;
        RunResult res = run_optimization(cfg, opts);
        status.ok = true;
        status.final_best = res.best.value;
        records[r] = std::move(res.records);
      } catch (const std::exception& e) {
        status.ok = false;
        status.message = e.what();
      }
    }
  };
  const std::size_t threads = std::min(cfg.jobs, reps);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::vector<std::vector<RunRecord>> ok_runs;
  for (std::size_t r = 0; r < reps; ++r) {
    if (summary.runs[r].ok) ok_runs.push_back(std::move(records[r]));
  }
  summary.iterations = summarize_runs(ok_runs);
  write_summary_csv(cfg.output_dir / "summary.csv", summary.iterations);
  write_runs_csv(cfg.output_dir / "runs.csv", summary.runs);
  return summary;
}

RunResult replay(const std::filesystem::path& transcript, const RunConfig& cfg,
                 const std::optional<std::filesystem::path>& output_dir) {
  const TranscriptFile file = read_transcript(transcript);
  const std::string expected = config_hash(cfg);
  if (file.config_hash != expected) {
    throw ReplayError("config hash mismatch: transcript " + transcript.string() +
                      " was recorded under " + file.config_hash + ", this config hashes to " +
                      expected);
  }
  std::shared_ptr<MockLlmClient> client = make_replay_client(file);
  RunOptions opts;
  opts.client = client;
  opts.repetition = file.repetition;
  opts.output_dir = output_dir;
  RunResult result = run_optimization(cfg, opts);
  if (client->remaining() != 0) {
    throw ReplayError("replay of " + transcript.string() + " left " +
                      std::to_string(client->remaining()) + " recorded responses unused");
  }
  return result;
}

}  // namespace policyscope
