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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Usage: acceptance [configs-dir]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "policyscope/agents.hpp"
#include "policyscope/benchmarks.hpp"
#include "policyscope/errors.hpp"
#include "policyscope/harness.hpp"
#include "policyscope/metrics.hpp"
#include "policyscope/prompts.hpp"
#include "policyscope/random.hpp"
#include "policyscope/surrogate.hpp"

using namespace policyscope;
namespace fs = std::filesystem;

namespace {

fs::path g_configs = "configs";

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("policyscope_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

RunConfig base_config(const std::string& optimizer, std::uint64_t seed) {
  RunConfig c;
  c.benchmark = "rosenbrock";
  c.dim = 2;
  c.budget = 30;
  c.optimizer = optimizer;
  c.seed = seed;
  c.timing = false;
  return c;
}

RunConfig mock_config() {
  RunConfig c = base_config("multi_agent", 0);
  c.client = "mock";
  c.mock_script = g_configs / "mock_multi_agent.json";
  return c;
}

Outcome gp_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t d = 1 + static_cast<std::size_t>(inst % 3);
    const std::size_t n = 1 + rng.uniform_int(1, 9);
    std::vector<Point> x(n, Point(d));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (double& v : x[i]) v = rng.uniform();
      y[i] = rng.normal() * 5.0;
    }
    const GpModel m = gp_fit(x, y);
    for (int p = 0; p < 10; ++p) {
      Point probe(d);
      for (double& v : probe) v = rng.uniform();
      const auto o = oracle::gp_posterior(x, y, m.lengthscale, m.noise, probe);
      const GpPrediction g = gp_predict(m, probe);
      worst = std::max({worst, std::abs(g.mean - o.mean), std::abs(g.raw_variance - o.variance)});
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 5.0, fmt("max |diff| %.3g, %.2f s", worst, secs)};
}

Outcome acquisition_sanity() {
  Rng rng(202);
  std::size_t negative = 0, zero_sigma_mismatch = 0;
  for (int i = 0; i < 10000; ++i) {
    const double mu = rng.normal() * 10.0;
    const double sd = std::abs(rng.normal()) * std::pow(10.0, rng.uniform(-6, 2));
    const double yb = rng.normal() * 10.0;
    if (expected_improvement(mu, sd, yb) < 0.0) ++negative;
    if (expected_improvement(mu, 0.0, yb) != std::max(0.0, mu - yb)) ++zero_sigma_mismatch;
  }
  const double at_zero = expected_improvement(0.7, 1.0, 0.7);
  const bool ok = negative == 0 && zero_sigma_mismatch == 0 && std::abs(at_zero - 0.3989) <= 1e-4;
  return {ok, fmt("negatives %.0f, sigma=0 mismatches %.0f, EI(z=0)=%.6f", negative,
                  zero_sigma_mismatch, at_zero)};
}

Outcome baseline_beats_random() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> gp, rnd;
  int wins = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    rnd.push_back(run_optimization(base_config("random", s)).best.value);
    gp.push_back(run_optimization(base_config("gp_ei", s)).best.value);
    if (gp.back() < rnd.back()) ++wins;
  }
  const double secs = seconds_since(t0);
  const double mg = median(gp), mr = median(rnd);
  return {mg < mr && wins >= 8 && secs < 60.0,
          fmt("median gp_ei %.4g vs random %.4g", mg, mr) +
              fmt(", wins %.0f/10, %.1f s", wins, secs)};
}

Outcome metric_ranges() {
  Rng rng(303);
  std::size_t out_of_range = 0;
  for (int inst = 0; inst < 10000; ++inst) {
    const std::size_t d = 1 + rng.uniform_int(0, 3);
    ProblemSpec s;
    s.dim = d;
    for (std::size_t j = 0; j < d; ++j) {
      const double lo = rng.uniform(-10, 5);
      s.bounds.push_back({lo, lo + rng.uniform(0.1, 20)});
    }
    s.kinds.assign(d, VarKind::kContinuous);
    s.sense = inst % 2 ? Sense::kMinimize : Sense::kMaximize;
    History h(s);
    const std::size_t n = 1 + rng.uniform_int(0, 9);
    for (std::size_t i = 0; i < n; ++i) {
      Point u(d);
      for (double& v : u) v = rng.uniform();
      // Occasional duplicates and constant values exercise the edge branches.
      if (i > 0 && rng.uniform() < 0.1) u = normalize_point(h[i - 1].point, s);
      h.append(denormalize_point(u, s), rng.uniform() < 0.1 ? 1.0 : rng.normal() * 100);
    }
    const ClusterModel m = fit_clusters(h, 3, inst);
    Point u(d);
    for (double& v : u) v = rng.uniform();
    if (rng.uniform() < 0.1) u = normalize_point(h[0].point, s);
    for (double v : CandidateScorer(h, m).all(u)) {
      if (!(v >= 0.0 && v <= 1.0)) ++out_of_range;
    }
  }

  std::size_t changed = 0;
  const std::vector<Criterion> all(kAllCriteria.begin(), kAllCriteria.end());
  for (int inst = 0; inst < 100; ++inst) {
    const Benchmark b = make_benchmark(inst % 3 == 0 ? "hpt" : inst % 3 == 1 ? "robot_push" : "rosenbrock", inst);
    History h(b.spec);
    const std::size_t n = 3 + rng.uniform_int(0, 7);
    for (std::size_t i = 0; i < n; ++i) {
      const Point x = uniform_point(b.spec, rng.next_u64());
      h.append(x, b.evaluate(x));
    }
    std::vector<double> raw(4);
    for (double& r : raw) r = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    raw[static_cast<std::size_t>(rng.uniform_int(0, 3))] += 0.1;
    StepContext ctx;
    ctx.iteration = n + 1;
    ctx.budget = 30;
    ctx.seed = rng.next_u64();
    PoolGeneration gen(256);
    const Point base = gen.propose_candidate(h, WeightVector::normalized(all, raw), b.spec, ctx).point;
    for (double c : {0.1, 3.0, 100.0}) {
      std::vector<double> scaled = raw;
      for (double& r : scaled) r *= c;
      if (gen.propose_candidate(h, WeightVector::normalized(all, scaled), b.spec, ctx).point != base) {
        ++changed;
      }
    }
  }
  return {out_of_range == 0 && changed == 0,
          fmt("out-of-range scores %.0f / 40000, argmax changes %.0f / 300", out_of_range, changed)};
}

double min_pairwise(const std::vector<RunRecord>& records) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      best = std::min(best, distance(records[i].point, records[j].point));
    }
  }
  return best;
}

Outcome exploration_behavior() {
  int wins = 0;
  std::vector<double> explore, uniform;
  for (std::uint64_t s = 0; s < 10; ++s) {
    uniform.push_back(min_pairwise(run_optimization(base_config("random", s)).records));
    explore.push_back(min_pairwise(
        run_optimization(base_config("multi_agent_scripted:pure_explore_informativeness", s)).records));
    if (explore.back() > uniform.back()) ++wins;
  }
  return {wins >= 8, fmt("wins %.0f/10, median min distance %.4f vs %.4f", wins, median(explore),
                         median(uniform))};
}

Outcome deterministic_end_to_end() {
  const RunConfig c = mock_config();
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const RunResult r1 = run_optimization(c, {nullptr, 0, a});
  const RunResult r2 = run_optimization(c, {nullptr, 0, b});
  const bool same_csv = slurp(a / "run_0.csv") == slurp(b / "run_0.csv");
  const bool same_tx = slurp(a / "run_0.transcript.txt") == slurp(b / "run_0.transcript.txt");
  const std::size_t script = load_mock_script(c.mock_script).size();
  const bool ok = same_csv && same_tx && r1.evaluations == 30 && r2.evaluations == 30 &&
                  r1.transcripts.size() == 54 && script == 54;
  return {ok, std::string("csv ") + (same_csv ? "identical" : "differ") + ", transcripts " +
                  (same_tx ? "identical" : "differ") + fmt(", evaluations %.0f, calls %.0f",
                                                           r1.evaluations, r1.transcripts.size())};
}

Outcome parser_robustness() {
  ProblemSpec s;
  s.dim = 2;
  s.bounds = {{-2, 2}, {3, 9}};
  s.kinds = {VarKind::kContinuous, VarKind::kInteger};
  const std::vector<Criterion> all(kAllCriteria.begin(), kAllCriteria.end());

  std::vector<std::string> corpus = {
      "", " ", "\n\n", "** weights **", "## parameters ##",
      "** weights ** ** weights ** ** weights **",
      "** weights ** ** weights ** exploitation: 1 ** weights **",
      "## parameters ## ## parameters ## 1, 2 ## parameters ##",
      "** weights ** ## parameters ## 1, 2 ## parameters ## ** weights **",
      "## parameters ## ** weights ** exploitation: 1 ** weights ** ## parameters ##",
      "** weights ** exploitation: high ** weights **", "## parameters ## one, two ## parameters ##",
      "** weights ** {\"exploitation\": [1]} ** weights **", "** weights ** {{{ ** weights **",
      "## parameters ## 1e999, 2 ## parameters ##", "## parameters ## x0=1, x1=2 ## parameters ##",
      "## parameters ## x1=, x2= ## parameters ##", "** weights ** : ** weights **"};
  const std::vector<std::string> pieces = {
      "** weights **", "## parameters ##", "exploitation", "informativeness", "diversity",
      "representativeness", ":", "=", ",", ";", "\n", " ", "{", "}", "[", "]", "\"", "0", "1",
      "-3.5", "1e308", "1e400", "nan", "inf", "0x1p3", "x1", "x2", "x3", "abc", "**", "##", "\t"};
  Rng rng(707);
  while (corpus.size() < 1000) {
    std::string text;
    const auto n = rng.uniform_int(0, 16);
    for (std::int64_t j = 0; j < n; ++j) {
      text += pieces[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pieces.size()) - 1))];
    }
    corpus.push_back(text);
  }

  std::size_t unexpected = 0, bad_results = 0;
  for (const std::string& text : corpus) {
    try {
      const WeightVector w = parse_weights(text, all);
      double sum = 0.0;
      for (double v : w.all()) sum += v;
      if (std::abs(sum - 1.0) > 1e-9) ++bad_results;
    } catch (const ParseError&) {
    } catch (...) {
      ++unexpected;
    }
    try {
      check_point(parse_parameters(text, s), s);
    } catch (const ParseError&) {
    } catch (...) {
      ++unexpected;
    }
  }

  std::size_t good_failures = 0;
  auto expect = [&](bool cond) {
    if (!cond) ++good_failures;
  };
  try {
    expect(parse_weights("** weights ** exploitation: 2, informativeness: 1, diversity: 1, "
                         "representativeness: 0 ** weights **", all)
               .all() == std::array<double, 4>{0.5, 0.25, 0.25, 0.0});
    expect(parse_weights(R"(** weights ** {"exploitation": 1, "diversity": 1} ** weights **)", all)
               .all() == std::array<double, 4>{0.5, 0.0, 0.5, 0.0});
    const std::vector<Criterion> paired{Criterion::kExploitation, Criterion::kDiversity};
    const auto p = parse_weights("** weights ** exploitation: -1, diversity: 1 ** weights **", paired);
    expect(p.weight(Criterion::kExploitation) == 0.0 && p.weight(Criterion::kDiversity) == 1.0);
    ProblemSpec box = s;
    box.bounds[1] = {-2, 2};
    box.kinds[1] = VarKind::kContinuous;
    expect(parse_parameters("## parameters ## 1.5, -0.5 ## parameters ##", box) == Point{1.5, -0.5});
    expect(parse_parameters("## parameters ## 0.1, 0.2 ## parameters ##", box) == Point{0.1, 0.2});
    expect(parse_parameters("## parameters ## 3.7, 0 ## parameters ##", box) == Point{2.0, 0.0});
    expect(parse_parameters("## parameters ## x2=5, x1=3 ## parameters ##", s) == Point{2.0, 5.0});
    expect(parse_parameters("## parameters ## x1=2.4, x2=7 ## parameters ##", s) == Point{2.0, 7.0});
    try {
      parse_parameters("## parameters ## 1, 2, 3 ## parameters ##", box);
      ++good_failures;
    } catch (const ParseError&) {
    }
  } catch (...) {
    ++good_failures;
  }
  return {unexpected == 0 && bad_results == 0 && good_failures == 0,
          fmt("%.0f cases, unexpected exceptions %.0f, documented examples failed %.0f",
              corpus.size(), unexpected, good_failures)};
}

std::size_t count_definitions(const std::string& prompt) {
  std::size_t n = 0;
  for (Criterion c : kAllCriteria) {
    if (prompt.find("\n- " + std::string(criterion_name(c)) + ":") != std::string::npos) ++n;
  }
  return n;
}

Outcome paired_mode() {
  RunConfig c = mock_config();
  c.criteria = parse_criteria_list("exploitation,diversity");
  const fs::path dir = scratch("paired");
  const RunResult r = run_optimization(c, {nullptr, 0, dir});
  const RunTable t = read_run_csv(dir / run_csv_name(0));
  std::size_t nonzero = 0, weighted_rows = 0;
  for (const RunRecord& rec : t.records) {
    if (!rec.weights) continue;
    ++weighted_rows;
    if (rec.weights->weight(Criterion::kInformativeness) != 0.0 ||
        rec.weights->weight(Criterion::kRepresentativeness) != 0.0) {
      ++nonzero;
    }
  }
  std::size_t wrong_prompts = 0;
  for (const AgentTranscript& tx : r.transcripts) {
    if (count_definitions(tx.prompt) != 2) ++wrong_prompts;
  }
  return {nonzero == 0 && weighted_rows == 27 && wrong_prompts == 0 && !r.transcripts.empty(),
          fmt("rows with inactive weight %.0f / %.0f, prompts without exactly two definitions %.0f",
              nonzero, weighted_rows, wrong_prompts)};
}

Outcome kmeans_brute_force() {
  Rng rng(909);
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 1 + rng.uniform_int(0, 7);
    const std::size_t k = 1 + rng.uniform_int(0, 2);
    const std::size_t d = 1 + rng.uniform_int(0, 2);
    std::vector<Point> pts(n, Point(d));
    for (auto& p : pts)
      for (double& v : p) v = rng.uniform();
    const double lloyd_wcss = kmeans(pts, k, inst).wcss_trace.back();
    const double best = oracle::best_partition_wcss(pts, std::min(k, n));
    const double diff = std::abs(lloyd_wcss - best);
    worst = std::max(worst, diff);
    if (diff > 1e-9 * std::max(1.0, best)) ++mismatches;
  }
  return {mismatches == 0, fmt("mismatches %.0f / 50, max |diff| %.3g", mismatches, worst)};
}

Outcome replay_fidelity() {
  RunConfig c = mock_config();
  c.repetitions = 3;
  c.output_dir = scratch("replay_record");
  const SuiteSummary s = run_suite(c);
  const fs::path replayed = scratch("replay_out");
  std::size_t files = 0, differing = 0;
  for (std::size_t r = 0; r < c.repetitions; ++r) {
    replay(c.output_dir / run_transcript_name(r), c, replayed);
    ++files;
    if (slurp(c.output_dir / run_csv_name(r)) != slurp(replayed / run_csv_name(r))) ++differing;
  }
  RunConfig altered = c;
  altered.budget = 25;
  bool hash_error = false;
  try {
    replay(c.output_dir / run_transcript_name(0), altered);
  } catch (const ReplayError& e) {
    hash_error = std::string(e.what()).find("config hash") != std::string::npos;
  }
  return {s.succeeded() == 3 && differing == 0 && hash_error,
          fmt("%.0f CSVs compared, %.0f differ", files, differing) +
              (hash_error ? ", altered budget rejected by config hash"
                          : ", altered budget NOT rejected")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_configs = argv[1];
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"GP posterior matches dense solve", gp_oracle},
      {"acquisition sanity", acquisition_sanity},
      {"gp_ei beats random on rosenbrock", baseline_beats_random},
      {"metric range and argmax scale invariance", metric_ranges},
      {"informativeness policy spreads points", exploration_behavior},
      {"deterministic mock multi-agent run", deterministic_end_to_end},
      {"parser robustness", parser_robustness},
      {"paired-metric mode", paired_mode},
      {"k-means matches exhaustive optimum", kmeans_brute_force},
      {"replay fidelity", replay_fidelity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
