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

#include <string>

#include "doctest.h"
#include "policyscope/benchmarks.hpp"
#include "policyscope/errors.hpp"
#include "policyscope/prompts.hpp"
#include "policyscope/random.hpp"

using namespace policyscope;

namespace {

const std::vector<Criterion> kAll(kAllCriteria.begin(), kAllCriteria.end());

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

History rosen_history(std::size_t n) {
  const Benchmark b = rosenbrock(2);
  History h(b.spec);
  Rng rng(4);
  for (std::size_t i = 0; i < n; ++i) {
    Point x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    h.append(x, b.evaluate(x));
  }
  return h;
}

PromptInputs inputs(const History& h) {
  PromptInputs in;
  in.history = &h;
  in.summary = improvement_window(h);
  in.budget = 30;
  return in;
}

}  // namespace

TEST_CASE("template parsing and rendering") {
  const PromptTemplate t = parse_template(
      "[[section: system_preamble]]\nYou help.\n[[section: body]]\nHello {{name}}.\n");
  CHECK(t.has_section("body"));
  const RenderedPrompt r = render(t, {{"name", "world"}});
  CHECK(r.system == "You help.");
  CHECK(r.user == "Hello world.");
  try {
    render(t, {});
    FAIL("expected RenderError");
  } catch (const RenderError& e) {
    CHECK(std::string(e.what()).find("{{name}}") != std::string::npos);
  }
}

TEST_CASE("history serialization") {
  const ProblemSpec spec = rosenbrock(2).spec;
  History empty(spec);
  CHECK(serialize_history(empty) == "No evaluations yet.");
  History one(spec);
  one.append({1, 1}, 0.0);
  CHECK(serialize_history(one) == "iter=1 x=(1.00000, 1.00000) y=0.00000");

  const History h = rosen_history(35);
  const std::string text = serialize_history(h, 30);
  CHECK(count(text, "\n") == 30);
  CHECK(text.rfind("(5 earlier evaluations omitted", 0) == 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i < 5; ++i) {
    if (h[i].value < h[best].value) best = i;
  }
  CHECK(text.find("best among them: iter=" + std::to_string(best + 1) + " ") != std::string::npos);
  CHECK(text.find("iter=6 ") != std::string::npos);
  CHECK(text.find("\niter=5 ") == std::string::npos);
}

TEST_CASE("metric definitions follow the active set") {
  const std::string all = metric_definitions_text(kAll);
  CHECK(count(all, "\n- ") + (all.rfind("- ", 0) == 0) == 4);
  const std::vector<Criterion> paired{Criterion::kDiversity, Criterion::kExploitation};
  const std::string two = metric_definitions_text(paired);
  CHECK(two.rfind("- exploitation:", 0) == 0);
  CHECK(two.find("\n- diversity:") != std::string::npos);
  CHECK(two.find("- informativeness:") == std::string::npos);
  CHECK_THROWS_AS(metric_definitions_text(std::vector<Criterion>{}), ValidationError);
}

TEST_CASE("rendered prompts") {
  const History h = rosen_history(4);
  const auto& tpl = PromptTemplates::builtin();
  const RenderedPrompt a = render_strategy_prompt(tpl, inputs(h), kAll);
  CHECK(a == render_strategy_prompt(tpl, inputs(h), kAll));
  CHECK(a.user.find("bounds") != std::string::npos);
  CHECK(a.user.find("Rosenbrock") == std::string::npos);
  CHECK(a.user.find("rosenbrock") == std::string::npos);
  CHECK(a.user.find("{{") == std::string::npos);

  const auto w = WeightVector::normalized(kAll, std::vector<double>{4, 3, 2, 1});
  const RenderedPrompt g = render_generation_prompt(tpl, inputs(h), w);
  CHECK(g.user.find("exploitation: 0.400000") != std::string::npos);
  CHECK(g.user.find("informativeness: 0.300000") != std::string::npos);
  CHECK(g.user.find("diversity: 0.200000") != std::string::npos);
  CHECK(g.user.find("representativeness: 0.100000") != std::string::npos);
  CHECK(g.user.find(std::string(kParametersDelimiter)) != std::string::npos);

  const RenderedPrompt s = render_single_prompt(tpl, inputs(h), kAll);
  CHECK(s.user.find(std::string(kParametersDelimiter)) != std::string::npos);
  CHECK(s.user.find("{{") == std::string::npos);
}

TEST_CASE("paired prompts mention only the active criteria") {
  const History h = rosen_history(4);
  const std::vector<Criterion> paired{Criterion::kExploitation, Criterion::kDiversity};
  const RenderedPrompt p = render_strategy_prompt(PromptTemplates::builtin(), inputs(h), paired);
  CHECK(count(p.user, "\n- exploitation:") == 1);
  CHECK(count(p.user, "\n- diversity:") == 1);
  CHECK(p.user.find("informativeness") == std::string::npos);
  CHECK(p.user.find("representativeness") == std::string::npos);
}

TEST_CASE("weights parsing good paths") {
  auto w = parse_weights(
      "** weights ** exploitation: 2, informativeness: 1, diversity: 1, representativeness: 0 "
      "** weights **",
      kAll);
  CHECK(w.all() == std::array<double, 4>{0.5, 0.25, 0.25, 0.0});

  w = parse_weights(R"(** weights ** {"exploitation": 1, "diversity": 1} ** weights **)", kAll);
  CHECK(w.all() == std::array<double, 4>{0.5, 0.0, 0.5, 0.0});

  const auto prose = parse_weights(
      "Let me think.\n** weights **\nexploitation: 2\ninformativeness: 1\ndiversity: 1\n"
      "representativeness: 0\n** weights **\nDone.",
      kAll);
  CHECK(prose.all() == std::array<double, 4>{0.5, 0.25, 0.25, 0.0});

  const std::vector<Criterion> paired{Criterion::kDiversity, Criterion::kExploitation};
  w = parse_weights("** weights ** exploitation: -1, diversity: 1 ** weights **", paired);
  CHECK(w.weight(Criterion::kExploitation) == 0.0);
  CHECK(w.weight(Criterion::kDiversity) == 1.0);

  w = parse_weights("** weights **\n- **Exploitation**: 3\n- novelty: 9\n- Diversity = 1\n** weights **",
                    kAll);
  CHECK(w.all() == std::array<double, 4>{0.75, 0.0, 0.25, 0.0});

  const auto round = WeightVector::normalized(kAll, std::vector<double>{0.1, 0.2, 0.3, 0.4});
  CHECK(parse_weights(serialize_weights(round), kAll) == round);
}

TEST_CASE("weights parsing errors") {
  for (const char* bad : {"", "exploitation: 1", "** weights ** exploitation: 1",
                          "** weights **   ** weights **", "** weights ** novelty: 1 ** weights **",
                          "** weights ** exploitation: 0, diversity: 0 ** weights **",
                          "** weights ** exploitation: lots ** weights **",
                          "** weights ** {\"exploitation\": \"1\"} ** weights **",
                          "** weights ** {\"exploitation\": 1 ** weights **"}) {
    CHECK_THROWS_AS(parse_weights(bad, kAll), ParseError);
  }
}

TEST_CASE("parameter parsing") {
  const ProblemSpec s = rosenbrock(2).spec;
  CHECK(parse_parameters("## parameters ## 1.5, -0.5 ## parameters ##", s) == Point{1.5, -0.5});
  CHECK(parse_parameters("## parameters ## 0.1, 0.2 ## parameters ##", s) == Point{0.1, 0.2});
  CHECK(parse_parameters("## parameters ## 3.7 0 ## parameters ##", s) == Point{2.0, 0.0});
  CHECK(parse_parameters("## parameters ## x2=1, x1=-1.5 ## parameters ##", s) == Point{-1.5, 1.0});
  CHECK(parse_parameters("## parameters ##\n[0.5; 0.25]\n## parameters ##", s) == Point{0.5, 0.25});

  ProblemSpec mixed = s;
  mixed.bounds[1] = {3, 9};
  mixed.kinds[1] = VarKind::kInteger;
  CHECK(parse_parameters("## parameters ## x1=2.4, x2=7 ## parameters ##", mixed) == Point{2.0, 7.0});
  CHECK(parse_parameters("## parameters ## x2=5, x1=3 ## parameters ##", mixed) == Point{2.0, 5.0});

  try {
    parse_parameters("## parameters ## 1, 2, 3 ## parameters ##", s);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("expected 2 values, found 3") != std::string::npos);
  }
  for (const char* bad : {"", "1, 2", "## parameters ## 1, 2", "## parameters ## ## parameters ##",
                          "## parameters ## a, b ## parameters ##",
                          "## parameters ## x1=1, x1=2 ## parameters ##",
                          "## parameters ## x3=1, x1=2 ## parameters ##",
                          "## parameters ## x1=1 ## parameters ##",
                          "## parameters ## nan, 1 ## parameters ##"}) {
    CHECK_THROWS_AS(parse_parameters(bad, s), ParseError);
  }
}

TEST_CASE("parsers raise only parse errors on fuzzed text") {
  const ProblemSpec s = rosenbrock(2).spec;
  const std::vector<std::string> pieces = {
      "** weights **", "## parameters ##", "exploitation", "diversity", ":", "=", ",", ";",
      "\n", " ", "{", "}", "\"", "1", "-2.5", "1e309", "nan", "inf", "x1", "x2", "x9", "abc",
      "** weights ** ** weights **", "## parameters ## ## parameters ##", "[", "]", "\0", "*"};
  Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    std::string text;
    const int n = static_cast<int>(rng.uniform_int(0, 14));
    for (int j = 0; j < n; ++j) text += pieces[static_cast<std::size_t>(rng.uniform_int(0, pieces.size() - 1))];
    try {
      const auto w = parse_weights(text, kAll);
      double sum = 0;
      for (double v : w.all()) sum += v;
      CHECK(sum == doctest::Approx(1.0));
    } catch (const ParseError&) {
    }
    try {
      const Point p = parse_parameters(text, s);
      CHECK_NOTHROW(check_point(p, s));
    } catch (const ParseError&) {
    }
  }
}
