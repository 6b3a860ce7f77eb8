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

#include "policyscope/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "policyscope/errors.hpp"
#include "policyscope/random.hpp"
#include "templates_builtin.hpp"

namespace policyscope {

namespace {

constexpr std::string_view kSectionOpen = "[[section:";
constexpr std::string_view kSectionClose = "]]";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Strict number parse: the whole token must be a finite number.
bool parse_number(std::string_view token, double& out) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string format_bound(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string format_point_sig6(std::span<const double> p) {
  std::string out = "(";
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j > 0) out += ", ";
    out += format_sig6(p[j]);
  }
  return out + ")";
}

}  // namespace

bool PromptTemplate::has_section(std::string_view name) const {
  return std::any_of(sections.begin(), sections.end(),
                     [&](const auto& s) { return s.first == name; });
}

PromptTemplate parse_template(std::string_view text) {
  PromptTemplate tpl;
  std::size_t pos = text.find(kSectionOpen);
  while (pos != std::string_view::npos) {
    const std::size_t name_begin = pos + kSectionOpen.size();
    const std::size_t close = text.find(kSectionClose, name_begin);
    if (close == std::string_view::npos) throw RenderError("unterminated section header");
    const std::string name(trim(text.substr(name_begin, close - name_begin)));
    std::size_t body_begin = close + kSectionClose.size();
    if (body_begin < text.size() && text[body_begin] == '\n') ++body_begin;
    const std::size_t next = text.find(kSectionOpen, body_begin);
    std::string_view body =
        text.substr(body_begin, next == std::string_view::npos ? text.size() - body_begin
                                                               : next - body_begin);
    while (!body.empty() && (body.back() == '\n' || body.back() == ' ')) body.remove_suffix(1);
    if (name.empty()) throw RenderError("section header without a name");
    tpl.sections.emplace_back(name, std::string(body));
    pos = next;
  }
  if (tpl.sections.empty()) throw RenderError("template has no [[section: ...]] headers");
  return tpl;
}

PromptTemplates PromptTemplates::from_files(const std::map<std::string, std::string>& files) {
  auto get = [&](const std::string& name) -> const std::string& {
    auto it = files.find(name);
    if (it == files.end()) throw FileError("missing prompt template file " + name);
    return it->second;
  };
  PromptTemplates t;
  t.strategy = parse_template(get("strategy.txt"));
  t.generation = parse_template(get("generation.txt"));
  t.single = parse_template(get("single.txt"));
  const PromptTemplate metrics = parse_template(get("metrics.txt"));
  for (Criterion c : kAllCriteria) {
    bool found = false;
    for (const auto& [name, body] : metrics.sections) {
      if (name == criterion_name(c)) {
        t.metric_definitions[static_cast<std::size_t>(c)] = body;
        found = true;
      }
    }
    if (!found) {
      throw FileError("metrics.txt has no section for '" + std::string(criterion_name(c)) + "'");
    }
  }
  std::uint64_t h = fnv1a64("policyscope-templates");
  for (const char* name : {"strategy.txt", "generation.txt", "single.txt", "metrics.txt"}) {
    h = fnv1a64(name, h);
    h = fnv1a64(get(name), h);
  }
  t.fingerprint = h;
  return t;
}

const PromptTemplates& PromptTemplates::builtin() {
  static const PromptTemplates templates = from_files(builtin_template_files());
  return templates;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const char* name : {"strategy.txt", "generation.txt", "single.txt", "metrics.txt"}) {
    std::ifstream in(dir / name, std::ios::binary);
    if (!in) throw FileError("cannot read prompt template " + (dir / name).string());
    std::ostringstream ss;
    ss << in.rdbuf();
    files.emplace(name, ss.str());
  }
  return from_files(files);
}

std::string render_text(std::string_view text, const SubstitutionMap& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    const std::size_t close = text.find("}}", open + 2);
    if (close == std::string_view::npos) {
      throw RenderError("unterminated placeholder starting at offset " + std::to_string(open));
    }
    const std::string_view name = trim(text.substr(open + 2, close - open - 2));
    auto it = values.find(name);
    if (it == values.end()) {
      throw RenderError("no value for placeholder {{" + std::string(name) + "}}");
    }
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

RenderedPrompt render(const PromptTemplate& tpl, const SubstitutionMap& values) {
  RenderedPrompt p;
  for (const auto& [name, body] : tpl.sections) {
    const std::string text = render_text(body, values);
    if (name == "system_preamble") {
      p.system = text;
      continue;
    }
    if (!p.user.empty()) p.user += "\n\n";
    p.user += text;
  }
  return p;
}

std::string format_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.6g", v);
  return buf;
}

std::string serialize_history(const History& h, std::size_t max_entries) {
  if (h.empty()) return "No evaluations yet.";
  std::string out;
  const std::size_t n = h.size();
  const std::size_t skipped = n > max_entries ? n - max_entries : 0;
  if (skipped > 0) {
    const Sense sense = h.problem().sense;
    std::size_t best = 0;
    for (std::size_t i = 1; i < skipped; ++i) {
      if (better(sense, h[i].value, h[best].value)) best = i;
    }
    out += "(" + std::to_string(skipped) + " earlier evaluations omitted; best among them: iter=" +
           std::to_string(h[best].iteration) + " x=" + format_point_sig6(h[best].point) +
           " y=" + format_sig6(h[best].value) + ")";
  }
  for (std::size_t i = skipped; i < n; ++i) {
    if (!out.empty()) out += '\n';
    out += "iter=" + std::to_string(h[i].iteration) + " x=" +
           format_point_sig6(h[i].point) + " y=" + format_sig6(h[i].value);
  }
  return out;
}

std::string metric_definitions_text(std::span<const Criterion> active) {
  return metric_definitions_text(PromptTemplates::builtin(), active);
}

std::string metric_definitions_text(const PromptTemplates& templates,
                                    std::span<const Criterion> active) {
  if (active.empty()) throw ValidationError("metric definitions need at least one criterion");
  std::array<bool, 4> on{};
  for (Criterion c : active) on[static_cast<std::size_t>(c)] = true;
  std::string out;
  for (Criterion c : kAllCriteria) {
    if (!on[static_cast<std::size_t>(c)]) continue;
    if (!out.empty()) out += '\n';
    out += templates.metric_definitions[static_cast<std::size_t>(c)];
  }
  return out;
}

std::string variables_text(const ProblemSpec& spec) {
  std::string out;
  for (std::size_t j = 0; j < spec.dim; ++j) {
    if (j > 0) out += '\n';
    out += "x" + std::to_string(j + 1) + ": " + std::string(to_string(spec.kinds[j])) +
           ", bounds [" + format_bound(spec.bounds[j].lower) + ", " +
           format_bound(spec.bounds[j].upper) + "]";
  }
  return out;
}

std::string summary_text(const History& h, const StagnationSummary& s) {
  if (h.empty()) return "No evaluations yet.";
  const Evaluation& best = best_so_far(h);
  std::string out = "Best value so far: y=" + format_sig6(best.value) + " at x=" +
                    format_point_sig6(best.point) + " (iter=" +
                    std::to_string(best.iteration) + ").\n";
  if (h.size() < s.window + 1) {
    out += "Too few evaluations to judge the trend over the last " +
           std::to_string(s.window) + " evaluations.";
    return out;
  }
  out += "Relative improvement of the best value over the last " +
         std::to_string(s.window) + " evaluations: " + format_sig6(s.relative_improvement) +
         ".\n";
  out += s.stagnating ? "The search is stagnating." : "The search is still improving.";
  return out;
}

std::string weights_block_text(const WeightVector& w) {
  std::string out;
  for (Criterion c : w.active()) {
    if (!out.empty()) out += '\n';
    out += std::string(criterion_name(c)) + ": " + format_fixed6(w.weight(c));
  }
  return out;
}

std::string serialize_weights(const WeightVector& w) {
  std::string out(kWeightsDelimiter);
  for (Criterion c : w.active()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", w.weight(c));
    out += "\n" + std::string(criterion_name(c)) + ": " + buf;
  }
  out += "\n";
  out += kWeightsDelimiter;
  return out;
}

namespace {

SubstitutionMap common_values(const PromptInputs& in) {
  if (in.history == nullptr) throw RenderError("prompt inputs carry no history");
  const History& h = *in.history;
  const ProblemSpec& spec = h.problem();
  SubstitutionMap m;
  m["description"] = spec.description;
  m["sense"] = std::string(to_string(spec.sense));
  m["dim"] = std::to_string(spec.dim);
  m["variables"] = variables_text(spec);
  m["evaluated"] = std::to_string(h.size());
  m["budget"] = std::to_string(in.budget);
  m["remaining"] = std::to_string(in.budget > h.size() ? in.budget - h.size() : 0);
  m["history"] = serialize_history(h, in.max_entries);
  m["summary"] = summary_text(h, in.summary);
  std::string example;
  for (std::size_t j = 0; j < spec.dim; ++j) {
    if (j > 0) example += ", ";
    example += "<x" + std::to_string(j + 1) + ">";
  }
  m["example_parameters"] = example;
  return m;
}

}  // namespace

RenderedPrompt render_strategy_prompt(const PromptTemplates& templates,
                                      const PromptInputs& in,
                                      std::span<const Criterion> active) {
  SubstitutionMap m = common_values(in);
  m["metric_definitions"] = metric_definitions_text(templates, active);
  m["criteria_list"] = format_criteria_list(active);
  std::string example;
  for (Criterion c : active) {
    if (!example.empty()) example += '\n';
    example += std::string(criterion_name(c)) + ": <weight>";
  }
  m["example_weights"] = example;
  return render(templates.strategy, m);
}

RenderedPrompt render_generation_prompt(const PromptTemplates& templates,
                                        const PromptInputs& in,
                                        const WeightVector& weights) {
  SubstitutionMap m = common_values(in);
  m["metric_definitions"] = metric_definitions_text(templates, weights.active());
  m["weights"] = weights_block_text(weights);
  return render(templates.generation, m);
}

RenderedPrompt render_single_prompt(const PromptTemplates& templates,
                                    const PromptInputs& in,
                                    std::span<const Criterion> active) {
  SubstitutionMap m = common_values(in);
  m["metric_definitions"] = metric_definitions_text(templates, active);
  return render(templates.single, m);
}

std::string_view extract_delimited(std::string_view text, std::string_view delimiter) {
  const std::size_t first = text.find(delimiter);
  if (first == std::string_view::npos) {
    throw ParseError("no '" + std::string(delimiter) + "' marker found; the answer must be "
                     "enclosed between two '" + std::string(delimiter) + "' markers");
  }
  const std::size_t begin = first + delimiter.size();
  const std::size_t second = text.find(delimiter, begin);
  if (second == std::string_view::npos) {
    throw ParseError("only one '" + std::string(delimiter) + "' marker found; the answer "
                     "must be closed by a second '" + std::string(delimiter) + "' marker");
  }
  return text.substr(begin, second - begin);
}

namespace {

std::string clean_key(std::string_view key) {
  key = trim(key);
  auto strip = [&](std::string_view chars) {
    while (!key.empty() && chars.find(key.front()) != std::string_view::npos) key.remove_prefix(1);
    while (!key.empty() && chars.find(key.back()) != std::string_view::npos) key.remove_suffix(1);
  };
  strip(" \t\r\n-*`\"'_");
  return lower(key);
}

std::vector<std::string_view> split_any(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || seps.find(s[i]) != std::string_view::npos) {
      std::string_view item = trim(s.substr(start, i - start));
      if (!item.empty()) out.push_back(item);
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

WeightVector parse_weights(std::string_view text, std::span<const Criterion> active) {
  if (active.empty()) throw ValidationError("parse_weights: no active criteria");
  const std::string_view block = trim(extract_delimited(text, kWeightsDelimiter));
  if (block.empty()) throw ParseError("the weights block is empty");

  std::map<std::string, double> found;
  const std::size_t brace = block.find('{');
  if (brace != std::string_view::npos) {
    const std::size_t close = block.rfind('}');
    if (close == std::string_view::npos || close < brace) {
      throw ParseError("the weights block opens a JSON object but never closes it");
    }
    const auto json = nlohmann::json::parse(block.substr(brace, close - brace + 1), nullptr, false);
    if (json.is_discarded() || !json.is_object()) {
      throw ParseError("the weights block is not a valid JSON object of name: number pairs");
    }
    for (const auto& [key, value] : json.items()) {
      if (!value.is_number()) {
        throw ParseError("the weight for '" + key + "' is not a number");
      }
      found[clean_key(key)] = value.get<double>();
    }
  } else {
    for (std::string_view entry : split_any(block, "\n,;")) {
      const std::size_t sep = entry.find_first_of(":=");
      if (sep == std::string_view::npos) continue;
      const std::string key = clean_key(entry.substr(0, sep));
      double v = 0.0;
      std::string_view raw = trim(entry.substr(sep + 1));
      while (!raw.empty() && (raw.back() == '*' || raw.back() == '`')) raw.remove_suffix(1);
      if (!parse_number(raw, v)) {
        throw ParseError("the weight for '" + key + "' is not a number: '" +
                         std::string(raw.substr(0, 40)) + "'");
      }
      found[key] = v;
    }
  }

  std::vector<double> raw(active.size(), 0.0);
  bool any = false;
  for (std::size_t i = 0; i < active.size(); ++i) {
    auto it = found.find(std::string(criterion_name(active[i])));
    if (it == found.end()) continue;
    if (!std::isfinite(it->second)) {
      throw ParseError("the weight for '" + it->first + "' is not finite");
    }
    raw[i] = std::max(0.0, it->second);
    any = true;
  }
  if (!any) {
    throw ParseError("no weights found for the criteria " + format_criteria_list(active) +
                     "; write one 'name: value' line per criterion");
  }
  double sum = 0.0;
  for (double v : raw) sum += v;
  if (!(sum > 0.0)) throw ParseError("all weights are zero; at least one must be positive");
  if (!std::isfinite(sum)) throw ParseError("the weights are too large to normalize");
  return WeightVector::normalized(active, raw);
}

Point parse_parameters(std::string_view text, const ProblemSpec& spec) {
  std::string block(trim(extract_delimited(text, kParametersDelimiter)));
  for (char& c : block) {
    if (c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}') c = ' ';
  }
  if (trim(block).empty()) throw ParseError("the parameters block is empty");

  const std::size_t dim = spec.dim;
  Point point(dim, 0.0);
  if (block.find_first_of("=:") != std::string::npos) {
    // Close up "x1 = 3" into "x1=3" so pairs survive whitespace splitting.
    std::string compact;
    for (std::size_t i = 0; i < block.size(); ++i) {
      const char c = block[i];
      if (c == '=' || c == ':') {
        while (!compact.empty() && compact.back() == ' ') compact.pop_back();
        compact += '=';
        while (i + 1 < block.size() && block[i + 1] == ' ') ++i;
      } else {
        compact += c;
      }
    }
    std::vector<bool> seen(dim, false);
    std::size_t count = 0;
    for (std::string_view tok : split_any(compact, " \t\r\n,;")) {
      const std::size_t eq = tok.find('=');
      if (eq == std::string_view::npos) {
        throw ParseError("'" + std::string(tok.substr(0, 40)) +
                         "' is not an x<i>=<value> pair");
      }
      std::string key = clean_key(tok.substr(0, eq));
      if (key.size() < 2 || key[0] != 'x') {
        throw ParseError("'" + std::string(tok.substr(0, 40)) +
                         "' does not name a variable x1..x" + std::to_string(dim));
      }
      std::size_t index = 0;
      const auto [p, ec] = std::from_chars(key.data() + 1, key.data() + key.size(), index);
      if (ec != std::errc() || p != key.data() + key.size() || index < 1 || index > dim) {
        throw ParseError("'" + key + "' is not a variable name; expected x1..x" +
                         std::to_string(dim));
      }
      double v = 0.0;
      if (!parse_number(tok.substr(eq + 1), v)) {
        throw ParseError("the value of " + key + " is not a number: '" +
                         std::string(tok.substr(eq + 1, 40)) + "'");
      }
      if (seen[index - 1]) throw ParseError(key + " is given more than once");
      seen[index - 1] = true;
      point[index - 1] = v;
      ++count;
    }
    if (count != dim) {
      throw ParseError("expected " + std::to_string(dim) + " values, found " +
                       std::to_string(count));
    }
  } else {
    const std::vector<std::string_view> tokens = split_any(block, " \t\r\n,;");
    if (tokens.size() != dim) {
      throw ParseError("expected " + std::to_string(dim) + " values, found " +
                       std::to_string(tokens.size()));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      if (!parse_number(tokens[j], point[j])) {
        throw ParseError("'" + std::string(tokens[j].substr(0, 40)) + "' is not a number");
      }
    }
  }
  return clamp_point(point, spec);
}

}  // namespace policyscope
