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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "policyscope/core.hpp"

namespace policyscope {

inline constexpr std::string_view kWeightsDelimiter = "** weights **";
inline constexpr std::string_view kParametersDelimiter = "## parameters ##";

using SubstitutionMap = std::map<std::string, std::string, std::less<>>;

// Ordered named sections with {{placeholder}} markers. The
// `system_preamble` section becomes the system message; every other section
// is joined, in order, into the user message.
struct PromptTemplate {
  std::vector<std::pair<std::string, std::string>> sections;

  bool has_section(std::string_view name) const;
};

// Parses `[[section: name]]` headed text.
PromptTemplate parse_template(std::string_view text);

// Fixed prompt wording for one run.
struct PromptTemplates {
  PromptTemplate strategy;
  PromptTemplate generation;
  PromptTemplate single;
  // Definition paragraph per criterion, canonical order.
  std::array<std::string, 4> metric_definitions;
  // Hash of all template text; part of the run config hash.
  std::uint64_t fingerprint = 0;

  // The wording shipped in templates/ and compiled into the library.
  static const PromptTemplates& builtin();
  // Loads strategy.txt, generation.txt, single.txt and metrics.txt from a
  // directory. Throws FileError when a file is missing.
  static PromptTemplates load(const std::filesystem::path& dir);
  static PromptTemplates from_files(const std::map<std::string, std::string>& files);
};

struct RenderedPrompt {
  std::string system;
  std::string user;

  bool operator==(const RenderedPrompt&) const = default;
};

// Replaces every {{name}}. Throws RenderError naming the first placeholder
// missing from the map, or a malformed marker.
std::string render_text(std::string_view text, const SubstitutionMap& values);
RenderedPrompt render(const PromptTemplate& tpl, const SubstitutionMap& values);

inline constexpr std::size_t kDefaultHistoryEntries = 30;

// One line per evaluation, `iter=<i> x=(<v1>, ..., <vd>) y=<value>` with 6
// significant digits, chronological. When the history is longer than
// max_entries, the oldest entries are folded into one leading summary line.
std::string serialize_history(const History& h,
                              std::size_t max_entries = kDefaultHistoryEntries);

std::string format_sig6(double v);

// Definition paragraphs for the active criteria, canonical order. Throws
// ValidationError on an empty set.
std::string metric_definitions_text(std::span<const Criterion> active);
std::string metric_definitions_text(const PromptTemplates& templates,
                                    std::span<const Criterion> active);

// `x<j>: <kind>, bounds [lo, hi]` per dimension.
std::string variables_text(const ProblemSpec& spec);
std::string summary_text(const History& h, const StagnationSummary& s);
// `<name>: <weight>` per active criterion with 6 decimals.
std::string weights_block_text(const WeightVector& w);
// Canonical delimited form accepted back by parse_weights.
std::string serialize_weights(const WeightVector& w);

struct PromptInputs {
  const History* history = nullptr;
  StagnationSummary summary;
  std::size_t budget = 0;
  std::size_t max_entries = kDefaultHistoryEntries;
};

RenderedPrompt render_strategy_prompt(const PromptTemplates& templates,
                                      const PromptInputs& in,
                                      std::span<const Criterion> active);
RenderedPrompt render_generation_prompt(const PromptTemplates& templates,
                                        const PromptInputs& in,
                                        const WeightVector& weights);
RenderedPrompt render_single_prompt(const PromptTemplates& templates,
                                    const PromptInputs& in,
                                    std::span<const Criterion> active);

// Text between the first pair of delimiters. Throws ParseError when the pair
// is missing.
std::string_view extract_delimited(std::string_view text, std::string_view delimiter);

// Weights from the first `** weights **` block, either `name: value` entries
// or a JSON object. Missing active criteria count as 0, negatives are clamped
// to 0, the rest normalized. Names outside `active` are ignored. Throws
// ParseError with a description suitable for a corrective re-ask.
WeightVector parse_weights(std::string_view text, std::span<const Criterion> active);

// Point from the first `## parameters ##` block: comma/whitespace separated
// numbers or `x<i>=<v>` pairs (1-indexed). Exactly dim values are required;
// the result is clamped and integer dims rounded. Throws ParseError.
Point parse_parameters(std::string_view text, const ProblemSpec& spec);

}  // namespace policyscope
