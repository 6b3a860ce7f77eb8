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

#include "policyscope/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "policyscope/errors.hpp"

namespace policyscope {

void ProblemSpec::validate() const {
  if (dim == 0) throw DomainError("problem '" + name + "': dim must be positive");
  if (bounds.size() != dim) {
    throw DomainError("problem '" + name + "': expected " + std::to_string(dim) +
                      " bounds, got " + std::to_string(bounds.size()));
  }
  if (kinds.size() != dim) {
    throw DomainError("problem '" + name + "': expected " + std::to_string(dim) +
                      " variable kinds, got " + std::to_string(kinds.size()));
  }
  for (std::size_t j = 0; j < dim; ++j) {
    const Bound& b = bounds[j];
    if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || !(b.lower < b.upper)) {
      throw DomainError("problem '" + name + "': dimension " + std::to_string(j + 1) +
                        " needs finite lower < upper");
    }
  }
}

std::string_view to_string(Sense sense) {
  return sense == Sense::kMinimize ? "minimize" : "maximize";
}

std::string_view to_string(VarKind kind) {
  return kind == VarKind::kInteger ? "integer" : "continuous";
}

namespace {

void check_arity(std::span<const double> p, const ProblemSpec& spec) {
  if (p.size() != spec.dim) {
    throw DomainError("point has " + std::to_string(p.size()) +
                      " components, problem '" + spec.name + "' has dim " +
                      std::to_string(spec.dim));
  }
}

}  // namespace

Point normalize_point(std::span<const double> p, const ProblemSpec& spec) {
  check_arity(p, spec);
  Point out(spec.dim);
  for (std::size_t j = 0; j < spec.dim; ++j) {
    const Bound& b = spec.bounds[j];
    if (!(p[j] >= b.lower && p[j] <= b.upper)) {
      std::ostringstream msg;
      msg << "dimension " << j + 1 << " value " << p[j] << " outside ["
          << b.lower << ", " << b.upper << "]";
      throw DomainError(msg.str());
    }
    out[j] = (p[j] - b.lower) / (b.upper - b.lower);
  }
  return out;
}

Point denormalize_point(std::span<const double> u, const ProblemSpec& spec) {
  check_arity(u, spec);
  Point out(spec.dim);
  for (std::size_t j = 0; j < spec.dim; ++j) {
    const Bound& b = spec.bounds[j];
    out[j] = b.lower + u[j] * (b.upper - b.lower);
  }
  return out;
}

double round_half_away(double v) { return std::round(v); }

Point clamp_point(std::span<const double> p, const ProblemSpec& spec) {
  check_arity(p, spec);
  Point out(spec.dim);
  for (std::size_t j = 0; j < spec.dim; ++j) {
    const Bound& b = spec.bounds[j];
    double v = std::clamp(p[j], b.lower, b.upper);
    if (spec.kinds[j] == VarKind::kInteger) {
      v = round_half_away(v);
      // Non-integral bounds: rounding may step outside the box.
      if (v > b.upper) v = std::floor(b.upper);
      if (v < b.lower) v = std::ceil(b.lower);
    }
    out[j] = v;
  }
  return out;
}

void check_point(std::span<const double> p, const ProblemSpec& spec) {
  check_arity(p, spec);
  for (std::size_t j = 0; j < spec.dim; ++j) {
    const Bound& b = spec.bounds[j];
    if (!(p[j] >= b.lower && p[j] <= b.upper)) {
      std::ostringstream msg;
      msg << "dimension " << j + 1 << " value " << p[j] << " outside ["
          << b.lower << ", " << b.upper << "]";
      throw DomainError(msg.str());
    }
    if (spec.kinds[j] == VarKind::kInteger && p[j] != std::round(p[j])) {
      std::ostringstream msg;
      msg << "dimension " << j + 1 << " is integer but holds " << p[j];
      throw DomainError(msg.str());
    }
  }
}

History::History(ProblemSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

const Evaluation& History::append(Point point, double value) {
  check_point(point, spec_);
  if (!std::isfinite(value)) {
    throw DomainError("objective value at iteration " +
                      std::to_string(evals_.size() + 1) + " is not finite");
  }
  evals_.push_back(Evaluation{std::move(point), value, evals_.size() + 1});
  return evals_.back();
}

const Evaluation& best_so_far(const History& h) {
  if (h.empty()) throw StateError("best_so_far: history is empty");
  const Sense sense = h.problem().sense;
  std::size_t best = 0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (better(sense, h[i].value, h[best].value)) best = i;
  }
  return h[best];
}

std::vector<double> best_so_far_series(const History& h) {
  std::vector<double> out;
  out.reserve(h.size());
  const Sense sense = h.problem().sense;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double v = h[i].value;
    out.push_back(i == 0 || better(sense, v, out.back()) ? v : out.back());
  }
  return out;
}

StagnationSummary improvement_window(const History& h, std::size_t k) {
  if (h.empty()) throw StateError("improvement_window: history is empty");
  if (k == 0) throw ValidationError("improvement_window: window must be >= 1");
  const std::vector<double> series = best_so_far_series(h);
  const Sense sense = h.problem().sense;
  const std::size_t t = series.size();
  const bool full = t >= k + 1;
  const double now = to_internal(sense, series.back());
  const double then = to_internal(sense, series[full ? t - 1 - k : 0]);
  StagnationSummary s;
  s.window = k;
  s.relative_improvement = std::abs(now - then) / std::max(std::abs(then), 1e-12);
  s.stagnating = full && s.relative_improvement < kStagnationThreshold;
  return s;
}

std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::kExploitation: return "exploitation";
    case Criterion::kInformativeness: return "informativeness";
    case Criterion::kDiversity: return "diversity";
    case Criterion::kRepresentativeness: return "representativeness";
  }
  return "unknown";
}

Criterion parse_criterion(std::string_view name) {
  for (Criterion c : kAllCriteria) {
    if (criterion_name(c) == name) return c;
  }
  throw ValidationError("unknown criterion '" + std::string(name) +
                        "' (expected exploitation, informativeness, diversity "
                        "or representativeness)");
}

std::vector<Criterion> parse_criteria_list(std::string_view csv) {
  std::array<bool, 4> seen{};
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t end = csv.find(',', start);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view item = csv.substr(start, end - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front())))
      item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back())))
      item.remove_suffix(1);
    if (!item.empty()) seen[static_cast<std::size_t>(parse_criterion(item))] = true;
    start = end + 1;
  }
  std::vector<Criterion> out;
  for (Criterion c : kAllCriteria) {
    if (seen[static_cast<std::size_t>(c)]) out.push_back(c);
  }
  if (out.empty()) throw ValidationError("criteria list is empty");
  return out;
}

std::string format_criteria_list(std::span<const Criterion> active) {
  std::string out;
  for (Criterion c : active) {
    if (!out.empty()) out += ',';
    out += criterion_name(c);
  }
  return out;
}

namespace {

std::vector<Criterion> canonical_active(std::span<const Criterion> active) {
  if (active.empty()) throw ValidationError("weight vector needs at least one active criterion");
  std::array<bool, 4> seen{};
  for (Criterion c : active) {
    auto& flag = seen[static_cast<std::size_t>(c)];
    if (flag) {
      throw ValidationError("duplicate criterion '" +
                            std::string(criterion_name(c)) + "'");
    }
    flag = true;
  }
  std::vector<Criterion> out;
  for (Criterion c : kAllCriteria) {
    if (seen[static_cast<std::size_t>(c)]) out.push_back(c);
  }
  return out;
}

}  // namespace

WeightVector WeightVector::normalized(std::span<const Criterion> active,
                                      std::span<const double> raw) {
  if (active.size() != raw.size()) {
    throw ValidationError("weight vector: " + std::to_string(raw.size()) +
                          " values for " + std::to_string(active.size()) +
                          " criteria");
  }
  double sum = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("weights must be finite and nonnegative");
    }
    sum += v;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw ValidationError("weights must have a positive finite sum");
  }
  WeightVector w;
  w.active_ = canonical_active(active);
  for (std::size_t i = 0; i < active.size(); ++i) {
    w.weights_[static_cast<std::size_t>(active[i])] = raw[i] / sum;
  }
  return w;
}

WeightVector WeightVector::uniform(std::span<const Criterion> active) {
  const std::vector<double> ones(active.size(), 1.0);
  return normalized(active, ones);
}

WeightVector WeightVector::unit(std::span<const Criterion> active, Criterion mass_on) {
  std::vector<double> raw(active.size(), 0.0);
  bool found = false;
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i] == mass_on) {
      raw[i] = 1.0;
      found = true;
    }
  }
  if (!found) {
    throw ValidationError("criterion '" + std::string(criterion_name(mass_on)) +
                          "' is not active");
  }
  return normalized(active, raw);
}

bool WeightVector::is_active(Criterion c) const noexcept {
  return std::find(active_.begin(), active_.end(), c) != active_.end();
}

std::string_view to_string(ParseOutcome outcome) {
  switch (outcome) {
    case ParseOutcome::kOk: return "ok";
    case ParseOutcome::kRetried: return "retried";
    case ParseOutcome::kFallback: return "fallback";
  }
  return "ok";
}

ParseOutcome parse_outcome_from_string(std::string_view text) {
  if (text == "ok") return ParseOutcome::kOk;
  if (text == "retried") return ParseOutcome::kRetried;
  if (text == "fallback") return ParseOutcome::kFallback;
  throw ValidationError("unknown parse outcome '" + std::string(text) + "'");
}

ParseOutcome worst_of(ParseOutcome a, ParseOutcome b) {
  return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

}  // namespace policyscope
