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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace policyscope {

using Point = std::vector<double>;

enum class VarKind { kContinuous, kInteger };
enum class Sense { kMaximize, kMinimize };

struct Bound {
  double lower = 0.0;
  double upper = 1.0;
};

// Box-bounded search domain of a black-box problem.
struct ProblemSpec {
  std::string name;
  std::size_t dim = 0;
  std::vector<Bound> bounds;
  std::vector<VarKind> kinds;
  Sense sense = Sense::kMaximize;
  // Free text placed in prompts. Must not leak the problem identity when the
  // problem is meant to be anonymous.
  std::string description;

  // Throws DomainError if dim, bounds and kinds are inconsistent.
  void validate() const;
};

std::string_view to_string(Sense sense);
std::string_view to_string(VarKind kind);

// Maps a raw objective value to the internal maximize-sense value. The
// mapping is its own inverse.
inline double to_internal(Sense sense, double value) {
  return sense == Sense::kMinimize ? -value : value;
}

// True when `a` is strictly better than `b` under `sense`.
inline bool better(Sense sense, double a, double b) {
  return sense == Sense::kMinimize ? a < b : a > b;
}

// Component j maps to (p_j - lower_j) / (upper_j - lower_j). Throws
// DomainError naming the first out-of-bounds dimension.
Point normalize_point(std::span<const double> p, const ProblemSpec& spec);
Point denormalize_point(std::span<const double> u, const ProblemSpec& spec);

// Half-away-from-zero rounding used for integer dimensions.
double round_half_away(double v);

// Clamp into the box and round integer dimensions. This is the single
// repair rule applied to every externally produced candidate.
Point clamp_point(std::span<const double> p, const ProblemSpec& spec);

// Throws DomainError when `p` has the wrong arity, leaves the box or holds a
// non-integral value in an integer dimension.
void check_point(std::span<const double> p, const ProblemSpec& spec);

struct Evaluation {
  Point point;
  double value = 0.0;  // raw objective, in the problem's own sense
  std::size_t iteration = 0;
};

// Append-only record of evaluated points (D_t). Values are stored in the
// problem's own sense; metric and surrogate code reads them through
// internal_value().
class History {
 public:
  explicit History(ProblemSpec spec);

  const ProblemSpec& problem() const noexcept { return spec_; }
  const std::vector<Evaluation>& evaluations() const noexcept { return evals_; }
  std::size_t size() const noexcept { return evals_.size(); }
  bool empty() const noexcept { return evals_.empty(); }
  const Evaluation& operator[](std::size_t i) const { return evals_[i]; }

  // Validates the point and appends it with iteration = size() + 1.
  const Evaluation& append(Point point, double value);

  double internal_value(std::size_t i) const {
    return to_internal(spec_.sense, evals_[i].value);
  }

 private:
  ProblemSpec spec_;
  std::vector<Evaluation> evals_;
};

// Optimal evaluation under the problem's sense; ties go to the earliest
// iteration. Throws StateError on an empty history.
const Evaluation& best_so_far(const History& h);

// Raw best-so-far value after each evaluation.
std::vector<double> best_so_far_series(const History& h);

struct StagnationSummary {
  double relative_improvement = 0.0;
  bool stagnating = false;
  std::size_t window = 0;
};

inline constexpr std::size_t kStagnationWindow = 5;
inline constexpr double kStagnationThreshold = 1e-3;

// Relative change of the internal best-so-far over the last k evaluations.
// With fewer than k + 1 evaluations the relative improvement is measured
// against the first evaluation and stagnation is never reported.
StagnationSummary improvement_window(const History& h,
                                     std::size_t k = kStagnationWindow);

enum class Criterion : std::uint8_t {
  kExploitation = 0,
  kInformativeness = 1,
  kDiversity = 2,
  kRepresentativeness = 3,
};

inline constexpr std::array<Criterion, 4> kAllCriteria = {
    Criterion::kExploitation, Criterion::kInformativeness,
    Criterion::kDiversity, Criterion::kRepresentativeness};

std::string_view criterion_name(Criterion c);
// Throws ValidationError for anything other than the four canonical names.
Criterion parse_criterion(std::string_view name);
// Comma-separated list; result is deduplicated and in canonical order.
std::vector<Criterion> parse_criteria_list(std::string_view csv);
std::string format_criteria_list(std::span<const Criterion> active);

// Normalized nonnegative weights over an ordered set of active criteria.
// Inactive criteria always carry weight zero.
class WeightVector {
 public:
  // Raw weights must be finite and nonnegative with a positive sum; they are
  // divided by that sum. `active` is put into canonical order and must be
  // nonempty and duplicate-free.
  static WeightVector normalized(std::span<const Criterion> active,
                                 std::span<const double> raw);
  static WeightVector uniform(std::span<const Criterion> active);
  static WeightVector unit(std::span<const Criterion> active, Criterion mass_on);

  const std::vector<Criterion>& active() const noexcept { return active_; }
  bool is_active(Criterion c) const noexcept;
  double weight(Criterion c) const noexcept {
    return weights_[static_cast<std::size_t>(c)];
  }
  // Weights of all four criteria in canonical order.
  const std::array<double, 4>& all() const noexcept { return weights_; }

  bool operator==(const WeightVector&) const = default;

 private:
  WeightVector() = default;

  std::vector<Criterion> active_;
  std::array<double, 4> weights_{};
};

enum class ParseOutcome { kOk, kRetried, kFallback };

std::string_view to_string(ParseOutcome outcome);
ParseOutcome parse_outcome_from_string(std::string_view text);
// kOk < kRetried < kFallback.
ParseOutcome worst_of(ParseOutcome a, ParseOutcome b);

// One row of a run log.
struct RunRecord {
  std::size_t iteration = 0;
  Point point;
  double value = 0.0;
  double best_so_far = 0.0;
  std::optional<WeightVector> weights;
  std::optional<ParseOutcome> parse_outcome;
  std::int64_t wall_time_ms = 0;

  bool operator==(const RunRecord&) const = default;
};

}  // namespace policyscope
