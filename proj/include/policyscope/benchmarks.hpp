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
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "policyscope/core.hpp"

namespace policyscope {

struct KnownOptimum {
  Point point;
  double value = 0.0;
};

// A deterministic objective over a box. `evaluate` is pure and may be called
// concurrently.
struct Benchmark {
  ProblemSpec spec;
  std::function<double(const Point&)> evaluate;
  std::optional<KnownOptimum> known_optimum;
};

// Rosenbrock valley on [-2, 2]^d, minimized. Throws DomainError for d < 2.
Benchmark rosenbrock(std::size_t d = 2);

// Hidden optimum of the hyperparameter-tuning surrogate.
struct HptParams {
  double lr_center = -3.0;    // optimal log10 learning rate
  int depth_center = 5;       // optimal depth
  double decay_center = -4.0; // log10 weight decay coupled to the lr term
};

HptParams draw_hpt_params(std::uint64_t seed);

// Five-dimensional validation-error surrogate (minimize) over
// (log10_lr, log2_batch, depth, dropout, log10_weight_decay), with integer
// batch and depth.
Benchmark synthetic_hpt(std::uint64_t seed);
Benchmark synthetic_hpt(const HptParams& params);

// Goal location drawn uniformly (by area) from the annulus 3 <= |g| <= 5.
std::array<double, 2> draw_push_goal(std::uint64_t seed);

// Closed-form pushing surrogate (maximize) over (rx, ry, duration). The robot
// starts at (rx, ry) and pushes the object at the origin away from itself.
Benchmark robot_push(std::uint64_t seed);
Benchmark robot_push(const std::array<double, 2>& goal);

// Final object position for a push; exposed for tests.
std::array<double, 2> push_object_final(double rx, double ry, double duration);

inline constexpr double kPushSpeed = 0.2;

struct BenchmarkInfo {
  std::string name;
  std::size_t dim;
  Sense sense;
};

// The three families in a fixed order: rosenbrock, hpt, robot_push.
std::vector<BenchmarkInfo> list_benchmarks();

// Constructs a benchmark by CLI name. `dim` only applies to rosenbrock.
// Throws ValidationError for unknown names.
Benchmark make_benchmark(const std::string& name, std::uint64_t seed,
                         std::size_t dim = 2);

}  // namespace policyscope
