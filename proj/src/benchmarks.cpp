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

#include "policyscope/benchmarks.hpp"

#include <cmath>
#include <numbers>

#include "policyscope/errors.hpp"
#include "policyscope/random.hpp"

namespace policyscope {

Benchmark rosenbrock(std::size_t d) {
  if (d < 2) throw DomainError("rosenbrock needs d >= 2, got " + std::to_string(d));
  Benchmark b;
  b.spec.name = "rosenbrock";
  b.spec.dim = d;
  b.spec.bounds.assign(d, Bound{-2.0, 2.0});
  b.spec.kinds.assign(d, VarKind::kContinuous);
  b.spec.sense = Sense::kMinimize;
  // Anonymous on purpose: the prompt may not reveal the function.
  b.spec.description = "An unknown black-box function of " + std::to_string(d) +
                       " continuous variables. Nothing is known about its "
                       "shape beyond the evaluations shown.";
  b.evaluate = [](const Point& x) {
    double f = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double c = 1.0 - x[i];
      f += 100.0 * a * a + c * c;
    }
    return f;
  };
  b.known_optimum = KnownOptimum{Point(d, 1.0), 0.0};
  return b;
}

HptParams draw_hpt_params(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "hpt"));
  HptParams p;
  p.lr_center = rng.uniform(-4.0, -2.0);
  p.depth_center = static_cast<int>(rng.uniform_int(3, 8));
  p.decay_center = rng.uniform(-5.0, -3.0);
  return p;
}

Benchmark synthetic_hpt(std::uint64_t seed) { return synthetic_hpt(draw_hpt_params(seed)); }

Benchmark synthetic_hpt(const HptParams& params) {
  Benchmark b;
  b.spec.name = "hpt";
  b.spec.dim = 5;
  b.spec.bounds = {{-5.0, -1.0}, {3.0, 9.0}, {1.0, 10.0}, {0.0, 0.8}, {-6.0, -2.0}};
  b.spec.kinds = {VarKind::kContinuous, VarKind::kInteger, VarKind::kInteger,
                  VarKind::kContinuous, VarKind::kContinuous};
  b.spec.sense = Sense::kMinimize;
  b.spec.description =
      "Validation error of a neural network classifier as a function of its "
      "training hyperparameters. x1 = log10 of the learning rate, x2 = log2 of "
      "the batch size, x3 = number of hidden layers, x4 = dropout rate, "
      "x5 = log10 of the weight decay.";
  b.evaluate = [p = params](const Point& x) {
    const double lr = x[0] - p.lr_center;
    const double batch = x[1] - 6.0;
    const double depth = std::abs(x[2] - p.depth_center);
    const double dropout = x[3] - 0.3;
    const double decay = x[4] - p.decay_center;
    return 0.15 + lr * lr / 4.0 + 0.02 * depth + 0.5 * dropout * dropout +
           0.01 * batch * batch + 0.3 * lr * decay / 8.0;
  };
  return b;
}

std::array<double, 2> draw_push_goal(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "robot_push"));
  // Uniform by area: radius^2 uniform in [9, 25].
  const double r = std::sqrt(rng.uniform(9.0, 25.0));
  const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return {r * std::cos(theta), r * std::sin(theta)};
}

std::array<double, 2> push_object_final(double rx, double ry, double duration) {
  const double dist = std::hypot(rx, ry);
  double ux = 1.0;
  double uy = 0.0;
  if (dist >= 1e-9) {
    ux = -rx / dist;
    uy = -ry / dist;
  }
  const double travel = std::max(0.0, duration * kPushSpeed - dist);
  return {travel * ux, travel * uy};
}

Benchmark robot_push(std::uint64_t seed) { return robot_push(draw_push_goal(seed)); }

Benchmark robot_push(const std::array<double, 2>& goal) {
  Benchmark b;
  b.spec.name = "robot_push";
  b.spec.dim = 3;
  b.spec.bounds = {{-5.0, 5.0}, {-5.0, 5.0}, {1.0, 30.0}};
  b.spec.kinds.assign(3, VarKind::kContinuous);
  b.spec.sense = Sense::kMaximize;
  b.spec.description =
      "A robot starts at position (x1, x2) on a plane and walks in a straight "
      "line through an object resting at the origin, pushing it onward for x3 "
      "time steps. The reward is how much closer the object ends up to a fixed "
      "but unknown goal location than it started.";
  b.evaluate = [goal](const Point& x) {
    const auto obj = push_object_final(x[0], x[1], x[2]);
    return std::hypot(goal[0], goal[1]) -
           std::hypot(goal[0] - obj[0], goal[1] - obj[1]);
  };
  return b;
}

std::vector<BenchmarkInfo> list_benchmarks() {
  return {{"rosenbrock", 2, Sense::kMinimize},
          {"hpt", 5, Sense::kMinimize},
          {"robot_push", 3, Sense::kMaximize}};
}

Benchmark make_benchmark(const std::string& name, std::uint64_t seed, std::size_t dim) {
  if (name == "rosenbrock") return rosenbrock(dim);
  if (name == "hpt") return synthetic_hpt(seed);
  if (name == "robot_push") return robot_push(seed);
  throw ValidationError("unknown benchmark '" + name +
                        "' (expected rosenbrock, hpt or robot_push)");
}

}  // namespace policyscope
