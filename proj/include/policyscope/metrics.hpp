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
#include <span>
#include <vector>

#include "policyscope/core.hpp"

namespace policyscope {

// Search-behavior criteria evaluated at a candidate against a history.
//
// All distances are Euclidean in normalized [0,1]^d coordinates and divided
// by the diameter sqrt(d), so every criterion lands in [0, 1]. Objective
// values are read in internal maximize sense.
//
//   exploitation       Shepard (inverse squared distance) interpolation of
//                      the observed values, min-max scaled over the history.
//   informativeness    distance to the nearest evaluated point (local
//                      sparsity).
//   diversity          mean distance to all evaluated points (global
//                      dispersion).
//   representativeness 1 - distance to the nearest k-means centroid of the
//                      evaluated points.

inline constexpr double kCoincidenceTol = 1e-12;
inline constexpr double kIdwPower = 2.0;
inline constexpr std::size_t kDefaultClusters = 3;
inline constexpr std::size_t kLloydMaxIter = 50;
inline constexpr double kLloydTol = 1e-6;
// Independent k-means++ seedings per fit; the lowest final WCSS wins.
inline constexpr std::size_t kKmeansRestarts = 10;

double exploitation(std::span<const double> x, const History& h);
double informativeness(std::span<const double> x, const History& h);
double diversity(std::span<const double> x, const History& h);

// k-means model over the normalized evaluated points of a history.
struct ClusterModel {
  std::vector<Point> centroids;  // normalized coordinates
  std::size_t k = 0;
  std::uint64_t rng_seed = 0;
  double wcss = 0.0;
  ProblemSpec space;

  bool fitted() const noexcept { return k > 0 && centroids.size() == k; }
};

// k = min(k, h.size()). Throws StateError on an empty history.
ClusterModel fit_clusters(const History& h, std::size_t k = kDefaultClusters,
                          std::uint64_t seed = 0);

// Throws StateError when the model is not fitted.
double representativeness(std::span<const double> x, const ClusterModel& model);

// S(x) = sum over active criteria of w_m * m(x).
double score_candidate(std::span<const double> x, const History& h,
                       const WeightVector& w, const ClusterModel& model);

// Evaluates all criteria against a fixed history snapshot. Reuses the
// normalized history across many candidates; this is what pool scoring uses.
class CandidateScorer {
 public:
  CandidateScorer(const History& h, const ClusterModel& model);

  double criterion(Criterion c, std::span<const double> x_normalized) const;
  double score(std::span<const double> x_normalized, const WeightVector& w) const;
  std::array<double, 4> all(std::span<const double> x_normalized) const;

 private:
  double exploitation(std::span<const double> u) const;
  double informativeness(std::span<const double> u) const;
  double diversity(std::span<const double> u) const;
  double representativeness(std::span<const double> u) const;

  std::vector<Point> points_;  // normalized
  std::vector<double> values_; // internal sense
  double y_min_ = 0.0;
  double y_max_ = 0.0;
  double diameter_ = 1.0;
  std::vector<Point> centroids_;
  bool has_model_ = false;
};

// Lloyd's algorithm internals, exposed for verification.
struct LloydResult {
  std::vector<Point> centroids;
  std::vector<std::size_t> assignment;
  // Within-cluster sum of squares after every assignment+update step.
  std::vector<double> wcss_trace;
  std::size_t iterations = 0;
};

std::vector<Point> kmeans_pp_init(std::span<const Point> points, std::size_t k,
                                  std::uint64_t seed);
LloydResult lloyd(std::span<const Point> points, std::vector<Point> centroids,
                  std::size_t max_iter = kLloydMaxIter, double tol = kLloydTol);
double within_cluster_ss(std::span<const Point> points,
                         std::span<const Point> centroids,
                         std::span<const std::size_t> assignment);

// Best of kKmeansRestarts seeded k-means++/Lloyd runs on normalized points.
LloydResult kmeans(std::span<const Point> points, std::size_t k, std::uint64_t seed);

double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);

}  // namespace policyscope
