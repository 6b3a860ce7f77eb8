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

#include "policyscope/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "policyscope/errors.hpp"
#include "policyscope/random.hpp"

namespace policyscope {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

namespace {

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

void require_nonempty(const History& h, const char* what) {
  if (h.empty()) throw StateError(std::string(what) + ": history is empty");
}

std::vector<Point> normalized_points(const History& h) {
  std::vector<Point> pts;
  pts.reserve(h.size());
  for (const Evaluation& e : h.evaluations()) {
    pts.push_back(normalize_point(e.point, h.problem()));
  }
  return pts;
}

std::size_t nearest(std::span<const Point> centroids, std::span<const double> p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(centroids[c], p);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

CandidateScorer::CandidateScorer(const History& h, const ClusterModel& model) {
  require_nonempty(h, "CandidateScorer");
  points_ = normalized_points(h);
  values_.reserve(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) values_.push_back(h.internal_value(i));
  y_min_ = *std::min_element(values_.begin(), values_.end());
  y_max_ = *std::max_element(values_.begin(), values_.end());
  diameter_ = std::sqrt(static_cast<double>(h.problem().dim));
  if (model.fitted()) {
    centroids_ = model.centroids;
    has_model_ = true;
  }
}

double CandidateScorer::exploitation(std::span<const double> u) const {
  if (y_max_ == y_min_) return 0.5;
  double num = 0.0;
  double den = 0.0;
  double estimate = 0.0;
  bool coincident = false;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d = distance(points_[i], u);
    if (d <= kCoincidenceTol) {
      estimate = values_[i];
      coincident = true;
      break;
    }
    const double w = 1.0 / std::pow(d, kIdwPower);
    num += w * values_[i];
    den += w;
  }
  if (!coincident) estimate = num / den;
  return clip01((estimate - y_min_) / (y_max_ - y_min_));
}

double CandidateScorer::informativeness(std::span<const double> u) const {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& p : points_) best = std::min(best, distance(p, u));
  return clip01(best / diameter_);
}

double CandidateScorer::diversity(std::span<const double> u) const {
  double sum = 0.0;
  for (const Point& p : points_) sum += distance(p, u);
  return clip01(sum / static_cast<double>(points_.size()) / diameter_);
}

double CandidateScorer::representativeness(std::span<const double> u) const {
  if (!has_model_) throw StateError("representativeness: cluster model is not fitted");
  const std::size_t c = nearest(centroids_, u);
  return clip01(1.0 - distance(centroids_[c], u) / diameter_);
}

double CandidateScorer::criterion(Criterion c, std::span<const double> u) const {
  switch (c) {
    case Criterion::kExploitation: return exploitation(u);
    case Criterion::kInformativeness: return informativeness(u);
    case Criterion::kDiversity: return diversity(u);
    case Criterion::kRepresentativeness: return representativeness(u);
  }
  throw ValidationError("unknown criterion");
}

double CandidateScorer::score(std::span<const double> u, const WeightVector& w) const {
  double s = 0.0;
  for (Criterion c : w.active()) s += w.weight(c) * criterion(c, u);
  return s;
}

std::array<double, 4> CandidateScorer::all(std::span<const double> u) const {
  std::array<double, 4> out{};
  for (Criterion c : kAllCriteria) out[static_cast<std::size_t>(c)] = criterion(c, u);
  return out;
}

double exploitation(std::span<const double> x, const History& h) {
  require_nonempty(h, "exploitation");
  return CandidateScorer(h, ClusterModel{})
      .criterion(Criterion::kExploitation, normalize_point(x, h.problem()));
}

double informativeness(std::span<const double> x, const History& h) {
  require_nonempty(h, "informativeness");
  return CandidateScorer(h, ClusterModel{})
      .criterion(Criterion::kInformativeness, normalize_point(x, h.problem()));
}

double diversity(std::span<const double> x, const History& h) {
  require_nonempty(h, "diversity");
  return CandidateScorer(h, ClusterModel{})
      .criterion(Criterion::kDiversity, normalize_point(x, h.problem()));
}

double representativeness(std::span<const double> x, const ClusterModel& model) {
  if (!model.fitted()) throw StateError("representativeness: cluster model is not fitted");
  const Point u = normalize_point(x, model.space);
  const std::size_t c = nearest(model.centroids, u);
  const double diameter = std::sqrt(static_cast<double>(model.space.dim));
  return clip01(1.0 - distance(model.centroids[c], u) / diameter);
}

double score_candidate(std::span<const double> x, const History& h,
                       const WeightVector& w, const ClusterModel& model) {
  require_nonempty(h, "score_candidate");
  return CandidateScorer(h, model).score(normalize_point(x, h.problem()), w);
}

double within_cluster_ss(std::span<const Point> points,
                         std::span<const Point> centroids,
                         std::span<const std::size_t> assignment) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    s += squared_distance(points[i], centroids[assignment[i]]);
  }
  return s;
}

std::vector<Point> kmeans_pp_init(std::span<const Point> points, std::size_t k,
                                  std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = points.size();
  std::vector<Point> centers;
  std::vector<bool> chosen(n, false);
  std::size_t first = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
  centers.push_back(points[first]);
  chosen[first] = true;
  std::vector<double> d2(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const Point& c : centers) best = std::min(best, squared_distance(points[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = n;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        pick = i;
        r -= d2[i];
        if (r < 0.0) break;
      }
    } else {
      // All remaining points coincide with a center: take the first unused.
      for (std::size_t i = 0; i < n && pick == n; ++i) {
        if (!chosen[i]) pick = i;
      }
    }
    centers.push_back(points[pick]);
    chosen[pick] = true;
  }
  return centers;
}

LloydResult lloyd(std::span<const Point> points, std::vector<Point> centroids,
                  std::size_t max_iter, double tol) {
  LloydResult res;
  const std::size_t n = points.size();
  const std::size_t k = centroids.size();
  const std::size_t dim = n > 0 ? points[0].size() : 0;
  const double diameter = std::sqrt(static_cast<double>(std::max<std::size_t>(dim, 1)));
  res.assignment.assign(n, 0);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) res.assignment[i] = nearest(centroids, points[i]);

    std::vector<Point> next(k, Point(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = res.assignment[i];
      ++counts[c];
      for (std::size_t j = 0; j < dim; ++j) next[c][j] += points[i][j];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        next[c] = centroids[c];  // empty cluster keeps its centroid
      } else {
        for (double& v : next[c]) v /= static_cast<double>(counts[c]);
      }
      shift = std::max(shift, distance(next[c], centroids[c]));
    }
    centroids = std::move(next);
    res.wcss_trace.push_back(within_cluster_ss(points, centroids, res.assignment));
    res.iterations = iter + 1;
    if (shift / diameter < tol) break;
  }
  res.centroids = std::move(centroids);
  return res;
}

LloydResult kmeans(std::span<const Point> points, std::size_t k, std::uint64_t seed) {
  if (points.empty()) throw StateError("kmeans: no points");
  if (k == 0) throw ValidationError("kmeans: k must be >= 1");
  k = std::min(k, points.size());
  LloydResult best;
  double best_wcss = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < kKmeansRestarts; ++r) {
    LloydResult run = lloyd(points, kmeans_pp_init(points, k, derive_seed(seed, "kmeans", r)));
    const double w = run.wcss_trace.back();
    if (w < best_wcss) {
      best_wcss = w;
      best = std::move(run);
    }
  }
  return best;
}

ClusterModel fit_clusters(const History& h, std::size_t k, std::uint64_t seed) {
  require_nonempty(h, "fit_clusters");
  const std::vector<Point> pts = normalized_points(h);
  LloydResult res = kmeans(pts, k, seed);
  ClusterModel model;
  model.k = res.centroids.size();
  model.centroids = std::move(res.centroids);
  model.rng_seed = seed;
  model.wcss = res.wcss_trace.back();
  model.space = h.problem();
  return model;
}

}  // namespace policyscope
