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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "policyscope/core.hpp"

namespace policyscope {

inline constexpr double kGpJitter = 1e-6;
inline constexpr double kGpMaxJitter = 1e-2;
inline constexpr double kUcbBeta = 2.0;
inline constexpr std::size_t kAcquisitionPoolSize = 2048;
inline constexpr std::size_t kAcquisitionLocalPoints = 32;
inline constexpr double kAcquisitionLocalSigma = 0.05;

std::vector<double> default_lengthscale_grid();

// Zero-mean GP with an RBF kernel on normalized inputs and standardized
// targets (signal variance 1). Immutable once fitted.
struct GpModel {
  ProblemSpec space;
  Eigen::MatrixXd inputs;     // n x d, normalized
  Eigen::VectorXd targets;    // standardized
  double target_mean = 0.0;
  double target_std = 1.0;
  double lengthscale = 0.2;
  double signal_variance = 1.0;
  double noise = kGpJitter;   // jitter actually used after escalation
  Eigen::LLT<Eigen::MatrixXd> chol;
  Eigen::VectorXd alpha;
  // All targets equal: predictive mean is that constant, variance the prior.
  bool degenerate = false;
  // Incumbent (largest target) in normalized coordinates.
  Point incumbent;
  // Log marginal likelihood per grid entry (-inf where Cholesky failed).
  std::vector<double> grid;
  std::vector<double> grid_lml;

  bool fitted() const noexcept { return inputs.rows() > 0; }
};

struct GpPrediction {
  double mean = 0.0;
  double std = 0.0;
  // Before clamping at zero; for diagnostics.
  double raw_variance = 0.0;
};

// Fits to the history in internal maximize sense, selecting the lengthscale
// by maximum log marginal likelihood. Throws StateError on an empty history
// and NumericalError when no grid entry admits a Cholesky factorization.
GpModel gp_fit(const History& h,
               const std::vector<double>& lengthscale_grid = default_lengthscale_grid());

// Same, from explicit normalized inputs and targets in the unit box.
GpModel gp_fit(const std::vector<Point>& normalized_inputs,
               const std::vector<double>& targets,
               const std::vector<double>& lengthscale_grid = default_lengthscale_grid());

// `x` is in the coordinates of the fitted space (raw problem coordinates for
// history fits, [0,1]^d for the explicit overload).
GpPrediction gp_predict(const GpModel& m, std::span<const double> x);
GpPrediction gp_predict_normalized(const GpModel& m, std::span<const double> u);

double rbf_kernel(std::span<const double> a, std::span<const double> b,
                  double lengthscale, double signal_variance = 1.0);

double normal_pdf(double z);
double normal_cdf(double z);

// EI in maximize sense from posterior moments.
double expected_improvement(double mean, double std, double y_best);
double expected_improvement(const GpModel& m, std::span<const double> x, double y_best);
double ucb(double mean, double std, double beta = kUcbBeta);
double ucb(const GpModel& m, std::span<const double> x, double beta = kUcbBeta);

using Acquisition = std::function<double(std::span<const double>)>;

// Seeded candidate pool: pool_size uniform points plus kAcquisitionLocalPoints
// Gaussian perturbations of the incumbent (clamped, integer dims rounded).
std::vector<Point> acquisition_pool(const GpModel& m, const ProblemSpec& spec,
                                    std::size_t pool_size, std::uint64_t seed);

// Index of the maximal value; ties go to the lowest index.
std::size_t argmax_over_pool(std::span<const Point> pool, const Acquisition& acq);

Point maximize_acquisition(const GpModel& m, const ProblemSpec& spec,
                           const Acquisition& acq,
                           std::size_t pool_size = kAcquisitionPoolSize,
                           std::uint64_t seed = 0);

}  // namespace policyscope
