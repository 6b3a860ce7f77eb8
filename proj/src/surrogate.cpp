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

#include "policyscope/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "policyscope/errors.hpp"
#include "policyscope/random.hpp"

namespace policyscope {

std::vector<double> default_lengthscale_grid() { return {0.05, 0.1, 0.2, 0.4, 0.8}; }

double rbf_kernel(std::span<const double> a, std::span<const double> b,
                  double lengthscale, double signal_variance) {
  double d2 = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    d2 += d * d;
  }
  return signal_variance * std::exp(-d2 / (2.0 * lengthscale * lengthscale));
}

namespace {

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, double ell, double sf2) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double d2 = (x.row(i) - x.row(j)).squaredNorm();
      k(i, j) = k(j, i) = sf2 * std::exp(-d2 / (2.0 * ell * ell));
    }
  }
  return k;
}

struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> chol;
  Eigen::VectorXd alpha;
  double noise = 0.0;
  double lml = -std::numeric_limits<double>::infinity();
  bool ok = false;
};

Factorization factorize(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        double ell, double sf2) {
  Factorization f;
  const Eigen::MatrixXd k = kernel_matrix(x, ell, sf2);
  const Eigen::Index n = x.rows();
  for (double noise = kGpJitter; noise <= kGpMaxJitter * (1.0 + 1e-9); noise *= 10.0) {
    Eigen::MatrixXd kn = k;
    kn.diagonal().array() += noise;
    f.chol.compute(kn);
    if (f.chol.info() != Eigen::Success) continue;
    const Eigen::VectorXd diag = f.chol.matrixLLT().diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite()) continue;
    f.alpha = f.chol.solve(y);
    if (!f.alpha.allFinite()) continue;
    f.noise = noise;
    f.lml = -0.5 * y.dot(f.alpha) - diag.array().log().sum() -
            0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    f.ok = true;
    return f;
  }
  return f;
}

GpModel fit_impl(ProblemSpec space, const std::vector<Point>& inputs,
                 const std::vector<double>& targets, const std::vector<double>& grid) {
  if (inputs.empty()) throw StateError("gp_fit: no training data");
  if (inputs.size() != targets.size()) {
    throw ValidationError("gp_fit: inputs and targets differ in length");
  }
  if (grid.empty()) throw ValidationError("gp_fit: empty lengthscale grid");
  const auto n = static_cast<Eigen::Index>(inputs.size());
  const auto d = static_cast<Eigen::Index>(space.dim);

  GpModel m;
  m.space = std::move(space);
  m.inputs.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m.inputs(i, j) = inputs[i][j];
  }

  double mean = 0.0;
  for (double t : targets) mean += t;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double t : targets) var += (t - mean) * (t - mean);
  var /= static_cast<double>(n);
  const double sd = std::sqrt(var);

  std::size_t best_idx = 0;
  for (std::size_t i = 1; i < targets.size(); ++i) {
    if (targets[i] > targets[best_idx]) best_idx = i;
  }
  m.incumbent = inputs[best_idx];
  m.grid = grid;
  m.target_mean = mean;

  if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
    m.degenerate = true;
    m.target_mean = targets.front();
    m.target_std = 1.0;
    m.targets = Eigen::VectorXd::Zero(n);
    m.grid_lml.assign(grid.size(), -std::numeric_limits<double>::infinity());
    return m;
  }

  m.target_std = sd;
  m.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) m.targets(i) = (targets[i] - mean) / sd;

  Factorization best;
  m.grid_lml.reserve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    Factorization f = factorize(m.inputs, m.targets, grid[g], m.signal_variance);
    m.grid_lml.push_back(f.lml);
    if (f.ok && (!best.ok || f.lml > best.lml)) {
      best = std::move(f);
      m.lengthscale = grid[g];
    }
  }
  if (!best.ok) {
    throw NumericalError("gp_fit: Cholesky failed for every lengthscale even with jitter " +
                         std::to_string(kGpMaxJitter));
  }
  m.chol = std::move(best.chol);
  m.alpha = std::move(best.alpha);
  m.noise = best.noise;
  return m;
}

}  // namespace

GpModel gp_fit(const History& h, const std::vector<double>& lengthscale_grid) {
  if (h.empty()) throw StateError("gp_fit: history is empty");
  std::vector<Point> inputs;
  std::vector<double> targets;
  for (std::size_t i = 0; i < h.size(); ++i) {
    inputs.push_back(normalize_point(h[i].point, h.problem()));
    targets.push_back(h.internal_value(i));
  }
  return fit_impl(h.problem(), inputs, targets, lengthscale_grid);
}

GpModel gp_fit(const std::vector<Point>& normalized_inputs,
               const std::vector<double>& targets,
               const std::vector<double>& lengthscale_grid) {
  if (normalized_inputs.empty()) throw StateError("gp_fit: no training data");
  ProblemSpec unit;
  unit.name = "unit";
  unit.dim = normalized_inputs.front().size();
  unit.bounds.assign(unit.dim, Bound{0.0, 1.0});
  unit.kinds.assign(unit.dim, VarKind::kContinuous);
  return fit_impl(std::move(unit), normalized_inputs, targets, lengthscale_grid);
}

GpPrediction gp_predict_normalized(const GpModel& m, std::span<const double> u) {
  if (!m.fitted()) throw StateError("gp_predict: model is not fitted");
  GpPrediction p;
  const double prior = m.signal_variance;
  if (m.degenerate) {
    p.mean = m.target_mean;
    p.raw_variance = prior * m.target_std * m.target_std;
    p.std = std::sqrt(p.raw_variance);
    return p;
  }
  const Eigen::Index n = m.inputs.rows();
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double d2 = 0.0;
    for (Eigen::Index j = 0; j < m.inputs.cols(); ++j) {
      const double d = m.inputs(i, j) - u[static_cast<std::size_t>(j)];
      d2 += d * d;
    }
    ks(i) = m.signal_variance * std::exp(-d2 / (2.0 * m.lengthscale * m.lengthscale));
  }
  const double mean_std = ks.dot(m.alpha);
  const Eigen::VectorXd v = m.chol.matrixL().solve(ks);
  const double var_std = prior - v.squaredNorm();
  p.mean = m.target_mean + m.target_std * mean_std;
  p.raw_variance = var_std * m.target_std * m.target_std;
  p.std = std::sqrt(std::max(0.0, p.raw_variance));
  return p;
}

GpPrediction gp_predict(const GpModel& m, std::span<const double> x) {
  return gp_predict_normalized(m, normalize_point(x, m.space));
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mean, double std, double y_best) {
  const double delta = mean - y_best;
  if (std < 1e-12) return std::max(0.0, delta);
  const double z = delta / std;
  return std::max(0.0, delta * normal_cdf(z) + std * normal_pdf(z));
}

double expected_improvement(const GpModel& m, std::span<const double> x, double y_best) {
  const GpPrediction p = gp_predict(m, x);
  return expected_improvement(p.mean, p.std, y_best);
}

double ucb(double mean, double std, double beta) { return mean + beta * std; }

double ucb(const GpModel& m, std::span<const double> x, double beta) {
  const GpPrediction p = gp_predict(m, x);
  return ucb(p.mean, p.std, beta);
}

std::vector<Point> acquisition_pool(const GpModel& m, const ProblemSpec& spec,
                                    std::size_t pool_size, std::uint64_t seed) {
  if (pool_size == 0) throw ValidationError("acquisition pool size must be >= 1");
  Rng rng(seed);
  std::vector<Point> pool;
  pool.reserve(pool_size + kAcquisitionLocalPoints);
  Point u(spec.dim);
  for (std::size_t i = 0; i < pool_size; ++i) {
    for (double& v : u) v = rng.uniform();
    pool.push_back(clamp_point(denormalize_point(u, spec), spec));
  }
  if (!m.incumbent.empty()) {
    for (std::size_t i = 0; i < kAcquisitionLocalPoints; ++i) {
      for (std::size_t j = 0; j < spec.dim; ++j) {
        u[j] = std::clamp(m.incumbent[j] + kAcquisitionLocalSigma * rng.normal(), 0.0, 1.0);
      }
      pool.push_back(clamp_point(denormalize_point(u, spec), spec));
    }
  }
  return pool;
}

std::size_t argmax_over_pool(std::span<const Point> pool, const Acquisition& acq) {
  if (pool.empty()) throw ValidationError("argmax over an empty pool");
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double v = acq(pool[i]);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

Point maximize_acquisition(const GpModel& m, const ProblemSpec& spec,
                           const Acquisition& acq, std::size_t pool_size,
                           std::uint64_t seed) {
  const std::vector<Point> pool = acquisition_pool(m, spec, pool_size, seed);
  return pool[argmax_over_pool(pool, acq)];
}

}  // namespace policyscope
