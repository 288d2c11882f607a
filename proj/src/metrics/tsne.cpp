// Copyright 2026 The repsel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "repsel/metrics/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "repsel/error.hpp"
#include "repsel/rng.hpp"

namespace repsel::metrics {

namespace {

constexpr double kEntropyTolerance = 1e-5;
constexpr int kMaxBisectionSteps = 200;

MatrixD squared_distances(const MatrixD& x) {
  const VectorD norms = x.rowwise().squaredNorm();
  MatrixD d = (-2.0 * x * x.transpose()).colwise() + norms;
  d.rowwise() += norms.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

// Solves for the Gaussian precision of row i and writes the conditional
// distribution into p.row(i).
void solve_row(const MatrixD& dist, Eigen::Index i, double target_entropy, MatrixD& p) {
  const Eigen::Index n = dist.rows();
  double d_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j != i) d_min = std::min(d_min, dist(i, j));
  }

  double beta = 1.0;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  VectorD row(n);
  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    // Shifting by the nearest distance keeps the sum >= 1; the entropy is
    // unchanged by the shift.
    double sum = 0.0;
    double weighted = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) {
        row[j] = 0.0;
        continue;
      }
      const double shifted = dist(i, j) - d_min;
      row[j] = std::exp(-beta * shifted);
      sum += row[j];
      weighted += shifted * row[j];
    }
    const double entropy = std::log(sum) + beta * weighted / sum;
    row /= sum;
    const double diff = entropy - target_entropy;
    if (std::abs(diff) < kEntropyTolerance) break;
    if (diff > 0) {
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
    } else {
      hi = beta;
      beta = 0.5 * (beta + lo);
    }
  }
  p.row(i) = row.transpose();
}

std::vector<std::size_t> choose_rows(std::size_t n, const TsneConfig& cfg) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (n <= cfg.max_points) return rows;
  Rng rng(derive_seed({cfg.seed, 0x54534E45}));
  rng.shuffle(std::span<std::size_t>(rows));
  rows.resize(cfg.max_points);
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

MatrixD conditional_affinities(const MatrixD& x, double perplexity) {
  if (x.rows() < 2) throw DataError("t-SNE needs at least two points");
  if (!(perplexity > 0)) throw ConfigError("perplexity must be positive");
  const MatrixD dist = squared_distances(x);
  MatrixD p = MatrixD::Zero(x.rows(), x.rows());
  const double target = std::log(perplexity);
  for (Eigen::Index i = 0; i < x.rows(); ++i) solve_row(dist, i, target, p);
  return p;
}

MatrixD joint_affinities(const MatrixD& conditional) {
  const double n = static_cast<double>(conditional.rows());
  return (conditional + conditional.transpose()) / (2.0 * n);
}

MatrixD student_t_affinities(const MatrixD& y) {
  MatrixD num = (1.0 + squared_distances(y).array()).inverse().matrix();
  num.diagonal().setZero();
  return num / num.sum();
}

double kl_divergence(const MatrixD& p, const MatrixD& q) {
  constexpr double kFloor = 1e-300;
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double pij = p(i, j);
      if (pij > 0) kl += pij * std::log(pij / std::max(q(i, j), kFloor));
    }
  }
  return kl;
}

TsneResult tsne(const MatrixD& x, const TsneConfig& cfg) {
  if (cfg.out_dim < 1) throw ConfigError("t-SNE out_dim must be >= 1");
  if (cfg.iterations < 1) throw ConfigError("t-SNE needs at least one iteration");
  if (cfg.max_points < 10) throw ConfigError("t-SNE max_points must be >= 10");

  TsneResult result;
  result.rows = choose_rows(static_cast<std::size_t>(x.rows()), cfg);
  const auto n = static_cast<Eigen::Index>(result.rows.size());
  if (n < 10) throw ConfigError("t-SNE needs at least 10 points");
  if (!(cfg.perplexity > 0) || cfg.perplexity >= (static_cast<double>(n) - 1.0) / 3.0) {
    throw ConfigError("perplexity must be in (0, (N-1)/3)");
  }

  MatrixD data(n, x.cols());
  for (Eigen::Index r = 0; r < n; ++r) data.row(r) = x.row(static_cast<Eigen::Index>(result.rows[r]));
  const MatrixD p = joint_affinities(conditional_affinities(data, cfg.perplexity));

  const auto dims = static_cast<Eigen::Index>(cfg.out_dim);
  Rng rng(cfg.seed);
  MatrixD y(n, dims);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < dims; ++c) y(r, c) = 1e-4 * rng.normal();
  }
  MatrixD velocity = MatrixD::Zero(n, dims);
  MatrixD gains = MatrixD::Ones(n, dims);
  MatrixD grad(n, dims);

  result.kl_trace.reserve(cfg.iterations);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    MatrixD num = (1.0 + squared_distances(y).array()).inverse().matrix();
    num.diagonal().setZero();
    const MatrixD q = num / num.sum();
    result.kl_trace.push_back(kl_divergence(p, q));

    const double exaggeration = it < cfg.exaggeration_iterations ? cfg.early_exaggeration : 1.0;
    const MatrixD w = ((exaggeration * p - q).array() * num.array()).matrix();
    // grad_i = 4 * sum_j w_ij (y_i - y_j)
    grad = 4.0 * (w.rowwise().sum().asDiagonal() * y - w * y);

    const double momentum = it < cfg.momentum_switch ? cfg.initial_momentum : cfg.final_momentum;
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < dims; ++c) {
        const bool same_sign = (grad(r, c) > 0) == (velocity(r, c) > 0);
        gains(r, c) = std::max(same_sign ? gains(r, c) * 0.8 : gains(r, c) + 0.2, 0.01);
        velocity(r, c) = momentum * velocity(r, c) - cfg.learning_rate * gains(r, c) * grad(r, c);
      }
    }
    y += velocity;
    y.rowwise() -= y.colwise().mean();
  }
  result.embedding = std::move(y);
  return result;
}

}  // namespace repsel::metrics
