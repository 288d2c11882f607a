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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "repsel/types.hpp"

namespace repsel::metrics {

struct TsneConfig {
  std::size_t out_dim = 2;
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::size_t momentum_switch = 250;
  // Inputs larger than this are subsampled (seeded) before embedding.
  std::size_t max_points = 5000;
  std::uint64_t seed = 0;
};

struct TsneResult {
  MatrixD embedding;                  // N' x out_dim
  std::vector<std::size_t> rows;      // input rows embedded, ascending
  std::vector<double> kl_trace;       // KL(P || Q) after each iteration
};

// Conditional affinities p_{j|i} with per-row Gaussian bandwidths found by
// bisection so that each row's entropy equals log(perplexity) within 1e-5.
// Rows sum to 1.
MatrixD conditional_affinities(const MatrixD& x, double perplexity);

// (P + P^T) / 2N; sums to 1.
MatrixD joint_affinities(const MatrixD& conditional);

// Student-t similarities of an embedding, normalised to sum to 1.
MatrixD student_t_affinities(const MatrixD& y);

double kl_divergence(const MatrixD& p, const MatrixD& q);

// Exact O(N^2) t-SNE. Throws ConfigError when N < 10 or the perplexity is
// not below (N - 1) / 3.
TsneResult tsne(const MatrixD& x, const TsneConfig& cfg);

}  // namespace repsel::metrics
