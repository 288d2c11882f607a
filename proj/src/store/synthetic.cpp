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

#include "repsel/store/synthetic.hpp"

#include <algorithm>
#include <numeric>

#include "repsel/error.hpp"
#include "repsel/rng.hpp"

namespace repsel::store {

namespace {

void check(const SyntheticSpec& spec) {
  if (spec.n_per_class < 1) throw ConfigError("n_per_class must be positive");
  if (spec.dim < 1) throw ConfigError("dim must be positive");
  if (spec.n_informative < 1) throw ConfigError("n_informative must be >= 1");
  if (spec.n_informative > spec.dim) {
    throw ConfigError("n_informative exceeds dim");
  }
  if (spec.redundancy_factor < 0) {
    throw ConfigError("redundancy_factor must be >= 0");
  }
  if (!(spec.noise_sigma > 0)) throw ConfigError("noise_sigma must be > 0");
}

}  // namespace

std::vector<std::size_t> informative_coordinates(const SyntheticSpec& spec) {
  check(spec);
  Rng rng(spec.seed);
  std::vector<std::size_t> order(spec.dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  order.resize(spec.n_informative);
  std::sort(order.begin(), order.end());
  return order;
}

EmbeddingDataset gen_synthetic(const SyntheticSpec& spec) {
  const auto informative = informative_coordinates(spec);
  // Continue from a stream independent of the coordinate shuffle.
  Rng rng(derive_seed({spec.seed, 0x5EEDULL}));

  std::vector<double> direction(spec.n_informative);
  for (auto& s : direction) s = rng.uniform() < 0.5 ? -1.0 : 1.0;

  std::vector<bool> is_informative(spec.dim, false);
  for (auto c : informative) is_informative[c] = true;
  // Each remaining coordinate copies one informative coordinate.
  std::vector<std::size_t> source(spec.dim, 0);
  for (std::size_t j = 0; j < spec.dim; ++j) {
    if (!is_informative[j]) source[j] = rng.below(spec.n_informative);
  }

  const std::size_t n = 2 * spec.n_per_class;
  FeatureMatrix samples(static_cast<Eigen::Index>(n),
                        static_cast<Eigen::Index>(spec.dim));
  std::vector<std::uint8_t> labels(n);
  std::vector<double> signal(spec.n_informative);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t label = i < spec.n_per_class ? kReal : kFake;
    labels[i] = label;
    const double half = (label == kFake ? 0.5 : -0.5) * spec.class_shift;
    for (std::size_t m = 0; m < spec.n_informative; ++m) {
      signal[m] = direction[m] * half + rng.normal();
    }
    auto row = samples.row(static_cast<Eigen::Index>(i));
    std::size_t m = 0;
    for (std::size_t j = 0; j < spec.dim; ++j) {
      double v;
      if (is_informative[j]) {
        v = signal[m++];
      } else {
        v = spec.redundancy_factor * signal[source[j]] +
            spec.noise_sigma * rng.normal();
      }
      row(static_cast<Eigen::Index>(j)) = static_cast<float>(v);
    }
  }
  return EmbeddingDataset(spec.name, std::move(samples), std::move(labels));
}

}  // namespace repsel::store
