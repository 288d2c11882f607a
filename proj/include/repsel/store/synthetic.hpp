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
#include <string>

#include "repsel/store/dataset.hpp"

namespace repsel::store {

// Generator for datasets whose class signal lives in a few informative
// coordinates and is copied, with noise, into every other coordinate.
struct SyntheticSpec {
  std::size_t n_per_class = 1000;
  std::size_t dim = 768;
  std::size_t n_informative = 64;
  // Weight of the copied informative coordinate in each remaining one.
  double redundancy_factor = 1.0;
  // Standard deviation of the noise added to the remaining coordinates.
  double noise_sigma = 1.0;
  // Distance between class means along each informative coordinate, in
  // units of that coordinate's within-class standard deviation (1).
  double class_shift = 1.0;
  std::uint64_t seed = 0;
  std::string name = "synthetic";
};

// Rows [0, n_per_class) are authentic, the rest fake.
EmbeddingDataset gen_synthetic(const SyntheticSpec& spec);

// Positions of the informative coordinates for `spec`, ascending.
std::vector<std::size_t> informative_coordinates(const SyntheticSpec& spec);

}  // namespace repsel::store
