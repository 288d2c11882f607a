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

#include "repsel/store/dataset.hpp"

namespace repsel::store {

// Partition of dataset rows into folds. Fold f is the evaluation portion of
// round f; the remaining folds form its training portion.
struct FoldPlan {
  std::size_t n_folds = 5;
  std::vector<std::uint32_t> assignments;
  // selection_seeds[f] = master seed + f.
  std::vector<std::uint64_t> selection_seeds;
  bool stratified = true;

  std::vector<std::size_t> eval_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::size_t fold_size(std::size_t fold) const;
};

// Throws ConfigError if n_folds < 2, if any class has fewer than n_folds
// samples under stratification, or if N < n_folds otherwise.
FoldPlan plan_folds(const EmbeddingDataset& ds, std::size_t n_folds,
                    std::uint64_t seed, bool stratified = true);

}  // namespace repsel::store
