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

#include "repsel/store/folds.hpp"

#include <numeric>
#include <string>

#include "repsel/error.hpp"
#include "repsel/rng.hpp"

namespace repsel::store {

std::vector<std::size_t> FoldPlan::eval_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

std::size_t FoldPlan::fold_size(std::size_t fold) const {
  std::size_t n = 0;
  for (auto a : assignments) n += (a == fold);
  return n;
}

FoldPlan plan_folds(const EmbeddingDataset& ds, std::size_t n_folds,
                    std::uint64_t seed, bool stratified) {
  if (n_folds < 2) throw ConfigError("n_folds must be at least 2");

  FoldPlan plan;
  plan.n_folds = n_folds;
  plan.stratified = stratified;
  plan.assignments.assign(ds.size(), 0);
  for (std::size_t f = 0; f < n_folds; ++f) plan.selection_seeds.push_back(seed + f);

  Rng rng(seed);
  // Dealing round-robin keeps per-fold counts within one of each other; the
  // dealer position carries over between classes so fold totals stay even.
  std::size_t dealer = 0;
  auto deal = [&](std::vector<std::size_t>& rows) {
    rng.shuffle(std::span<std::size_t>(rows));
    for (auto r : rows) {
      plan.assignments[r] = static_cast<std::uint32_t>(dealer % n_folds);
      ++dealer;
    }
  };

  if (stratified) {
    for (std::uint8_t label : {kReal, kFake}) {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.labels()[i] == label) rows.push_back(i);
      }
      if (rows.size() < n_folds) {
        throw ConfigError("class " + std::to_string(label) + " has " +
                          std::to_string(rows.size()) +
                          " samples, fewer than " + std::to_string(n_folds) +
                          " folds");
      }
      deal(rows);
    }
  } else {
    if (ds.size() < n_folds) {
      throw ConfigError("dataset has fewer rows than folds");
    }
    std::vector<std::size_t> rows(ds.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    deal(rows);
  }
  return plan;
}

}  // namespace repsel::store
