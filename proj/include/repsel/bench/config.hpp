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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repsel/nn/model.hpp"
#include "repsel/nn/train.hpp"
#include "repsel/reduce/reducer.hpp"
#include "repsel/store/synthetic.hpp"

namespace repsel::bench {

struct TimingConfig {
  bool enabled = true;
  std::size_t warmup = 10;
  std::size_t runs = 100;
};

// One experiment grid. Exactly one of `dataset_path` and `synthetic` is set.
struct ExperimentConfig {
  std::optional<std::filesystem::path> dataset_path;
  std::optional<store::SyntheticSpec> synthetic;

  std::vector<reduce::ReducerKind> reducers{
      reduce::ReducerKind::kRandomSelect, reduce::ReducerKind::kPca,
      reduce::ReducerKind::kSvd, reduce::ReducerKind::kKpca,
      reduce::ReducerKind::kGrp};
  std::vector<double> percentages{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  // Appends 1.0 to `percentages` when it is not already there.
  bool include_baseline = true;
  std::vector<nn::ArchKind> archs{nn::ArchKind::kFcn, nn::ArchKind::kCnn};

  std::size_t n_folds = 5;
  bool stratified = true;
  std::uint64_t master_seed = 0;

  nn::TrainConfig train;  // seed is ignored; derived per cell
  std::size_t hidden = 512;
  double dropout_rate = 0.3;

  TimingConfig timing;

  std::optional<double> kpca_gamma;
  reduce::KernelKind kpca_kernel = reduce::KernelKind::kRbf;
  std::size_t kpca_max_fit_rows = reduce::kKpcaMaxFitRows;

  std::size_t workers = 1;
  // Store the dataset rows each reducer was fitted on in its report.
  bool record_fit_indices = false;

  // Throws ConfigError.
  void validate() const;

  // Percentages actually swept: configured ones plus the baseline, ascending.
  std::vector<double> sweep_percentages() const;

  // |reducers| * |percentages| * |archs| * n_folds.
  std::size_t grid_size() const;
};

// Parses a JSON document. Relative dataset paths are resolved against
// `base_dir`. Unknown keys are rejected. Throws ConfigError.
ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Loads the configured dataset file or generates the synthetic one.
store::EmbeddingDataset materialize_dataset(const ExperimentConfig& cfg);

}  // namespace repsel::bench
