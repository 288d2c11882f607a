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

#include <functional>
#include <iosfwd>
#include <vector>

#include "repsel/bench/config.hpp"
#include "repsel/bench/report.hpp"
#include "repsel/store/dataset.hpp"

namespace repsel::bench {

struct SweepOptions {
  // Receives every report, in grid order, from a single thread at a time.
  std::function<void(const EvalReport&)> sink;
  // Per-job progress lines; null for silence.
  std::ostream* progress = nullptr;
};

// Runs the full grid on `ds`. Jobs are (fold, reducer) pairs; each fits its
// reducer on the fold's training rows, then trains one model per
// (percentage, arch). Reports come back ordered by fold, reducer,
// percentage, arch. Failures inside a cell are recorded in its report.
// Throws ConfigError when the configuration or fold plan is invalid.
std::vector<EvalReport> run_sweep(const ExperimentConfig& cfg,
                                  const store::EmbeddingDataset& ds,
                                  const SweepOptions& options = {});

// Loads or generates the configured dataset first.
std::vector<EvalReport> run_sweep(const ExperimentConfig& cfg,
                                  const SweepOptions& options = {});

// Seeds of a cell's downstream model. They depend on the fold and the
// architecture only, so every reducer and percentage of a fold starts from
// the same stream.
std::uint64_t init_seed(std::uint64_t master_seed, std::size_t fold, nn::ArchKind arch);
std::uint64_t train_seed(std::uint64_t master_seed, std::size_t fold, nn::ArchKind arch);

}  // namespace repsel::bench
