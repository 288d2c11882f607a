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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "repsel/bench/timing.hpp"

namespace repsel::bench {

// One (reducer, percentage, arch, fold) cell of a sweep.
struct EvalReport {
  std::string dataset;
  std::string reducer;
  double percentage = 0.0;
  std::string arch;
  std::size_t fold = 0;
  std::uint64_t selection_seed = 0;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;

  bool failed = false;
  std::string error;

  // Metrics are absent on failed cells.
  std::optional<double> accuracy;
  std::optional<double> macro_f1;
  std::optional<double> eer;
  std::optional<double> threshold_at_eer;
  std::size_t param_count = 0;
  std::size_t epochs_run = 0;

  // Provenance of the reducer fit: number of rows it used, whether all of
  // them belong to the fold's training portion, and optionally the rows.
  std::size_t fit_row_count = 0;
  bool fit_within_train = true;
  std::optional<std::vector<std::size_t>> fit_indices;

  // Wall-clock fields, excluded from determinism guarantees.
  std::optional<LatencyStats> inference_latency;
  std::optional<LatencyStats> transform_latency;
  double train_seconds = 0.0;
};

// One JSON object per line. Wall-clock values live under the "timing" key.
std::string to_json_line(const EvalReport& r);
EvalReport from_json_line(const std::string& line);

// Same line with the "timing" object removed.
std::string strip_timing(const std::string& line);

void write_reports(const std::vector<EvalReport>& reports, std::ostream& out);
std::vector<EvalReport> read_reports(std::istream& in);
std::vector<EvalReport> read_reports(const std::filesystem::path& path);

}  // namespace repsel::bench
