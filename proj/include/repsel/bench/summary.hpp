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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "repsel/bench/report.hpp"

namespace repsel::bench {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
  std::size_t n = 0;
};

// Fold statistics of one (reducer, percentage, arch) group. Failed folds are
// counted but excluded from the statistics.
struct SummaryRow {
  std::string reducer;
  double percentage = 0.0;
  std::string arch;
  std::size_t output_dim = 0;
  std::size_t folds = 0;
  std::size_t failed = 0;
  MeanStd accuracy;
  MeanStd macro_f1;
  MeanStd eer;
  std::size_t param_count = 0;
  MeanStd latency_median;
  MeanStd transform_latency_median;
  MeanStd train_seconds;
};

MeanStd mean_std(const std::vector<double>& values);

// Groups and averages over folds. Rows are ordered by reducer (identity
// first, then the canonical reducer order), arch, percentage. Throws
// DataError on an empty input.
std::vector<SummaryRow> aggregate(const std::vector<EvalReport>& reports);

// 0.9821 -> "98.21"
std::string format_percent(double fraction);
// "accuracy / macro-F1 / EER" in percent.
std::string format_table_cell(const SummaryRow& row);

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);

// Writes per-architecture CSV and SVG files into `dir`:
//   eer_<arch>      EER in percent, one column per reducer
//   accuracy_<arch> accuracy in percent
//   f1_<arch>       macro-F1 in percent
//   latency_<arch>  median inference latency in milliseconds
//   params_<arch>   trainable parameter count (bar chart)
// Output bytes depend only on `rows`. Returns the files written.
std::vector<std::filesystem::path> emit_plots(const std::vector<SummaryRow>& rows,
                                              const std::filesystem::path& dir);

}  // namespace repsel::bench
