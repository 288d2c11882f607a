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
#include <span>
#include <vector>

#include "repsel/nn/model.hpp"
#include "repsel/reduce/reducer.hpp"

namespace repsel::bench {

// Seconds per call.
struct LatencyStats {
  double median = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
  std::size_t runs = 0;
};

// Linear-interpolated percentiles of `samples` (q in [0, 1]). Throws
// DataError on an empty input.
double percentile(std::vector<double> samples, double q);
LatencyStats summarize(const std::vector<double>& samples);

// Batch-1 forward passes on `sample`: `warmup` untimed calls, then `runs`
// calls timed individually with a monotonic clock on the calling thread.
// Throws ConfigError if runs == 0.
LatencyStats measure_inference(nn::DownstreamModel& model, std::span<const float> sample,
                               std::size_t warmup, std::size_t runs);

// Same protocol on a seeded random input of the model's width.
LatencyStats measure_inference(nn::DownstreamModel& model, std::size_t warmup,
                               std::size_t runs, std::uint64_t seed = 0);

// Single-vector reducer transform, same protocol.
LatencyStats measure_transform(const reduce::FittedReducer& reducer,
                               std::span<const float> sample, std::size_t warmup,
                               std::size_t runs);

}  // namespace repsel::bench
