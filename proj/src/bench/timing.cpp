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

#include "repsel/bench/timing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "repsel/error.hpp"
#include "repsel/rng.hpp"

namespace repsel::bench {

namespace {

template <typename Fn>
LatencyStats time_calls(Fn&& call, std::size_t warmup, std::size_t runs) {
  if (runs == 0) throw ConfigError("latency measurement needs runs >= 1");
  using Clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < warmup; ++i) call();
  std::vector<double> samples;
  samples.reserve(runs);
  for (std::size_t i = 0; i < runs; ++i) {
    const auto t0 = Clock::now();
    call();
    const auto t1 = Clock::now();
    samples.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  return summarize(samples);
}

}  // namespace

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) throw DataError("percentile of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

LatencyStats summarize(const std::vector<double>& samples) {
  LatencyStats s;
  s.median = percentile(samples, 0.5);
  s.p10 = percentile(samples, 0.1);
  s.p90 = percentile(samples, 0.9);
  s.runs = samples.size();
  return s;
}

LatencyStats measure_inference(nn::DownstreamModel& model, std::span<const float> sample,
                               std::size_t warmup, std::size_t runs) {
  if (sample.size() != model.arch().input_dim) {
    throw DimensionError("latency sample width differs from the model input");
  }
  volatile double sink = 0.0;
  auto stats = time_calls([&] { sink = sink + nn::predict_one(model, sample); }, warmup, runs);
  return stats;
}

LatencyStats measure_inference(nn::DownstreamModel& model, std::size_t warmup, std::size_t runs,
                               std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> sample(model.arch().input_dim);
  for (auto& v : sample) v = static_cast<float>(rng.normal());
  return measure_inference(model, sample, warmup, runs);
}

LatencyStats measure_transform(const reduce::FittedReducer& reducer,
                               std::span<const float> sample, std::size_t warmup,
                               std::size_t runs) {
  if (sample.size() != reducer.input_dim()) {
    throw DimensionError("latency sample width differs from the reducer input");
  }
  VectorD x(static_cast<Eigen::Index>(sample.size()));
  for (std::size_t i = 0; i < sample.size(); ++i) x[static_cast<Eigen::Index>(i)] = sample[i];
  volatile double sink = 0.0;
  return time_calls([&] { sink = sink + reducer.transform_one(x)[0]; }, warmup, runs);
}

}  // namespace repsel::bench
