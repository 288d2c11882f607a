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

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace repsel::metrics {

// Scores in [0, 1] with binary labels (1 = fake, the target class).
struct ScoredSet {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;

  // Throws DataError on a length mismatch or a label outside {0,1}.
  void validate() const;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct MetricReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double eer = 0.0;
  double threshold_at_eer = 0.0;
  std::vector<RocPoint> roc_points;
};

// A sample is predicted fake iff score > threshold (strict).
inline constexpr double kDefaultThreshold = 0.5;

double accuracy(const ScoredSet& s, double threshold = kDefaultThreshold);

// Unweighted mean of the fake-class and real-class F1. A class whose F1 is
// undefined (no predicted and no actual members) contributes 0.
double macro_f1(const ScoredSet& s, double threshold = kDefaultThreshold);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Equal error rate. Every distinct score is tried as a threshold; the
// false-acceptance and false-rejection curves are linearly interpolated
// between the two thresholds that bracket their crossing. Throws DataError
// unless both classes are present.
EerResult eer(const ScoredSet& s);

// (FPR, TPR) from the strictest threshold to the loosest, starting at (0,0)
// and ending at (1,1). Monotone in both coordinates.
std::vector<RocPoint> roc(const ScoredSet& s);

// Trapezoidal area under roc points.
double auc(std::span<const RocPoint> points);

MetricReport evaluate(const ScoredSet& s, double threshold = kDefaultThreshold);

}  // namespace repsel::metrics
