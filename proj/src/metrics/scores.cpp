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

#include "repsel/metrics/scores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "repsel/error.hpp"

namespace repsel::metrics {

namespace {

struct Confusion {
  double tp = 0, fp = 0, tn = 0, fn = 0;
};

Confusion confusion(const ScoredSet& s, double threshold) {
  s.validate();
  if (s.scores.empty()) throw DataError("metric on an empty score set");
  Confusion c;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    const bool predicted_fake = s.scores[i] > threshold;
    const bool fake = s.labels[i] == 1;
    if (predicted_fake && fake) c.tp += 1;
    else if (predicted_fake) c.fp += 1;
    else if (fake) c.fn += 1;
    else c.tn += 1;
  }
  return c;
}

double f1(double tp, double fp, double fn) {
  const double denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2 * tp / denom;
}

// Distinct scores ascending with per-score class counts.
struct Levels {
  std::vector<double> values;
  std::vector<double> fakes;
  std::vector<double> reals;
  double n_fake = 0;
  double n_real = 0;
};

Levels levels(const ScoredSet& s) {
  s.validate();
  std::vector<std::size_t> order(s.scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return s.scores[a] < s.scores[b]; });
  Levels lv;
  for (auto i : order) {
    if (lv.values.empty() || s.scores[i] != lv.values.back()) {
      lv.values.push_back(s.scores[i]);
      lv.fakes.push_back(0);
      lv.reals.push_back(0);
    }
    if (s.labels[i] == 1) {
      lv.fakes.back() += 1;
      lv.n_fake += 1;
    } else {
      lv.reals.back() += 1;
      lv.n_real += 1;
    }
  }
  if (lv.n_fake == 0 || lv.n_real == 0) {
    throw DataError("both classes are required for EER/ROC");
  }
  return lv;
}

}  // namespace

void ScoredSet::validate() const {
  if (scores.size() != labels.size()) {
    throw DataError("scores and labels differ in length");
  }
  for (auto l : labels) {
    if (l > 1) throw DataError("label outside {0,1}");
  }
}

double accuracy(const ScoredSet& s, double threshold) {
  const auto c = confusion(s, threshold);
  return (c.tp + c.tn) / (c.tp + c.tn + c.fp + c.fn);
}

double macro_f1(const ScoredSet& s, double threshold) {
  const auto c = confusion(s, threshold);
  // The real class counts as positive for its own F1.
  return 0.5 * (f1(c.tp, c.fp, c.fn) + f1(c.tn, c.fn, c.fp));
}

EerResult eer(const ScoredSet& s) {
  const Levels lv = levels(s);
  const std::size_t m = lv.values.size();

  // Threshold 0 is -inf (everything accepted as fake); threshold i >= 1 is
  // the i-th distinct score. FAR falls and FRR rises with the threshold.
  std::vector<double> far(m + 1);
  std::vector<double> frr(m + 1);
  far[0] = 1.0;
  frr[0] = 0.0;
  double reals_at_or_below = 0;
  double fakes_at_or_below = 0;
  for (std::size_t i = 0; i < m; ++i) {
    reals_at_or_below += lv.reals[i];
    fakes_at_or_below += lv.fakes[i];
    far[i + 1] = (lv.n_real - reals_at_or_below) / lv.n_real;
    frr[i + 1] = fakes_at_or_below / lv.n_fake;
  }
  auto threshold_at = [&](std::size_t i) {
    return i == 0 ? -std::numeric_limits<double>::infinity() : lv.values[i - 1];
  };

  for (std::size_t i = 1; i <= m; ++i) {
    const double d = far[i] - frr[i];
    if (d > 0) continue;
    if (d == 0) return {far[i], threshold_at(i)};
    const double d_prev = far[i - 1] - frr[i - 1];
    const double alpha = d_prev / (d_prev - d);
    EerResult r;
    r.eer = std::clamp(far[i - 1] + alpha * (far[i] - far[i - 1]), 0.0, 1.0);
    r.threshold = i == 1 ? lv.values[0]
                         : threshold_at(i - 1) + alpha * (threshold_at(i) - threshold_at(i - 1));
    return r;
  }
  // Unreachable: at the largest score FAR = 0 and FRR = 1.
  return {0.5, lv.values.back()};
}

std::vector<RocPoint> roc(const ScoredSet& s) {
  const Levels lv = levels(s);
  std::vector<RocPoint> points{{0.0, 0.0}};
  double tp = 0;
  double fp = 0;
  for (std::size_t i = lv.values.size(); i-- > 0;) {
    tp += lv.fakes[i];
    fp += lv.reals[i];
    points.push_back({fp / lv.n_real, tp / lv.n_fake});
  }
  return points;
}

double auc(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * 0.5 * (points[i].tpr + points[i - 1].tpr);
  }
  return area;
}

MetricReport evaluate(const ScoredSet& s, double threshold) {
  MetricReport r;
  r.accuracy = accuracy(s, threshold);
  r.macro_f1 = macro_f1(s, threshold);
  const auto e = eer(s);
  r.eer = e.eer;
  r.threshold_at_eer = e.threshold;
  r.roc_points = roc(s);
  return r;
}

}  // namespace repsel::metrics
