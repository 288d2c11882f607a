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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "repsel/error.hpp"
#include "repsel/metrics/scores.hpp"
#include "repsel/metrics/tsne.hpp"
#include "repsel/rng.hpp"
#include "support/oracles.hpp"

using namespace repsel;
using namespace repsel::metrics;
using repsel::testing::brute_force_eer;
using repsel::testing::random_matrix;
using repsel::testing::silhouette;

namespace {

ScoredSet random_set(Rng& rng, std::size_t n, bool coarse) {
  ScoredSet s;
  for (std::size_t i = 0; i < n; ++i) {
    s.labels.push_back(static_cast<std::uint8_t>(rng.below(2)));
    // Coarse scores force ties.
    s.scores.push_back(coarse ? double(rng.below(5)) / 4.0 : rng.uniform());
  }
  s.labels[0] = 0;
  s.labels[1] = 1;
  return s;
}

ScoredSet from_classes(const std::vector<double>& fakes, const std::vector<double>& reals) {
  ScoredSet s;
  for (double f : fakes) {
    s.scores.push_back(f);
    s.labels.push_back(1);
  }
  for (double r : reals) {
    s.scores.push_back(r);
    s.labels.push_back(0);
  }
  return s;
}

MatrixD clusters(std::size_t per, std::size_t d, double sep, std::uint64_t seed,
                 std::vector<int>* ids) {
  Rng rng(seed);
  MatrixD x(Eigen::Index(3 * per), Eigen::Index(d));
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < per; ++i) {
      const auto r = Eigen::Index(c * per + i);
      for (std::size_t j = 0; j < d; ++j) {
        x(r, Eigen::Index(j)) = rng.normal() + (j == c ? sep : 0.0);
      }
      ids->push_back(int(c));
    }
  }
  return x;
}

}  // namespace

TEST_CASE("accuracy examples") {
  CHECK(accuracy({{0.9, 0.1}, {1, 0}}) == 1.0);
  ScoredSet ties{{0.5, 0.5, 0.5, 0.5, 0.5}, {1, 0, 0, 1, 0}};
  CHECK(accuracy(ties) == doctest::Approx(3.0 / 5.0));
  CHECK(accuracy({{0.7, 0.2}, {1, 0}}, 0.8) == 0.5);
  CHECK_THROWS_AS(accuracy({}), DataError);
  CHECK_THROWS_AS(accuracy({{0.1}, {1, 0}}), DataError);
  CHECK_THROWS_AS(accuracy({{0.1}, {3}}), DataError);
}

TEST_CASE("macro F1 examples") {
  CHECK(macro_f1({{0.9, 0.1, 0.8}, {1, 0, 1}}) == 1.0);
  // TP=1, FP=1, FN=1, TN=1
  ScoredSet mixed{{0.9, 0.8, 0.1, 0.2}, {1, 0, 1, 0}};
  CHECK(macro_f1(mixed) == doctest::Approx(0.5));
  // Everything predicted fake, half the labels fake.
  ScoredSet all_fake{{0.9, 0.9, 0.9, 0.9}, {1, 1, 0, 0}};
  CHECK(macro_f1(all_fake) == doctest::Approx(1.0 / 3.0));
  // Real class absent and never predicted: its F1 is 0 by convention.
  CHECK(macro_f1({{0.9, 0.8}, {1, 1}}) == doctest::Approx(0.5));
}

TEST_CASE("EER examples and endpoints") {
  auto sep = eer(from_classes({0.9, 0.8, 0.7}, {0.1, 0.2, 0.3}));
  CHECK(sep.eer == 0.0);
  CHECK(eer(from_classes({0.1, 0.2}, {0.8, 0.9, 0.95})).eer == 1.0);
  CHECK(eer(from_classes({0.8, 0.4}, {0.6, 0.2})).eer == doctest::Approx(0.5));
  CHECK_THROWS_AS(eer(from_classes({0.1, 0.2}, {})), DataError);
  CHECK_THROWS_AS(eer(from_classes({}, {0.1})), DataError);
  // Separated: the threshold splits the classes.
  CHECK(sep.threshold >= 0.3);
  CHECK(sep.threshold < 0.7);
}

TEST_CASE("EER matches the brute-force oracle") {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_set(rng, 2 + rng.below(49), trial % 3 == 0);
    const double want = brute_force_eer(s.scores, s.labels);
    CHECK(std::abs(eer(s).eer - want) <= 1e-9);
  }
}

TEST_CASE("EER is invariant under strictly increasing transforms") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_set(rng, 30, trial % 2 == 0);
    auto t = s;
    for (auto& v : t.scores) v = std::exp(3 * v) - 7;
    CHECK(eer(s).eer == doctest::Approx(eer(t).eer).epsilon(1e-12));
  }
}

TEST_CASE("ROC: monotone, endpoints, AUC and inversion") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_set(rng, 40, trial % 2 == 0);
    const auto pts = roc(s);
    CHECK(pts.front().fpr == 0.0);
    CHECK(pts.front().tpr == 0.0);
    CHECK(pts.back().fpr == 1.0);
    CHECK(pts.back().tpr == 1.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      CHECK(pts[i].fpr >= pts[i - 1].fpr);
      CHECK(pts[i].tpr >= pts[i - 1].tpr);
    }
    const double a = auc(pts);
    CHECK((a >= 0.0 && a <= 1.0));
    auto inv = s;
    for (auto& v : inv.scores) v = -v;
    CHECK(auc(roc(inv)) == doctest::Approx(1.0 - a).epsilon(1e-12));

    // AUC equals the pairwise ranking probability (ties count one half).
    double wins = 0, pairs = 0;
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
      for (std::size_t j = 0; j < s.scores.size(); ++j) {
        if (s.labels[i] == 1 && s.labels[j] == 0) {
          pairs += 1;
          wins += s.scores[i] > s.scores[j] ? 1.0 : (s.scores[i] == s.scores[j] ? 0.5 : 0.0);
        }
      }
    }
    CHECK(a == doctest::Approx(wins / pairs).epsilon(1e-12));
  }
}

TEST_CASE("evaluate bundles the metrics") {
  Rng rng(4);
  const auto s = random_set(rng, 25, false);
  const auto r = evaluate(s);
  CHECK(r.accuracy == accuracy(s));
  CHECK(r.macro_f1 == macro_f1(s));
  CHECK(r.eer == eer(s).eer);
  CHECK(r.threshold_at_eer == eer(s).threshold);
  CHECK(r.roc_points.size() == roc(s).size());
  for (double v : {r.accuracy, r.macro_f1, r.eer}) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("t-SNE affinities sum as required") {
  Rng rng(5);
  const MatrixD x = random_matrix(rng, 40, 6);
  const MatrixD cond = conditional_affinities(x, 10.0);
  for (Eigen::Index i = 0; i < cond.rows(); ++i) {
    CHECK(std::abs(cond.row(i).sum() - 1.0) < 1e-8);
    CHECK(cond(i, i) == 0.0);
    // Perplexity of each row matches the target.
    double h = 0;
    for (Eigen::Index j = 0; j < cond.cols(); ++j) {
      if (cond(i, j) > 0) h -= cond(i, j) * std::log(cond(i, j));
    }
    CHECK(std::abs(h - std::log(10.0)) < 1e-5);
  }
  const MatrixD p = joint_affinities(cond);
  CHECK(std::abs(p.sum() - 1.0) < 1e-8);
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-15);
  const MatrixD q = student_t_affinities(random_matrix(rng, 40, 2));
  CHECK(std::abs(q.sum() - 1.0) < 1e-8);
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
  CHECK(kl_divergence(p, q) > 0.0);
}

TEST_CASE("t-SNE: separated clusters, KL trace, determinism") {
  std::vector<int> ids;
  const MatrixD x = clusters(30, 50, 10.0, 6, &ids);
  TsneConfig cfg;
  cfg.perplexity = 15;
  cfg.iterations = 500;
  cfg.seed = 3;
  const auto r = tsne(x, cfg);
  CHECK(r.embedding.rows() == 90);
  CHECK(r.embedding.cols() == 2);
  CHECK(r.kl_trace.size() == 500);
  CHECK(silhouette(r.embedding, ids) > 0.5);
  CHECK(r.kl_trace.back() < r.kl_trace[cfg.exaggeration_iterations]);
  CHECK(r.kl_trace.back() < r.kl_trace.front());
  const auto again = tsne(x, cfg);
  CHECK(again.embedding == r.embedding);
}

TEST_CASE("t-SNE: duplicated points co-locate") {
  // Exact duplicates settle at a small residual separation where the pair's
  // Q matches its P; a step of 200 oscillates that mode at this N.
  constexpr Eigen::Index kBase = 100;
  Rng rng(7);
  const MatrixD base = random_matrix(rng, kBase, 5, 3.0);
  MatrixD x(2 * kBase, 5);
  x << base, base;
  TsneConfig cfg;
  cfg.perplexity = 5;
  cfg.learning_rate = 50;
  const auto r = tsne(x, cfg);
  const VectorD lo = r.embedding.colwise().minCoeff();
  const VectorD hi = r.embedding.colwise().maxCoeff();
  const double spread = (hi - lo).norm();
  for (Eigen::Index i = 0; i < kBase; ++i) {
    CHECK((r.embedding.row(i) - r.embedding.row(i + kBase)).norm() < 0.01 * spread);
  }
}

TEST_CASE("t-SNE: argument checks and subsampling") {
  Rng rng(8);
  TsneConfig cfg;
  CHECK_THROWS_AS(tsne(random_matrix(rng, 9, 3), cfg), ConfigError);
  cfg.perplexity = 10;  // needs N > 31
  CHECK_THROWS_AS(tsne(random_matrix(rng, 30, 3), cfg), ConfigError);
  CHECK_NOTHROW(tsne(random_matrix(rng, 32, 3), TsneConfig{2, 10, 5}));

  TsneConfig sub{2, 5, 20};
  sub.max_points = 25;
  const auto r = tsne(random_matrix(rng, 60, 3), sub);
  CHECK(r.rows.size() == 25);
  CHECK(std::is_sorted(r.rows.begin(), r.rows.end()));
  CHECK(r.embedding.rows() == 25);
}
