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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include "repsel/bench/config.hpp"
#include "repsel/bench/report.hpp"
#include "repsel/bench/sweep.hpp"
#include "repsel/bench/timing.hpp"
#include "repsel/dsp/cepstra.hpp"
#include "repsel/dsp/wav.hpp"
#include "repsel/error.hpp"
#include "repsel/metrics/scores.hpp"
#include "repsel/metrics/tsne.hpp"
#include "repsel/nn/layers.hpp"
#include "repsel/nn/model.hpp"
#include "repsel/reduce/linalg.hpp"
#include "repsel/reduce/reducer.hpp"
#include "repsel/rng.hpp"
#include "repsel/store/synthetic.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace repsel;
using repsel::testing::brute_force_eer;
using repsel::testing::check_layer_gradients;
using repsel::testing::random_matrix;
using repsel::testing::relative_error;
using repsel::testing::silhouette;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string cli_path;
fs::path work_dir;

// ---- shared fixtures --------------------------------------------------------

store::SyntheticSpec redundant_spec() {
  store::SyntheticSpec s;
  s.dim = 768;
  s.n_informative = 64;
  s.redundancy_factor = 1.0;
  s.n_per_class = 1000;
  s.seed = 2024;
  s.name = "redundant768";
  return s;
}

bench::ExperimentConfig fcn_sweep(std::vector<reduce::ReducerKind> reducers,
                                  std::vector<double> percentages, bool baseline) {
  bench::ExperimentConfig cfg;
  cfg.synthetic = redundant_spec();
  cfg.reducers = std::move(reducers);
  cfg.percentages = std::move(percentages);
  cfg.include_baseline = baseline;
  cfg.archs = {nn::ArchKind::kFcn};
  cfg.n_folds = 5;
  cfg.master_seed = 1;
  cfg.timing.enabled = false;
  return cfg;
}

// Mean EER per (reducer, percentage) over non-failed folds; records failures.
std::map<std::pair<std::string, double>, double> mean_eer(
    const std::vector<bench::EvalReport>& reports, std::size_t* failed) {
  std::map<std::pair<std::string, double>, std::pair<double, int>> acc;
  for (const auto& r : reports) {
    if (r.failed || !r.eer) {
      ++*failed;
      continue;
    }
    auto& a = acc[{r.reducer, r.percentage}];
    a.first += *r.eer;
    a.second += 1;
  }
  std::map<std::pair<std::string, double>, double> out;
  for (const auto& [key, v] : acc) out[key] = v.first / v.second;
  return out;
}

// Max |a - b| over columns after aligning signs.
double signed_column_distance(const MatrixD& a, const MatrixD& b) {
  double worst = 0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const double same = (a.col(c) - b.col(c)).cwiseAbs().maxCoeff();
    const double flip = (a.col(c) + b.col(c)).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::min(same, flip));
  }
  return worst;
}

reduce::ReducerSpec spec_of(reduce::ReducerKind kind, double p, std::uint64_t seed = 0) {
  reduce::ReducerSpec s;
  s.kind = kind;
  s.percentage = p;
  s.seed = seed;
  return s;
}

template <typename T>
void randomize(nn::Layer<T>& layer, Rng& rng) {
  for (auto* t : layer.tensors()) {
    if (!t->trainable) continue;
    for (Eigen::Index i = 0; i < t->value.size(); ++i) t->value.data()[i] = T(0.5 * rng.normal());
  }
}

// ---- criteria ---------------------------------------------------------------

Outcome redundancy_claim() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = fcn_sweep({reduce::ReducerKind::kRandomSelect}, {0.5}, true);
  const auto reports = bench::run_sweep(cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::size_t failed = 0;
  const auto eer = mean_eer(reports, &failed);
  const double half = eer.at({"random_select", 0.5});
  const double full = eer.at({"random_select", 1.0});
  const double gap = std::abs(half - full);
  return {failed == 0 && gap <= 0.02 && seconds < 600.0,
          "EER 50% " + fmt("%.4f", half) + " vs 100% " + fmt("%.4f", full) + ", gap " +
              fmt("%.4f", gap) + ", " + fmt("%.0f", seconds) + " s, failed cells " +
              std::to_string(failed)};
}

Outcome baseline_direction() {
  using reduce::ReducerKind;
  const auto cfg = fcn_sweep({ReducerKind::kRandomSelect, ReducerKind::kPca, ReducerKind::kSvd,
                              ReducerKind::kKpca, ReducerKind::kGrp},
                             {0.1, 0.2}, false);
  const auto reports = bench::run_sweep(cfg);
  bool dims_ok = true;
  for (const auto& r : reports) {
    dims_ok = dims_ok && r.output_dim == std::size_t(std::lround(r.percentage * 768.0));
  }
  std::size_t failed = 0;
  const auto eer = mean_eer(reports, &failed);
  bool ok = dims_ok && failed == 0 && reports.size() == cfg.grid_size();
  std::string detail;
  for (double p : {0.1, 0.2}) {
    double best = 1.0;
    std::string best_name;
    for (const char* name : {"pca", "svd", "kpca", "grp"}) {
      const auto it = eer.find({name, p});
      if (it != eer.end() && it->second < best) {
        best = it->second;
        best_name = name;
      }
    }
    const double rs = eer.count({"random_select", p}) ? eer.at({"random_select", p}) : 1.0;
    ok = ok && rs - best <= 0.03;
    detail += fmt("p=%.1f", p) + " random_select " + fmt("%.4f", rs) + " best " + best_name + " " +
              fmt("%.4f", best) + "; ";
  }
  detail += dims_ok ? "dims exact" : "dims WRONG";
  detail += ", failed cells " + std::to_string(failed);
  return {ok, detail};
}

Outcome parameter_halving() {
  nn::ArchSpec a;
  a.input_dim = 768;
  const std::size_t full = nn::count_params(a);
  a.input_dim = 384;
  const std::size_t half = nn::count_params(a);
  const auto built = nn::count_params(nn::build(a, 0));
  const double ratio = double(half) / double(full);
  return {full == 394241 && half == 197633 && built == half && ratio <= 0.51,
          "k=768 " + std::to_string(full) + ", k=384 " + std::to_string(half) + ", ratio " +
              fmt("%.4f", ratio)};
}

Outcome oracle_equivalence() {
  Rng rng(404);
  double pca_worst = 0, svd_worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = Eigen::Index(2 + rng.below(9));
    const auto d = Eigen::Index(1 + rng.below(6));
    const MatrixD a = random_matrix(rng, n, d);

    // Oracle: covariance by explicit sums, Eigen's self-adjoint solver.
    VectorD mean = VectorD::Zero(d);
    for (Eigen::Index i = 0; i < n; ++i) mean += a.row(i).transpose() / double(n);
    MatrixD cov = MatrixD::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      const VectorD c = a.row(i).transpose() - mean;
      cov += c * c.transpose() / double(n - 1);
    }
    Eigen::SelfAdjointEigenSolver<MatrixD> oracle(cov);
    const VectorD values = oracle.eigenvalues().reverse();
    const MatrixD vectors = oracle.eigenvectors().rowwise().reverse();

    const auto r = reduce::fit(spec_of(reduce::ReducerKind::kPca, 1.0), a);
    const auto& p = r.as<reduce::PcaParams>();
    pca_worst = std::max(pca_worst, (p.explained_variance - values).cwiseAbs().maxCoeff());
    pca_worst = std::max(pca_worst, (p.mean - mean).cwiseAbs().maxCoeff());
    // Components are compared one by one where the eigenvalue is simple; a
    // repeated eigenvalue (the null space when n <= d) only fixes its span.
    const double tie = 1e-8 * std::max(1.0, values(0));
    for (Eigen::Index c = 0; c < d;) {
      Eigen::Index e = c + 1;
      while (e < d && values(e - 1) - values(e) < tie) ++e;
      if (e - c == 1) {
        pca_worst = std::max(pca_worst, signed_column_distance(vectors.col(c), p.components.col(c)));
      } else {
        const MatrixD want = vectors.middleCols(c, e - c);
        const MatrixD got = p.components.middleCols(c, e - c);
        pca_worst = std::max(pca_worst, (want * want.transpose() - got * got.transpose())
                                            .cwiseAbs().maxCoeff());
      }
      c = e;
    }

    const auto s = reduce::svd_thin(a);
    const double err = (s.u * s.s.asDiagonal() * s.v.transpose() - a).norm();
    svd_worst = std::max(svd_worst, err / std::max(a.norm(), 1e-300));
  }

  std::size_t dominated = 0;
  const MatrixD a = random_matrix(rng, 40, 12);
  const auto r = reduce::fit(spec_of(reduce::ReducerKind::kSvd, 4.0 / 12.0), a);
  const MatrixD& v = r.as<reduce::SvdParams>().components;
  const double svd_err = (a - a * v * v.transpose()).norm();
  for (int trial = 0; trial < 100; ++trial) {
    const MatrixD q = Eigen::HouseholderQR<MatrixD>(random_matrix(rng, 12, 4)).householderQ() *
                      MatrixD::Identity(12, 4);
    dominated += svd_err <= (a - a * q * q.transpose()).norm() ? 1 : 0;
  }
  return {pca_worst < 1e-6 && svd_worst <= 1e-6 && dominated == 100,
          "pca max dev " + fmt("%.2e", pca_worst) + ", svd rel recon " + fmt("%.2e", svd_worst) +
              ", Eckart-Young " + std::to_string(dominated) + "/100"};
}

Outcome kpca_linear() {
  Rng rng(505);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = Eigen::Index(10 + rng.below(21));
    const auto d = Eigen::Index(3 + rng.below(4));
    const MatrixD a = random_matrix(rng, n, d);
    auto ks = spec_of(reduce::ReducerKind::kKpca, 0.6);
    ks.kernel = reduce::KernelKind::kLinear;
    const auto kp = reduce::fit(ks, a);
    const auto pc = reduce::fit(spec_of(reduce::ReducerKind::kPca, 0.6), a);
    worst = std::max(worst, signed_column_distance(pc.transform(a), kp.transform(a)));
    const MatrixD fresh = random_matrix(rng, 4, d);
    worst = std::max(worst, signed_column_distance(pc.transform(fresh), kp.transform(fresh)));
  }
  return {worst < 1e-5, "max score deviation " + fmt("%.2e", worst) + " over 20 datasets"};
}

Outcome gradients() {
  using Md = nn::Mat<double>;
  constexpr double kTol = 1e-4;
  Rng rng(606);
  std::map<std::string, double> worst;
  auto note = [&](const std::string& layer, const testing::GradCheck& g) {
    worst[layer] = std::max({worst[layer], g.input_error, g.param_error});
  };
  for (int trial = 0; trial < 20; ++trial) {
    {
      const auto in = 1 + rng.below(6), out = 1 + rng.below(5), batch = 1 + rng.below(4);
      nn::Dense<double> layer(in, out);
      randomize(layer, rng);
      note("dense", check_layer_gradients(layer, random_matrix(rng, Eigen::Index(batch), Eigen::Index(in)), rng));
    }
    {
      const auto cin = 1 + rng.below(3), cout = 1 + rng.below(3), length = 2 + rng.below(7);
      const std::size_t kernel = 1 + 2 * rng.below(3);
      nn::Conv1d<double> layer(cin, cout, kernel, length);
      randomize(layer, rng);
      const auto batch = 1 + rng.below(3);
      note("conv1d", check_layer_gradients(
                         layer, random_matrix(rng, Eigen::Index(batch), Eigen::Index(cin * length)), rng));
    }
    {
      const auto ch = 1 + rng.below(3), pool = 2 + rng.below(2);
      const auto length = pool * (1 + rng.below(4)) + rng.below(pool);
      nn::MaxPool1d<double> layer(ch, length, pool);
      note("maxpool", check_layer_gradients(
                          layer, random_matrix(rng, Eigen::Index(1 + rng.below(3)), Eigen::Index(ch * length)), rng));
    }
    {
      // Two rows normalise to +-1 whatever the input, leaving an O(eps) input
      // gradient that a difference quotient cannot resolve; use three or more.
      const auto ch = 1 + rng.below(3), length = 1 + rng.below(4), batch = 3 + rng.below(4);
      nn::BatchNorm1d<double> layer(ch, length);
      randomize(layer, rng);
      const Md x = random_matrix(rng, Eigen::Index(batch), Eigen::Index(ch * length), 2.0);
      note("batchnorm", check_layer_gradients(layer, x, rng, nn::Mode::kTrain));
      note("batchnorm", check_layer_gradients(layer, x, rng, nn::Mode::kInference));
    }
    {
      const auto n = 1 + rng.below(8);
      const Md logits = random_matrix(rng, Eigen::Index(n), 1, 3.0);
      std::vector<double> y(n);
      for (auto& v : y) v = double(rng.below(2));
      Md grad;
      nn::bce_with_logits<double>(logits, y, &grad);
      Md numeric(logits.rows(), 1);
      const double h = 1e-6;
      for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Md lp = logits, lm = logits;
        lp(i, 0) += h;
        lm(i, 0) -= h;
        numeric(i, 0) = (nn::bce_with_logits<double>(lp, y, nullptr) -
                         nn::bce_with_logits<double>(lm, y, nullptr)) / (2 * h);
      }
      worst["sigmoid+bce"] = std::max(worst["sigmoid+bce"], relative_error(grad, numeric));
    }
  }
  bool ok = true;
  std::string detail;
  for (const auto& [layer, err] : worst) {
    ok = ok && err < kTol;
    detail += layer + " " + fmt("%.1e", err) + " ";
  }
  detail.pop_back();
  return {ok, detail};
}

Outcome eer_oracle() {
  Rng rng(707);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    metrics::ScoredSet s;
    const std::size_t n = 2 + rng.below(49);
    const bool coarse = trial % 3 == 0;  // forces ties
    for (std::size_t i = 0; i < n; ++i) {
      s.labels.push_back(std::uint8_t(rng.below(2)));
      s.scores.push_back(coarse ? double(rng.below(5)) / 4.0 : rng.uniform());
    }
    s.labels[0] = 0;
    s.labels[1] = 1;
    worst = std::max(worst, std::abs(metrics::eer(s).eer - brute_force_eer(s.scores, s.labels)));
  }
  const metrics::ScoredSet separated{{0.9, 0.8, 0.7, 0.1, 0.2, 0.3}, {1, 1, 1, 0, 0, 0}};
  const metrics::ScoredSet inverted{{0.1, 0.2, 0.3, 0.9, 0.8, 0.7}, {1, 1, 1, 0, 0, 0}};
  const double e0 = metrics::eer(separated).eer;
  const double e1 = metrics::eer(inverted).eer;
  return {worst <= 1e-9 && e0 == 0.0 && e1 == 1.0,
          "max deviation " + fmt("%.1e", worst) + " over 1000 sets, separated " + fmt("%g", e0) +
              ", inverted " + fmt("%g", e1)};
}

Outcome jl_property() {
  const double eps = 0.3;
  const auto k_min = std::size_t(std::ceil(8.0 * std::log(100.0) / (eps * eps)));
  const std::size_t d = 1000;
  Rng rng(808);
  const MatrixD x = random_matrix(rng, 100, Eigen::Index(d));
  const auto r = reduce::fit(spec_of(reduce::ReducerKind::kGrp, double(k_min) / double(d), 8), x);
  const MatrixD y = r.transform(x);
  std::size_t ok = 0, total = 0;
  for (Eigen::Index i = 0; i < 100; ++i) {
    for (Eigen::Index j = i + 1; j < 100; ++j) {
      const double before = (x.row(i) - x.row(j)).squaredNorm();
      const double after = (y.row(i) - y.row(j)).squaredNorm();
      ok += (after >= (1 - eps) * before && after <= (1 + eps) * before) ? 1 : 0;
      ++total;
    }
  }
  const double frac = double(ok) / double(total);
  return {r.output_dim() >= k_min && frac >= 0.99,
          "k=" + std::to_string(r.output_dim()) + " (min " + std::to_string(k_min) + "), " +
              fmt("%.4f", frac) + " of pairs within 1+-0.3"};
}

std::vector<std::string> read_stripped(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(bench::strip_timing(line));
  }
  return lines;
}

Outcome determinism() {
  const fs::path dir = work_dir / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "exp.json");
    cfg << R"({
  "dataset": {"synthetic": {"n_per_class": 60, "dim": 48, "n_informative": 8, "seed": 3}},
  "percentages": [0.25, 0.5],
  "n_folds": 3,
  "master_seed": 17,
  "train": {"epochs": 4, "learning_rate": 0.001},
  "model": {"hidden": 32},
  "timing": {"warmup": 1, "runs": 5}
})";
  }
  std::string detail;
  for (const char* run : {"a", "b"}) {
    const std::string cmd = "\"" + cli_path + "\" sweep --config \"" + (dir / "exp.json").string() +
                            "\" --out \"" + (dir / run).string() + "\" --quiet";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return {false, std::string("sweep run ") + run + " exited with " + std::to_string(rc)};
  }
  const auto a = read_stripped(dir / "a" / "reports.jsonl");
  const auto b = read_stripped(dir / "b" / "reports.jsonl");
  const bool reports_equal = !a.empty() && a == b && a.size() == 5 * 3 * 2 * 3;

  bool indices_equal = true;
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const MatrixD x = MatrixD::Zero(4, 768);
    const auto r1 = reduce::fit(spec_of(reduce::ReducerKind::kRandomSelect, 0.5, seed), x);
    const auto r2 = reduce::fit(spec_of(reduce::ReducerKind::kRandomSelect, 0.5, seed), x);
    indices_equal = indices_equal && r1.as<reduce::SelectionParams>().indices ==
                                         r2.as<reduce::SelectionParams>().indices;
  }
  return {reports_equal && indices_equal,
          std::to_string(a.size()) + " report lines, " + (reports_equal ? "identical" : "DIFFERENT") +
              " modulo timing; random_select indices " + (indices_equal ? "identical" : "DIFFERENT")};
}

Outcome feature_dims() {
  std::vector<dsp::AudioClip> clips;
  Rng rng(1010);
  for (std::size_t n : {400u, 16000u, 64000u}) {
    dsp::AudioClip c;
    for (std::size_t i = 0; i < n; ++i) c.samples.push_back(0.1 * rng.normal());
    clips.push_back(c);
  }
  dsp::AudioClip tone;
  for (int i = 0; i < 16000; ++i) tone.samples.push_back(0.5 * std::sin(2 * std::numbers::pi * 440.0 * i / 16000.0));
  clips.push_back(tone);
  dsp::AudioClip silence;
  silence.samples.assign(8000, 0.0);
  clips.push_back(silence);
  // A 44.1 kHz file through the WAV reader and the resampler.
  dsp::AudioClip hi_rate;
  hi_rate.sample_rate = 44100.0;
  for (int i = 0; i < 44100; ++i) hi_rate.samples.push_back(0.2 * rng.normal());
  const fs::path wav = work_dir / "clip44k.wav";
  dsp::write_wav(hi_rate, wav);
  clips.push_back(dsp::read_wav(wav));
  clips.push_back(dsp::resample_linear(clips.back(), 16000.0));

  bool ok = true;
  for (const auto& c : clips) {
    const auto m = dsp::extract_cepstra(c, dsp::FeatureConfig::mfcc());
    const auto l = dsp::extract_cepstra(c, dsp::FeatureConfig::lfcc());
    ok = ok && m.size() == 39 && l.size() == 13;
    for (double v : m) ok = ok && std::isfinite(v);
    for (double v : l) ok = ok && std::isfinite(v);
  }
  double dct_err = 0;
  for (std::size_t n : {13u, 26u, 40u}) {
    const MatrixD d = dsp::dct_matrix(n);
    dct_err = std::max(dct_err, (d * d.transpose() - MatrixD::Identity(Eigen::Index(n), Eigen::Index(n)))
                                    .cwiseAbs().maxCoeff());
  }
  return {ok && dct_err < 1e-10, std::to_string(clips.size()) + " clips give 39/13 dims: " +
                                     (ok ? "yes" : "NO") + ", DCT orthonormality " + fmt("%.1e", dct_err)};
}

Outcome latency_direction() {
  nn::ArchSpec a;
  a.input_dim = 768;
  auto big = nn::build(a, 11);
  a.input_dim = 384;
  auto small = nn::build(a, 11);
  const auto t_big = bench::measure_inference(big, 10, 1000, 1);
  const auto t_small = bench::measure_inference(small, 10, 1000, 1);
  return {t_small.median < t_big.median,
          "median k=384 " + fmt("%.2f", t_small.median * 1e6) + " us, k=768 " +
              fmt("%.2f", t_big.median * 1e6) + " us over 1000 runs"};
}

Outcome tsne_fixture() {
  // Three clusters in 50 dimensions, default optimiser settings.
  Rng rng(1212);
  constexpr std::size_t kPer = 50;
  MatrixD x(3 * kPer, 50);
  std::vector<int> ids;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < kPer; ++i) {
      const auto r = Eigen::Index(c * kPer + i);
      for (Eigen::Index j = 0; j < 50; ++j) x(r, j) = rng.normal() + (j == Eigen::Index(c) ? 10.0 : 0.0);
      ids.push_back(int(c));
    }
  }
  metrics::TsneConfig cfg;
  cfg.seed = 1;
  const auto clusters = metrics::tsne(x, cfg);
  const double sil = silhouette(clusters.embedding, ids);

  // Duplicated cloud: every point appears twice.
  constexpr Eigen::Index kBase = 100;
  const MatrixD base = random_matrix(rng, kBase, 5, 3.0);
  MatrixD dup(2 * kBase, 5);
  dup << base, base;
  metrics::TsneConfig dcfg;
  dcfg.perplexity = 5;
  dcfg.learning_rate = 50;
  dcfg.seed = 2;
  const auto d = metrics::tsne(dup, dcfg);
  const double spread = (d.embedding.colwise().maxCoeff() - d.embedding.colwise().minCoeff()).norm();
  double worst = 0;
  for (Eigen::Index i = 0; i < kBase; ++i) {
    worst = std::max(worst, (d.embedding.row(i) - d.embedding.row(i + kBase)).norm());
  }
  return {sil > 0.5 && worst < 0.01 * spread,
          "silhouette " + fmt("%.3f", sil) + ", worst duplicate gap " +
              fmt("%.4f", worst / spread * 100) + "% of spread"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repsel acceptance checks"};
  std::vector<int> only;
  app.add_option("--cli", cli_path, "path to the repsel executable")->required();
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  std::string work = (fs::temp_directory_path() / "repsel_acceptance").string();
  app.add_option("--work-dir", work, "scratch directory");
  CLI11_PARSE(app, argc, argv);
  work_dir = work;
  fs::create_directories(work_dir);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"redundancy claim: random_select 50% vs 100% baseline (FCN, 5 folds)", redundancy_claim},
      {"baseline direction at 10-20% and output dims", baseline_direction},
      {"parameter halving", parameter_halving},
      {"PCA / SVD oracle equivalence and Eckart-Young", oracle_equivalence},
      {"KPCA linear kernel equals PCA", kpca_linear},
      {"finite-difference gradients", gradients},
      {"EER oracle and endpoints", eer_oracle},
      {"Johnson-Lindenstrauss property of GRP", jl_property},
      {"sweep determinism via CLI", determinism},
      {"MFCC 39 / LFCC 13 dims and DCT orthonormality", feature_dims},
      {"latency direction k=384 < k=768", latency_direction},
      {"t-SNE clusters and duplicates", tsne_fixture},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failures += out.pass ? 0 : 1;
    std::printf("%s [%d] %s: %s\n", out.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
