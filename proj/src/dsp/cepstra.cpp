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

#include "repsel/dsp/cepstra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "repsel/dsp/fft.hpp"
#include "repsel/error.hpp"

namespace repsel::dsp {

namespace {

constexpr double kLogFloor = 1e-10;
constexpr int kDeltaWindow = 2;

double to_scale(double hz, FilterbankScale scale) {
  return scale == FilterbankScale::kMel ? hz_to_mel(hz) : hz;
}

double from_scale(double v, FilterbankScale scale) {
  return scale == FilterbankScale::kMel ? mel_to_hz(v) : v;
}

}  // namespace

FeatureConfig FeatureConfig::mfcc() { return FeatureConfig{}; }

FeatureConfig FeatureConfig::lfcc() {
  FeatureConfig cfg;
  cfg.deltas = false;
  cfg.scale = FilterbankScale::kLinear;
  return cfg;
}

void FeatureConfig::validate() const {
  if (frame_len == 0 || hop == 0) throw ConfigError("frame_len and hop must be positive");
  if (hop > frame_len) throw ConfigError("hop must not exceed frame_len");
  if (!is_power_of_two(n_fft) || n_fft < frame_len) {
    throw ConfigError("n_fft must be a power of two >= frame_len");
  }
  if (n_ceps == 0 || n_ceps > n_filters) {
    throw ConfigError("n_ceps must be in [1, n_filters]");
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MatrixD filterbank(const FeatureConfig& cfg, double sample_rate) {
  const std::size_t n_bins = cfg.n_fft / 2 + 1;
  const double lo = to_scale(0.0, cfg.scale);
  const double hi = to_scale(sample_rate / 2.0, cfg.scale);

  std::vector<double> edges(cfg.n_filters + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(cfg.n_filters + 1);
    edges[i] = from_scale(lo + t * (hi - lo), cfg.scale);
  }

  MatrixD bank = MatrixD::Zero(static_cast<Eigen::Index>(cfg.n_filters),
                               static_cast<Eigen::Index>(n_bins));
  for (std::size_t m = 0; m < cfg.n_filters; ++m) {
    const double left = edges[m];
    const double center = edges[m + 1];
    const double right = edges[m + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(cfg.n_fft);
      double w = 0.0;
      if (f > left && f <= center) {
        w = (f - left) / (center - left);
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      bank(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = w;
    }
  }
  return bank;
}

MatrixD dct_matrix(std::size_t n) {
  MatrixD m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
    for (std::size_t i = 0; i < n; ++i) {
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                           (2.0 * static_cast<double>(i) + 1.0) / (2.0 * nd));
    }
  }
  return m;
}

std::vector<double> hamming_window(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n - 1));
  }
  return w;
}

MatrixD frame_cepstra(const AudioClip& clip, const FeatureConfig& cfg) {
  cfg.validate();
  if (clip.samples.size() < cfg.frame_len) {
    throw DataError("clip has " + std::to_string(clip.samples.size()) +
                    " samples, shorter than one frame (" +
                    std::to_string(cfg.frame_len) + ")");
  }
  const std::size_t n_frames = 1 + (clip.samples.size() - cfg.frame_len) / cfg.hop;
  const MatrixD bank = filterbank(cfg, clip.sample_rate);
  const MatrixD dct = dct_matrix(cfg.n_filters)
                          .topRows(static_cast<Eigen::Index>(cfg.n_ceps));
  const auto window = hamming_window(cfg.frame_len);

  MatrixD out(static_cast<Eigen::Index>(n_frames), static_cast<Eigen::Index>(cfg.n_ceps));
  std::vector<double> frame(cfg.frame_len);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const std::size_t start = t * cfg.hop;
    for (std::size_t i = 0; i < cfg.frame_len; ++i) {
      frame[i] = clip.samples[start + i] * window[i];
    }
    const auto power = power_spectrum(frame, cfg.n_fft);
    const VectorD spectrum = Eigen::Map<const VectorD>(
        power.data(), static_cast<Eigen::Index>(power.size()));
    VectorD energies = bank * spectrum;
    for (auto& e : energies) e = std::log(std::max(e, kLogFloor));
    out.row(static_cast<Eigen::Index>(t)) = (dct * energies).transpose();
  }
  return out;
}

MatrixD deltas(const MatrixD& frames) {
  const Eigen::Index n = frames.rows();
  MatrixD out = MatrixD::Zero(n, frames.cols());
  double denom = 0.0;
  for (int k = 1; k <= kDeltaWindow; ++k) denom += 2.0 * k * k;
  for (Eigen::Index t = 0; t < n; ++t) {
    for (int k = 1; k <= kDeltaWindow; ++k) {
      const Eigen::Index ahead = std::min<Eigen::Index>(t + k, n - 1);
      const Eigen::Index behind = std::max<Eigen::Index>(t - k, 0);
      out.row(t) += k * (frames.row(ahead) - frames.row(behind));
    }
  }
  return out / denom;
}

MatrixD frame_features(const AudioClip& clip, const FeatureConfig& cfg) {
  MatrixD stat = frame_cepstra(clip, cfg);
  if (!cfg.deltas) return stat;
  const MatrixD d1 = deltas(stat);
  const MatrixD d2 = deltas(d1);
  MatrixD all(stat.rows(), 3 * stat.cols());
  all << stat, d1, d2;
  return all;
}

std::vector<double> extract_cepstra(const AudioClip& clip,
                                    const FeatureConfig& cfg) {
  const MatrixD feats = frame_features(clip, cfg);
  const VectorD pooled = feats.colwise().mean().transpose();
  return {pooled.data(), pooled.data() + pooled.size()};
}

}  // namespace repsel::dsp
