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
#include <vector>

#include "repsel/dsp/wav.hpp"
#include "repsel/types.hpp"

namespace repsel::dsp {

enum class FilterbankScale { kMel, kLinear };

struct FeatureConfig {
  std::size_t frame_len = 400;  // 25 ms at 16 kHz
  std::size_t hop = 160;
  std::size_t n_fft = 512;
  std::size_t n_filters = 26;
  std::size_t n_ceps = 13;
  bool deltas = true;
  FilterbankScale scale = FilterbankScale::kMel;

  // 13 static + delta + delta-delta, mel filterbank: 39 dims.
  static FeatureConfig mfcc();
  // 13 static, linear filterbank: 13 dims.
  static FeatureConfig lfcc();

  std::size_t output_dim() const { return deltas ? 3 * n_ceps : n_ceps; }
  void validate() const;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// n_filters x (n_fft/2 + 1) triangular weights. Edges are evenly spaced on
// the chosen scale between 0 Hz and Nyquist.
MatrixD filterbank(const FeatureConfig& cfg, double sample_rate);

// Orthonormal DCT-II, n x n (row k is basis function k).
MatrixD dct_matrix(std::size_t n);

std::vector<double> hamming_window(std::size_t n);

// Per-frame static cepstra, frames x n_ceps.
MatrixD frame_cepstra(const AudioClip& clip, const FeatureConfig& cfg);

// Regression deltas over +-2 frames with edge replication.
MatrixD deltas(const MatrixD& frames);

// Frame features (static, plus deltas when configured) before pooling.
MatrixD frame_features(const AudioClip& clip, const FeatureConfig& cfg);

// Clip-level vector: frame features averaged over time. Throws DataError
// if the clip is shorter than one frame.
std::vector<double> extract_cepstra(const AudioClip& clip,
                                    const FeatureConfig& cfg);

}  // namespace repsel::dsp
