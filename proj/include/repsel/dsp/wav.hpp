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

#include <filesystem>
#include <vector>

namespace repsel::dsp {

struct AudioClip {
  std::vector<double> samples;  // in [-1, 1]
  double sample_rate = 16000.0;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// PCM 16-bit mono only; samples are scaled by 1/32768. Throws FormatError
// for other encodings, multi-channel data, or a truncated file.
AudioClip read_wav(const std::filesystem::path& path);

// Writes 16-bit mono PCM, clipping to [-1, 1).
void write_wav(const AudioClip& clip, const std::filesystem::path& path);

// Linear interpolation onto the target rate. Output length is
// round(len * target / source).
AudioClip resample_linear(const AudioClip& clip, double target_rate);

}  // namespace repsel::dsp
