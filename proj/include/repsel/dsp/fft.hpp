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

#include <complex>
#include <span>
#include <vector>

namespace repsel::dsp {

// In-place iterative radix-2 FFT. Size must be a power of two.
void fft(std::span<std::complex<double>> data);

// |X[k]|^2 for k in [0, n_fft/2] of the zero-padded frame.
std::vector<double> power_spectrum(std::span<const double> frame,
                                   std::size_t n_fft);

bool is_power_of_two(std::size_t n);

}  // namespace repsel::dsp
