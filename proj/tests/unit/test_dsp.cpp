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

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "repsel/dsp/cepstra.hpp"
#include "repsel/dsp/fft.hpp"
#include "repsel/dsp/wav.hpp"
#include "repsel/error.hpp"
#include "repsel/rng.hpp"

namespace fs = std::filesystem;
using namespace repsel;
using namespace repsel::dsp;
using cd = std::complex<double>;

namespace {

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "repsel_unit_dsp";
  fs::create_directories(dir);
  return dir / name;
}

void put16(std::ofstream& o, std::uint16_t v) {
  o.put(static_cast<char>(v & 0xFF));
  o.put(static_cast<char>(v >> 8));
}
void put32(std::ofstream& o, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) o.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

// Hand-rolled RIFF writer so the reader is not only tested against its own
// writer. An extra LIST chunk precedes "data".
void write_pcm(const fs::path& p, const std::vector<std::int16_t>& pcm, std::uint32_t rate,
               std::uint16_t channels = 1, std::uint16_t bits = 16, std::uint16_t format = 1,
               bool truncate = false) {
  std::ofstream o(p, std::ios::binary);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(pcm.size() * 2);
  o.write("RIFF", 4);
  put32(o, 36 + 12 + data_bytes);
  o.write("WAVE", 4);
  o.write("fmt ", 4);
  put32(o, 16);
  put16(o, format);
  put16(o, channels);
  put32(o, rate);
  put32(o, rate * channels * bits / 8);
  put16(o, static_cast<std::uint16_t>(channels * bits / 8));
  put16(o, bits);
  o.write("LIST", 4);
  put32(o, 4);
  o.write("INFO", 4);
  o.write("data", 4);
  put32(o, data_bytes);
  const std::size_t n = truncate ? pcm.size() / 2 : pcm.size();
  for (std::size_t i = 0; i < n; ++i) put16(o, static_cast<std::uint16_t>(pcm[i]));
}

std::vector<cd> naive_dft(const std::vector<cd>& x) {
  const std::size_t n = x.size();
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd acc = 0;
    for (std::size_t t = 0; t < n; ++t) {
      acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * t % n) / double(n));
    }
    out[k] = acc;
  }
  return out;
}

AudioClip tone(double freq, double rate, std::size_t n, double amp = 0.5) {
  AudioClip c;
  c.sample_rate = rate;
  c.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.samples[i] = amp * std::sin(2 * std::numbers::pi * freq * double(i) / rate);
  }
  return c;
}

AudioClip noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  AudioClip c;
  c.samples.resize(n);
  for (auto& s : c.samples) s = 0.1 * rng.normal();
  return c;
}

}  // namespace

TEST_CASE("read_wav: four seconds at 16 kHz, scaling, zeros") {
  std::vector<std::int16_t> pcm(64000, 0);
  pcm[1] = 16384;
  pcm[2] = -32768;
  const auto p = temp_path("four.wav");
  write_pcm(p, pcm, 16000);
  const auto clip = read_wav(p);
  CHECK(clip.samples.size() == 64000);
  CHECK(clip.sample_rate == 16000.0);
  CHECK(clip.duration() == doctest::Approx(4.0));
  CHECK(clip.samples[1] == 0.5);
  CHECK(clip.samples[2] == -1.0);
  CHECK(clip.samples[0] == 0.0);

  write_pcm(p, std::vector<std::int16_t>(100, 0), 16000);
  for (double s : read_wav(p).samples) CHECK(s == 0.0);
}

TEST_CASE("read_wav: keeps the source rate") {
  const auto p = temp_path("r22.wav");
  write_pcm(p, std::vector<std::int16_t>(22050, 3), 22050);
  const auto clip = read_wav(p);
  CHECK(clip.sample_rate == 22050.0);
  CHECK(clip.duration() == doctest::Approx(1.0));
}

TEST_CASE("read_wav: rejects unsupported or broken files") {
  const auto p = temp_path("bad.wav");
  std::vector<std::int16_t> pcm(200, 1);
  write_pcm(p, pcm, 16000, 2);
  CHECK_THROWS_AS(read_wav(p), FormatError);
  write_pcm(p, pcm, 16000, 1, 16, 3);
  CHECK_THROWS_AS(read_wav(p), FormatError);
  write_pcm(p, pcm, 16000, 1, 8);
  CHECK_THROWS_AS(read_wav(p), FormatError);
  write_pcm(p, pcm, 16000, 1, 16, 1, true);
  CHECK_THROWS_AS(read_wav(p), FormatError);
  {
    std::ofstream o(p, std::ios::binary);
    o << "RIFX0000";
  }
  CHECK_THROWS_AS(read_wav(p), FormatError);
}

TEST_CASE("write_wav then read_wav quantises to 16 bits") {
  auto clip = noise(1000, 2);
  clip.samples[0] = 2.0;  // clipped on write
  const auto p = temp_path("rt.wav");
  write_wav(clip, p);
  const auto back = read_wav(p);
  REQUIRE(back.samples.size() == clip.samples.size());
  CHECK(back.samples[0] == doctest::Approx(32767.0 / 32768.0));
  for (std::size_t i = 1; i < clip.samples.size(); ++i) {
    CHECK(std::abs(back.samples[i] - clip.samples[i]) <= 1.0 / 32768.0);
  }
}

TEST_CASE("resample_linear: identity, constants, lengths, errors") {
  const auto clip = noise(500, 4);
  CHECK(resample_linear(clip, 16000).samples == clip.samples);

  AudioClip c;
  c.sample_rate = 22050;
  c.samples.assign(22050 * 2, 0.25);
  const auto r = resample_linear(c, 16000);
  CHECK(r.sample_rate == 16000);
  CHECK(r.samples.size() == 32000);
  for (double s : r.samples) CHECK(s == doctest::Approx(0.25));

  c.samples.assign(1001, 0.0);
  CHECK(resample_linear(c, 16000).samples.size() ==
        static_cast<std::size_t>(std::llround(1001.0 * 16000.0 / 22050.0)));

  CHECK_THROWS_AS(resample_linear(c, 0), ConfigError);
  AudioClip empty;
  CHECK_THROWS_AS(resample_linear(empty, 8000), DataError);
}

TEST_CASE("resample_linear: 1 kHz tone stays at 1 kHz") {
  const auto src = tone(1000.0, 22050.0, 22050);
  const auto dst = resample_linear(src, 16000.0);
  const std::size_t n = 8192;
  std::vector<double> frame(dst.samples.begin(), dst.samples.begin() + n);
  const auto power = power_spectrum(frame, n);
  std::size_t peak = 1;
  for (std::size_t k = 1; k < power.size(); ++k) {
    if (power[k] > power[peak]) peak = k;
  }
  const double expected_bin = 1000.0 * double(n) / 16000.0;  // 512
  CHECK(std::abs(double(peak) - expected_bin) <= 1.0);
}

TEST_CASE("fft agrees with a direct DFT and rejects non powers of two") {
  Rng rng(1);
  for (std::size_t n : {1u, 2u, 4u, 8u, 64u, 256u}) {
    std::vector<cd> x(n);
    for (auto& v : x) v = {rng.normal(), rng.normal()};
    const auto want = naive_dft(x);
    auto got = x;
    fft(got);
    double err = 0, scale = 0;
    for (std::size_t k = 0; k < n; ++k) {
      err = std::max(err, std::abs(got[k] - want[k]));
      scale = std::max(scale, std::abs(want[k]));
    }
    CHECK(err <= 1e-10 * std::max(1.0, scale));
  }
  std::vector<cd> bad(12);
  CHECK_THROWS_AS(fft(bad), ConfigError);
  CHECK(is_power_of_two(512));
  CHECK_FALSE(is_power_of_two(400));
  CHECK_FALSE(is_power_of_two(0));
}

TEST_CASE("fft: Parseval on random frames, flat impulse response") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = std::size_t{1} << (3 + trial % 8);
    std::vector<cd> x(n);
    double time_energy = 0;
    for (auto& v : x) {
      v = {rng.normal(), 0.0};
      time_energy += std::norm(v);
    }
    fft(x);
    double freq_energy = 0;
    for (auto& v : x) freq_energy += std::norm(v);
    CHECK(std::abs(freq_energy / double(n) - time_energy) <= 1e-8 * time_energy);
  }
  std::vector<cd> impulse(128, 0.0);
  impulse[0] = 1.0;
  fft(impulse);
  for (auto& v : impulse) CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
}

TEST_CASE("power_spectrum zero-pads the frame") {
  std::vector<double> frame{1.0, 0.0, 0.0};
  const auto p = power_spectrum(frame, 8);
  REQUIRE(p.size() == 5);
  for (double v : p) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("dct matrix is orthonormal and matches the DCT-II formula") {
  for (std::size_t n : {2u, 13u, 26u, 40u}) {
    const MatrixD m = dct_matrix(n);
    const MatrixD g = m * m.transpose();
    const double err = (g - MatrixD::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
    CHECK(err < 1e-10);
  }
  const MatrixD m = dct_matrix(8);
  for (int k = 0; k < 8; ++k) {
    for (int i = 0; i < 8; ++i) {
      const double s = k == 0 ? std::sqrt(1.0 / 8) : std::sqrt(2.0 / 8);
      CHECK(m(k, i) == doctest::Approx(s * std::cos(std::numbers::pi * k * (2 * i + 1) / 16.0)));
    }
  }
}

TEST_CASE("mel scale round trip") {
  CHECK(hz_to_mel(0.0) == 0.0);
  CHECK(hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
  for (double f : {10.0, 440.0, 1000.0, 8000.0}) CHECK(mel_to_hz(hz_to_mel(f)) == doctest::Approx(f));
}

TEST_CASE("filterbanks: nonnegative, unimodal, increasing centres") {
  for (auto cfg : {FeatureConfig::mfcc(), FeatureConfig::lfcc()}) {
    const MatrixD fb = filterbank(cfg, 16000.0);
    REQUIRE(fb.rows() == static_cast<Eigen::Index>(cfg.n_filters));
    REQUIRE(fb.cols() == static_cast<Eigen::Index>(cfg.n_fft / 2 + 1));
    CHECK(fb.minCoeff() >= 0.0);
    double last_centre = -1;
    for (Eigen::Index r = 0; r < fb.rows(); ++r) {
      Eigen::Index peak;
      fb.row(r).maxCoeff(&peak);
      CHECK(fb(r, peak) > 0.0);
      for (Eigen::Index c = 1; c <= peak; ++c) CHECK(fb(r, c) >= fb(r, c - 1) - 1e-15);
      for (Eigen::Index c = peak + 1; c < fb.cols(); ++c) CHECK(fb(r, c) <= fb(r, c - 1) + 1e-15);
      double centre = 0, mass = 0;
      for (Eigen::Index c = 0; c < fb.cols(); ++c) {
        centre += double(c) * fb(r, c);
        mass += fb(r, c);
      }
      centre /= mass;
      CHECK(centre > last_centre);
      last_centre = centre;
    }
  }
}

TEST_CASE("linear filterbank spacing is uniform, mel spacing widens") {
  const MatrixD lin = filterbank(FeatureConfig::lfcc(), 16000.0);
  const MatrixD mel = filterbank(FeatureConfig::mfcc(), 16000.0);
  auto support = [](const MatrixD& fb, Eigen::Index r) {
    return double((fb.row(r).array() > 0).count());
  };
  CHECK(std::abs(support(lin, 1) - support(lin, 20)) <= 2.0);
  CHECK(support(mel, 22) > 2.0 * support(mel, 2));
}

TEST_CASE("feature dims: MFCC 39, LFCC 13") {
  const auto clip = noise(16000, 9);
  CHECK(extract_cepstra(clip, FeatureConfig::mfcc()).size() == 39);
  CHECK(extract_cepstra(clip, FeatureConfig::lfcc()).size() == 13);
  const auto shortest = noise(400, 1);
  CHECK(extract_cepstra(shortest, FeatureConfig::mfcc()).size() == 39);
  CHECK(frame_cepstra(shortest, FeatureConfig::mfcc()).rows() == 1);
  const auto too_short = noise(399, 1);
  CHECK_THROWS_AS(extract_cepstra(too_short, FeatureConfig::mfcc()), DataError);
}

TEST_CASE("frame count and determinism") {
  const auto clip = noise(16000, 3);
  const auto cfg = FeatureConfig::mfcc();
  CHECK(frame_cepstra(clip, cfg).rows() == 1 + (16000 - 400) / 160);
  CHECK(extract_cepstra(clip, cfg) == extract_cepstra(clip, cfg));
}

TEST_CASE("constant signal: delta blocks vanish") {
  AudioClip c;
  c.samples.assign(8000, 0.3);
  const auto v = extract_cepstra(c, FeatureConfig::mfcc());
  for (std::size_t i = 13; i < 39; ++i) CHECK(std::abs(v[i]) < 1e-6);
  bool any_static = false;
  for (std::size_t i = 0; i < 13; ++i) any_static = any_static || std::abs(v[i]) > 1e-3;
  CHECK(any_static);
}

TEST_CASE("silence hits the log floor instead of -inf") {
  AudioClip c;
  c.samples.assign(1600, 0.0);
  for (double v : extract_cepstra(c, FeatureConfig::lfcc())) CHECK(std::isfinite(v));
}

TEST_CASE("deltas of a linear ramp equal its slope away from the edges") {
  MatrixD frames(9, 2);
  for (int t = 0; t < 9; ++t) {
    frames(t, 0) = 3.0 * t;
    frames(t, 1) = 5.0;
  }
  const MatrixD d = deltas(frames);
  for (int t = 2; t < 7; ++t) {
    CHECK(d(t, 0) == doctest::Approx(3.0));
    CHECK(d(t, 1) == doctest::Approx(0.0));
  }
}

TEST_CASE("config validation") {
  auto cfg = FeatureConfig::mfcc();
  cfg.hop = 500;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = FeatureConfig::mfcc();
  cfg.n_ceps = 30;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = FeatureConfig::mfcc();
  cfg.n_fft = 300;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
