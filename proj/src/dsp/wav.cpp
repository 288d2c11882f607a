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

#include "repsel/dsp/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "repsel/binio.hpp"
#include "repsel/error.hpp"

namespace repsel::dsp {

namespace {

std::string read_tag(std::istream& in) {
  char tag[4];
  in.read(tag, 4);
  if (in.gcount() != 4) throw FormatError("truncated WAV chunk header");
  return std::string(tag, 4);
}

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  if (read_tag(in) != "RIFF") throw FormatError(path.string() + ": not a RIFF file");
  (void)detail::get_le<std::uint32_t>(in, "RIFF size");
  if (read_tag(in) != "WAVE") throw FormatError(path.string() + ": not a WAVE file");

  bool have_fmt = false;
  std::uint32_t rate = 0;
  while (true) {
    const auto tag = read_tag(in);
    const auto size = detail::get_le<std::uint32_t>(in, "chunk size");
    if (tag == "fmt ") {
      if (size < 16) throw FormatError("fmt chunk too short");
      const auto format = detail::get_le<std::uint16_t>(in, "audio format");
      const auto channels = detail::get_le<std::uint16_t>(in, "channels");
      rate = detail::get_le<std::uint32_t>(in, "sample rate");
      (void)detail::get_le<std::uint32_t>(in, "byte rate");
      (void)detail::get_le<std::uint16_t>(in, "block align");
      const auto bits = detail::get_le<std::uint16_t>(in, "bits per sample");
      if (format != 1) {
        throw FormatError(path.string() + ": only PCM WAV is supported (format " +
                          std::to_string(format) + ")");
      }
      if (channels != 1) {
        throw FormatError(path.string() + ": expected mono, got " +
                          std::to_string(channels) + " channels");
      }
      if (bits != 16) {
        throw FormatError(path.string() + ": expected 16-bit samples, got " +
                          std::to_string(bits));
      }
      if (rate == 0) throw FormatError(path.string() + ": sample rate is 0");
      in.seekg(size - 16 + (size & 1u), std::ios::cur);
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) throw FormatError(path.string() + ": data before fmt chunk");
      const std::size_t count = size / 2;
      std::vector<unsigned char> raw(count * 2);
      in.read(reinterpret_cast<char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
      if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
        throw FormatError(path.string() + ": truncated data chunk");
      }
      AudioClip clip;
      clip.sample_rate = rate;
      clip.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const auto v = static_cast<std::int16_t>(
            static_cast<std::uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8)));
        clip.samples[i] = v / 32768.0;
      }
      return clip;
    } else {
      in.seekg(size + (size & 1u), std::ios::cur);
      if (!in) throw FormatError(path.string() + ": truncated chunk " + tag);
    }
  }
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto rate = static_cast<std::uint32_t>(std::lround(clip.sample_rate));
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  out.write("RIFF", 4);
  detail::put_le<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  detail::put_le<std::uint32_t>(out, 16);
  detail::put_le<std::uint16_t>(out, 1);
  detail::put_le<std::uint16_t>(out, 1);
  detail::put_le<std::uint32_t>(out, rate);
  detail::put_le<std::uint32_t>(out, rate * 2);
  detail::put_le<std::uint16_t>(out, 2);
  detail::put_le<std::uint16_t>(out, 16);
  out.write("data", 4);
  detail::put_le<std::uint32_t>(out, data_bytes);
  for (double s : clip.samples) {
    const double scaled = std::clamp(s * 32768.0, -32768.0, 32767.0);
    detail::put_le<std::int16_t>(out, static_cast<std::int16_t>(std::lround(scaled)));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

AudioClip resample_linear(const AudioClip& clip, double target_rate) {
  if (!(target_rate > 0)) throw ConfigError("target rate must be positive");
  if (clip.samples.empty()) throw DataError("cannot resample an empty clip");
  if (target_rate == clip.sample_rate) return clip;

  const double ratio = target_rate / clip.sample_rate;
  const auto n_in = clip.samples.size();
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_in) * ratio));
  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);
  const double step = clip.sample_rate / target_rate;
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto i0 = static_cast<std::size_t>(pos);
    if (i0 + 1 >= n_in) {
      out.samples[i] = clip.samples[n_in - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(i0);
    out.samples[i] = clip.samples[i0] + frac * (clip.samples[i0 + 1] - clip.samples[i0]);
  }
  return out;
}

}  // namespace repsel::dsp
