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

#include "repsel/store/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "repsel/binio.hpp"
#include "repsel/error.hpp"

namespace repsel::store {

namespace {

constexpr char kMagic[5] = "EADB";
constexpr std::uint16_t kVersion = 1;

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

float parse_float(std::string_view field, std::size_t line_no) {
  auto text = trim(field);
  float value = 0.0f;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("line " + std::to_string(line_no) +
                    ": cannot parse value '" + text + "'");
  }
  return value;
}

EmbeddingDataset load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  detail::expect_magic(in, kMagic);
  const auto version = detail::get_le<std::uint16_t>(in, "version");
  if (version != kVersion) {
    throw FormatError("unsupported container version " +
                      std::to_string(version));
  }
  const auto flags = detail::get_le<std::uint16_t>(in, "flags");
  if (flags != 0) throw FormatError("unsupported container flags");
  const auto n = detail::get_le<std::uint64_t>(in, "row count");
  const auto d = detail::get_le<std::uint32_t>(in, "dim");
  (void)detail::get_le<std::uint32_t>(in, "reserved");
  if (d == 0) throw FormatError("container declares dim 0");

  // Check the payload length before allocating.
  const auto header_end = in.tellg();
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  in.seekg(header_end);
  const std::uint64_t payload =
      static_cast<std::uint64_t>(header_end) + n * d * 4 + n;
  if (n > file_size || payload > file_size) {
    throw DataError("container declares " + std::to_string(n) + "x" +
                    std::to_string(d) + " but file holds " +
                    std::to_string(file_size) + " bytes");
  }

  FeatureMatrix samples(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<std::uint32_t> raw(static_cast<std::size_t>(n * d));
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * 4));
  float* dst = samples.data();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto* b = reinterpret_cast<const unsigned char*>(&raw[i]);
    const std::uint32_t bits = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) |
                               (std::uint32_t{b[2]} << 16) |
                               (std::uint32_t{b[3]} << 24);
    dst[i] = std::bit_cast<float>(bits);
  }
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(n));
  in.read(reinterpret_cast<char*>(labels.data()),
          static_cast<std::streamsize>(labels.size()));

  std::string name = path.stem().string();
  std::vector<std::string> tags;
  if (static_cast<std::uint64_t>(in.tellg()) < file_size) {
    const auto len = detail::get_le<std::uint32_t>(in, "metadata length");
    std::string text(len, '\0');
    in.read(text.data(), len);
    if (in.gcount() != static_cast<std::streamsize>(len)) {
      throw FormatError("truncated metadata block");
    }
    try {
      auto meta = nlohmann::json::parse(text);
      name = meta.value("name", name);
      if (meta.contains("tags")) tags = meta["tags"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("metadata block: ") + e.what());
    }
  }
  return EmbeddingDataset(std::move(name), std::move(samples), std::move(labels),
                          std::move(tags));
}

EmbeddingDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV file");
  auto header = split_commas(line);
  if (header.size() < 2 || trim(header.back()) != "label") {
    throw FormatError("CSV header must end with 'label'");
  }
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (trim(header[j]) != "f" + std::to_string(j)) {
      throw FormatError("CSV header column " + std::to_string(j) +
                        " must be f" + std::to_string(j));
    }
  }

  std::vector<float> values;
  std::vector<std::uint8_t> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_commas(line);
    if (fields.size() != d + 1) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(d + 1) + " fields, got " +
                      std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < d; ++j) {
      values.push_back(parse_float(fields[j], line_no));
    }
    auto label = trim(fields[d]);
    if (label != "0" && label != "1") {
      throw DataError("line " + std::to_string(line_no) + ": label '" + label +
                      "' is not 0 or 1");
    }
    labels.push_back(label == "1" ? kFake : kReal);
  }
  const auto n = static_cast<Eigen::Index>(labels.size());
  FeatureMatrix samples = Eigen::Map<FeatureMatrix>(values.data(), n,
                                                    static_cast<Eigen::Index>(d));
  return EmbeddingDataset(path.stem().string(), std::move(samples),
                          std::move(labels));
}

}  // namespace

EmbeddingDataset::EmbeddingDataset(std::string name, FeatureMatrix samples,
                                   std::vector<std::uint8_t> labels,
                                   std::vector<std::string> tags)
    : name_(std::move(name)),
      samples_(std::move(samples)),
      labels_(std::move(labels)),
      tags_(std::move(tags)) {
  if (samples_.cols() == 0) throw DataError("dataset dim must be positive");
  if (static_cast<std::size_t>(samples_.rows()) != labels_.size()) {
    throw DataError("dataset has " + std::to_string(samples_.rows()) +
                    " rows but " + std::to_string(labels_.size()) + " labels");
  }
  if (!tags_.empty() && tags_.size() != labels_.size()) {
    throw DataError("dataset tags must be empty or one per row");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] > 1) {
      throw DataError("row " + std::to_string(i) + ": label " +
                      std::to_string(labels_[i]) + " is not 0 or 1");
    }
  }
  if (!samples_.allFinite()) {
    for (Eigen::Index i = 0; i < samples_.rows(); ++i) {
      if (!samples_.row(i).allFinite()) {
        throw DataError("row " + std::to_string(i) + " has a non-finite value");
      }
    }
  }
}

std::size_t EmbeddingDataset::count_label(std::uint8_t label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

bool EmbeddingDataset::has_both_classes() const {
  return count_label(kFake) > 0 && count_label(kReal) > 0;
}

void EmbeddingDataset::require_trainable(const char* context) const {
  if (size() < 2 || !has_both_classes()) {
    throw ConfigError(std::string(context) +
                      ": dataset needs at least two rows and both classes");
  }
}

EmbeddingDataset EmbeddingDataset::subset(
    std::span<const std::size_t> indices) const {
  FeatureMatrix rows(static_cast<Eigen::Index>(indices.size()), samples_.cols());
  std::vector<std::uint8_t> labels;
  std::vector<std::string> tags;
  labels.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = indices[i];
    if (src >= size()) throw DimensionError("subset index out of range");
    rows.row(static_cast<Eigen::Index>(i)) =
        samples_.row(static_cast<Eigen::Index>(src));
    labels.push_back(labels_[src]);
    if (!tags_.empty()) tags.push_back(tags_[src]);
  }
  return EmbeddingDataset(name_, std::move(rows), std::move(labels), std::move(tags));
}

EmbeddingDataset EmbeddingDataset::with_samples(FeatureMatrix samples) const {
  return EmbeddingDataset(name_, std::move(samples), labels_, tags_);
}

bool operator==(const EmbeddingDataset& a, const EmbeddingDataset& b) {
  if (a.name_ != b.name_ || a.labels_ != b.labels_ || a.tags_ != b.tags_) {
    return false;
  }
  if (a.samples_.rows() != b.samples_.rows() ||
      a.samples_.cols() != b.samples_.cols()) {
    return false;
  }
  return std::memcmp(a.samples_.data(), b.samples_.data(),
                     sizeof(float) * static_cast<std::size_t>(a.samples_.size())) == 0;
}

DatasetFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? DatasetFormat::kCsv : DatasetFormat::kBinary;
}

EmbeddingDataset load_dataset(const std::filesystem::path& path,
                              DatasetFormat format) {
  return format == DatasetFormat::kCsv ? load_csv(path) : load_binary(path);
}

EmbeddingDataset load_dataset(const std::filesystem::path& path) {
  return load_dataset(path, format_for_path(path));
}

void save_dataset(const EmbeddingDataset& ds, const std::filesystem::path& path) {
  if (ds.size() == 0) throw DataError("refusing to write a dataset with no rows");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");

  detail::put_magic(out, kMagic);
  detail::put_le<std::uint16_t>(out, kVersion);
  detail::put_le<std::uint16_t>(out, 0);
  detail::put_le<std::uint64_t>(out, ds.size());
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.dim()));
  detail::put_le<std::uint32_t>(out, 0);

  const float* src = ds.samples().data();
  const std::size_t count = ds.size() * ds.dim();
  std::vector<char> buf(count * 4);
  for (std::size_t i = 0; i < count; ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(src[i]);
    buf[4 * i + 0] = static_cast<char>(bits & 0xFF);
    buf[4 * i + 1] = static_cast<char>((bits >> 8) & 0xFF);
    buf[4 * i + 2] = static_cast<char>((bits >> 16) & 0xFF);
    buf[4 * i + 3] = static_cast<char>((bits >> 24) & 0xFF);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.write(reinterpret_cast<const char*>(ds.labels().data()),
            static_cast<std::streamsize>(ds.size()));

  if (!ds.name().empty() || !ds.tags().empty()) {
    nlohmann::json meta;
    meta["name"] = ds.name();
    if (!ds.tags().empty()) meta["tags"] = ds.tags();
    const auto text = meta.dump();
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void save_dataset_csv(const EmbeddingDataset& ds,
                      const std::filesystem::path& path) {
  if (ds.size() == 0) throw DataError("refusing to write a dataset with no rows");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t j = 0; j < ds.dim(); ++j) out << 'f' << j << ',';
  out << "label\n";
  char buf[32];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.dim(); ++j) {
      auto [ptr, ec] = std::to_chars(
          buf, buf + sizeof(buf),
          ds.samples()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out.write(buf, ptr - buf);
      out << ',';
    }
    out << static_cast<int>(ds.labels()[i]) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace repsel::store
