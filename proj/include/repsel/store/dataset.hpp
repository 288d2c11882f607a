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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "repsel/types.hpp"

namespace repsel::store {

// Label convention: 1 = synthetic (fake, the positive class), 0 = authentic.
inline constexpr std::uint8_t kFake = 1;
inline constexpr std::uint8_t kReal = 0;

// N x D matrix of representation vectors with binary labels. Validated on
// construction and immutable afterwards.
class EmbeddingDataset {
 public:
  EmbeddingDataset() = default;

  // Throws DataError when a value is non-finite, a label is outside {0,1},
  // the row count disagrees with the labels, or tags are neither empty nor
  // one per row.
  EmbeddingDataset(std::string name, FeatureMatrix samples,
                   std::vector<std::uint8_t> labels,
                   std::vector<std::string> tags = {});

  const std::string& name() const { return name_; }
  std::size_t dim() const { return static_cast<std::size_t>(samples_.cols()); }
  std::size_t size() const { return labels_.size(); }
  const FeatureMatrix& samples() const { return samples_; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }
  const std::vector<std::string>& tags() const { return tags_; }

  std::size_t count_label(std::uint8_t label) const;
  bool has_both_classes() const;

  // Throws ConfigError unless N >= 2 and both classes are present.
  void require_trainable(const char* context) const;

  // Rows picked by `indices`, in that order.
  EmbeddingDataset subset(std::span<const std::size_t> indices) const;

  // Same labels and tags, different feature matrix (for reduced views).
  EmbeddingDataset with_samples(FeatureMatrix samples) const;

  // Exact equality of every field, floats compared bitwise-equal.
  friend bool operator==(const EmbeddingDataset& a, const EmbeddingDataset& b);

 private:
  std::string name_;
  FeatureMatrix samples_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::string> tags_;
};

enum class DatasetFormat { kBinary, kCsv };

// Picks the format from the extension: ".csv" is CSV, anything else binary.
DatasetFormat format_for_path(const std::filesystem::path& path);

EmbeddingDataset load_dataset(const std::filesystem::path& path,
                              DatasetFormat format);
EmbeddingDataset load_dataset(const std::filesystem::path& path);

// Binary container, see README for the layout. Rejects empty datasets.
void save_dataset(const EmbeddingDataset& ds,
                  const std::filesystem::path& path);
void save_dataset_csv(const EmbeddingDataset& ds,
                      const std::filesystem::path& path);

// Size in bytes of the fixed binary header.
inline constexpr std::size_t kContainerHeaderBytes = 24;

}  // namespace repsel::store
