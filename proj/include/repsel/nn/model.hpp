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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "repsel/nn/layers.hpp"
#include "repsel/types.hpp"

namespace repsel::nn {

enum class ArchKind : std::uint16_t { kFcn = 0, kCnn = 1 };

std::string_view to_string(ArchKind kind);
ArchKind parse_arch_kind(std::string_view name);

struct ArchSpec {
  ArchKind kind = ArchKind::kFcn;
  std::size_t input_dim = 1;
  std::size_t hidden = 512;
  std::array<std::size_t, 3> conv_filters{64, 128, 256};
  std::size_t kernel_size = 3;
  std::size_t pool = 2;
  double dropout_rate = 0.3;

  // Throws ConfigError. A CNN needs input_dim >= pool^3 so the last stage
  // keeps at least one position.
  void validate() const;

  // Sequence length after each conv/pool stage (CNN only).
  std::array<std::size_t, 3> stage_lengths() const;
  std::size_t flatten_size() const;
};

// FCN:  dense(k->hidden) relu dropout dense(hidden->1)
// CNN:  3 x [conv1d relu maxpool batchnorm], then the FCN head on the
//       flattened channels-by-length map.
// The final sigmoid is applied by predict() and the loss.
template <typename T>
class BasicModel {
 public:
  BasicModel() = default;
  explicit BasicModel(const ArchSpec& arch);
  BasicModel(const BasicModel& other);
  BasicModel& operator=(const BasicModel& other);
  BasicModel(BasicModel&&) noexcept = default;
  BasicModel& operator=(BasicModel&&) noexcept = default;

  const ArchSpec& arch() const { return arch_; }

  Mat<T> forward(const Mat<T>& x, Mode mode, Rng* rng = nullptr);
  // Backpropagates d(loss)/d(logits) through every layer.
  void backward(const Mat<T>& grad_logits);

  std::vector<Tensor<T>*> tensors();
  std::vector<const Tensor<T>*> tensors() const;

  // Every tensor value (parameters and running statistics) in declaration
  // order, flattened.
  std::vector<T> state() const;
  void load_state(const std::vector<T>& values);

  std::vector<std::unique_ptr<Layer<T>>>& layers() { return layers_; }

  // Sets the output layer's weights and bias to zero (score 0.5 everywhere).
  void zero_output_layer();

  std::size_t trained_epochs = 0;
  double best_val_loss = 0.0;
  std::vector<double> val_loss_history;

 private:
  ArchSpec arch_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

using DownstreamModel = BasicModel<float>;

// He-uniform weights drawn from `seed`, zero biases, unit batch-norm scale.
template <typename T = float>
BasicModel<T> build(const ArchSpec& arch, std::uint64_t seed);

// Trainable scalars; batch-norm running statistics excluded.
template <typename T>
std::size_t count_params(const BasicModel<T>& model);

// Closed form for the architecture, without allocating a model.
std::size_t count_params(const ArchSpec& arch);

// Scores in [0, 1], inference mode. Throws DimensionError on width mismatch.
std::vector<double> predict(DownstreamModel& model, const FeatureMatrix& x);
double predict_one(DownstreamModel& model, std::span<const float> x);

// Arch descriptor, then tensors in declaration order as float32
// little-endian, then a CRC32 of everything before it.
void save_model(const DownstreamModel& model, const std::filesystem::path& path);
DownstreamModel load_model(const std::filesystem::path& path);

}  // namespace repsel::nn
