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
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "repsel/rng.hpp"

namespace repsel::nn {

// Activations are batch x features, row-major. Channel-structured features
// are laid out channel-major: feature index = channel * length + position.
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Mode { kTrain, kInference };

template <typename T>
struct Tensor {
  std::string name;
  Mat<T> value;
  Mat<T> grad;
  // Batch-norm running statistics are state, not trainable parameters.
  bool trainable = true;
};

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  // Caches whatever backward() needs. `rng` is only consulted by dropout in
  // training mode and may be null otherwise.
  virtual Mat<T> forward(const Mat<T>& x, Mode mode, Rng* rng) = 0;

  // Gradient w.r.t. the last forward input; overwrites parameter gradients.
  virtual Mat<T> backward(const Mat<T>& grad_out) = 0;

  virtual std::vector<Tensor<T>*> tensors() { return {}; }
  virtual std::unique_ptr<Layer> clone() const = 0;
  virtual std::string name() const = 0;
};

template <typename T>
class Dense final : public Layer<T> {
 public:
  Dense(std::size_t in, std::size_t out);

  Mat<T> forward(const Mat<T>& x, Mode mode, Rng* rng) override;
  Mat<T> backward(const Mat<T>& grad_out) override;
  std::vector<Tensor<T>*> tensors() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<Dense>(*this);
  }
  std::string name() const override { return "dense"; }

  Tensor<T>& weight() { return weight_; }  // in x out
  Tensor<T>& bias() { return bias_; }      // 1 x out

 private:
  Tensor<T> weight_;
  Tensor<T> bias_;
  Mat<T> input_;
};

template <typename T>
class Relu final : public Layer<T> {
 public:
  Mat<T> forward(const Mat<T>& x, Mode mode, Rng* rng) override;
  Mat<T> backward(const Mat<T>& grad_out) override;
  std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<Relu>(*this);
  }
  std::string name() const override { return "relu"; }

 private:
  Mat<T> input_;
};

// Inverted dropout: kept units are scaled by 1 / (1 - rate) in training.
template <typename T>
class Dropout final : public Layer<T> {
 public:
  explicit Dropout(double rate);

  Mat<T> forward(const Mat<T>& x, Mode mode, Rng* rng) override;
  Mat<T> backward(const Mat<T>& grad_out) override;
  std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<Dropout>(*this);
  }
  std::string name() const override { return "dropout"; }

 private:
  double rate_;
  Mat<T> mask_;
  bool active_ = false;
};

// 1-D convolution, stride 1, zero "same" padding (odd kernel).
template <typename T>
class Conv1d final : public Layer<T> {
 public:
  Conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
         std::size_t length);

  Mat<T> forward(const Mat<T>& x, Mode mode, Rng* rng) override;
  Mat<T> backward(const Mat<T>& grad_out) override;
  std::vector<Tensor<T>*> tensors() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<Conv1d>(*this);
  }
  std::string name() const override { return "conv1d"; }

  std::size_t fan_in() const { return in_channels_ * kernel_; }

 private:
  std::size_t in_channels_, out_channels_, kernel_, length_;
  Tensor<T> weight_;  // out_channels x (in_channels * kernel)
  Tensor<T> bias_;    // 1 x out_channels
  std::vector<Mat<T>> columns_;  // per-sample im2col from the last forward
};

// Non-overlapping max pooling by `pool` along the length; floor semantics.
template <typename T>
class MaxPool1d final : public Layer<T> {
 public:
  MaxPool1d(std::size_t channels, std::size_t length, std::size_t pool);

  Mat<T> forward(const Mat<T>& x, Mode mode, Rng* rng) override;
  Mat<T> backward(const Mat<T>& grad_out) override;
  std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<MaxPool1d>(*this);
  }
  std::string name() const override { return "maxpool1d"; }

  std::size_t output_length() const { return length_ / pool_; }

 private:
  std::size_t channels_, length_, pool_;
  Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> argmax_;
  Eigen::Index in_rows_ = 0;
};

// Per-channel normalisation over batch and length. Training uses batch
// statistics and updates running averages with the given momentum;
// inference uses the running averages.
template <typename T>
class BatchNorm1d final : public Layer<T> {
 public:
  BatchNorm1d(std::size_t channels, std::size_t length, double momentum = 0.9,
              double eps = 1e-5);

  Mat<T> forward(const Mat<T>& x, Mode mode, Rng* rng) override;
  Mat<T> backward(const Mat<T>& grad_out) override;
  std::vector<Tensor<T>*> tensors() override {
    return {&gamma_, &beta_, &running_mean_, &running_var_};
  }
  std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<BatchNorm1d>(*this);
  }
  std::string name() const override { return "batchnorm1d"; }

 private:
  std::size_t channels_, length_;
  double momentum_, eps_;
  Tensor<T> gamma_, beta_, running_mean_, running_var_;
  Mat<T> normalized_;
  Eigen::Matrix<T, Eigen::Dynamic, 1> inv_std_;
  bool training_pass_ = false;
};

// Numerically stable logistic function.
template <typename T>
T sigmoid(T z);

inline constexpr double kProbabilityClamp = 1e-7;

// Mean binary cross-entropy of sigmoid(logits) against labels, with the
// probability clamped to [1e-7, 1 - 1e-7]. Writes d(loss)/d(logits) into
// `grad` when non-null. `weights`, when non-empty, scales each sample's term.
template <typename T>
T bce_with_logits(const Mat<T>& logits, const std::vector<T>& labels,
                  Mat<T>* grad, const std::vector<T>& weights = {});

}  // namespace repsel::nn
