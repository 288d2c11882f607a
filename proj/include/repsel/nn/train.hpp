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

#include "repsel/nn/model.hpp"
#include "repsel/store/dataset.hpp"

namespace repsel::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  std::size_t epochs = 50;
  double learning_rate = 1e-5;
  AdamConfig adam;
  std::size_t batch_size = 32;
  std::size_t patience = 5;
  double val_fraction = 0.1;
  // Inverse-frequency class weights in the loss; off by default.
  bool class_weighting = false;
  std::uint64_t seed = 0;

  void validate() const;
};

template <typename T>
class Adam {
 public:
  Adam(double learning_rate, AdamConfig cfg) : lr_(learning_rate), cfg_(cfg) {}

  // Applies one update to every trainable tensor from its current gradient.
  void step(std::vector<Tensor<T>*> tensors);

 private:
  double lr_;
  AdamConfig cfg_;
  std::size_t t_ = 0;
  std::vector<Mat<T>> m_;
  std::vector<Mat<T>> v_;
};

// Carves a stratified validation split from `data`, trains with mini-batch
// Adam on binary cross-entropy and early-stops on validation loss, restoring
// the best-validation parameters. Throws DimensionError if the data width
// differs from the model input, ConfigError for a single-class split and
// TrainingError on a non-finite loss.
DownstreamModel train(DownstreamModel model, const store::EmbeddingDataset& data,
                      const TrainConfig& cfg);

// Mean BCE of the model on `data` in inference mode.
double evaluate_loss(DownstreamModel& model, const store::EmbeddingDataset& data);

}  // namespace repsel::nn
