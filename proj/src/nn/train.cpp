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

#include "repsel/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "repsel/error.hpp"
#include "repsel/rng.hpp"

namespace repsel::nn {

namespace {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

Split stratified_split(const store::EmbeddingDataset& data, double fraction,
                       std::uint64_t seed) {
  Rng rng(derive_seed({seed, 0x56414CULL}));
  Split split;
  for (std::uint8_t label : {store::kReal, store::kFake}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.labels()[i] == label) rows.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(rows));
    auto n_val = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(rows.size())));
    if (rows.size() >= 2) n_val = std::clamp<std::size_t>(n_val, 1, rows.size() - 1);
    else n_val = 0;
    split.val.insert(split.val.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_val));
    split.train.insert(split.train.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_val), rows.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  return split;
}

Mat<float> gather_rows(const FeatureMatrix& x, std::span<const std::size_t> rows) {
  Mat<float> out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

double loss_on(DownstreamModel& model, const store::EmbeddingDataset& data,
               std::span<const std::size_t> rows) {
  constexpr std::size_t kChunk = 256;
  double total = 0.0;
  for (std::size_t start = 0; start < rows.size(); start += kChunk) {
    const auto chunk = rows.subspan(start, std::min(kChunk, rows.size() - start));
    const Mat<float> logits = model.forward(gather_rows(data.samples(), chunk), Mode::kInference);
    std::vector<float> labels;
    for (auto r : chunk) labels.push_back(static_cast<float>(data.labels()[r]));
    total += static_cast<double>(bce_with_logits<float>(logits, labels, nullptr)) *
             static_cast<double>(chunk.size());
  }
  return total / static_cast<double>(rows.size());
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (learning_rate < 0) throw ConfigError("learning rate must be >= 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (!(val_fraction > 0.0 && val_fraction < 0.5)) {
    throw ConfigError("val_fraction must be in (0, 0.5)");
  }
}

template <typename T>
void Adam<T>::step(std::vector<Tensor<T>*> tensors) {
  if (m_.empty()) {
    for (auto* t : tensors) {
      m_.push_back(Mat<T>::Zero(t->value.rows(), t->value.cols()));
      v_.push_back(Mat<T>::Zero(t->value.rows(), t->value.cols()));
    }
  }
  ++t_;
  const double td = static_cast<double>(t_);
  const T b1 = T(cfg_.beta1);
  const T b2 = T(cfg_.beta2);
  const T step = T(lr_ * std::sqrt(1.0 - std::pow(cfg_.beta2, td)) /
                   (1.0 - std::pow(cfg_.beta1, td)));
  // eps is scaled to match the textbook form lr * m_hat / (sqrt(v_hat) + eps).
  const T eps_hat = T(cfg_.eps * std::sqrt(1.0 - std::pow(cfg_.beta2, td)));
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    auto* t = tensors[i];
    if (!t->trainable) continue;
    m_[i] = b1 * m_[i] + (T(1) - b1) * t->grad;
    v_[i] = b2 * v_[i] + (T(1) - b2) * t->grad.cwiseAbs2();
    t->value.array() -= step * m_[i].array() / (v_[i].array().sqrt() + eps_hat);
  }
}

template class Adam<float>;
template class Adam<double>;

double evaluate_loss(DownstreamModel& model, const store::EmbeddingDataset& data) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return loss_on(model, data, rows);
}

DownstreamModel train(DownstreamModel model, const store::EmbeddingDataset& data,
                      const TrainConfig& cfg) {
  cfg.validate();
  if (data.dim() != model.arch().input_dim) {
    throw DimensionError("training data dim " + std::to_string(data.dim()) +
                         " != model input dim " + std::to_string(model.arch().input_dim));
  }
  data.require_trainable("train");
  const Split split = stratified_split(data, cfg.val_fraction, cfg.seed);
  {
    std::size_t fakes = 0;
    for (auto r : split.train) fakes += data.labels()[r];
    if (fakes == 0 || fakes == split.train.size()) {
      throw ConfigError("training split holds a single class");
    }
  }

  std::vector<float> class_weight{1.0f, 1.0f};
  if (cfg.class_weighting) {
    std::size_t fakes = 0;
    for (auto r : split.train) fakes += data.labels()[r];
    const double n = static_cast<double>(split.train.size());
    class_weight[1] = static_cast<float>(n / (2.0 * static_cast<double>(fakes)));
    class_weight[0] = static_cast<float>(n / (2.0 * (n - static_cast<double>(fakes))));
  }

  Rng rng(derive_seed({cfg.seed, 0x545241494EULL}));
  Adam<float> adam(cfg.learning_rate, cfg.adam);
  std::vector<std::size_t> order = split.train;

  double best = std::numeric_limits<double>::infinity();
  std::vector<float> best_state = model.state();
  std::size_t since_best = 0;
  model.val_loss_history.clear();
  std::size_t epoch = 0;
  Mat<float> grad;
  for (; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const auto batch = std::span<const std::size_t>(order).subspan(
          start, std::min(cfg.batch_size, order.size() - start));
      const Mat<float> x = gather_rows(data.samples(), batch);
      std::vector<float> labels;
      std::vector<float> weights;
      for (auto r : batch) {
        labels.push_back(static_cast<float>(data.labels()[r]));
        if (cfg.class_weighting) weights.push_back(class_weight[data.labels()[r]]);
      }
      const Mat<float> logits = model.forward(x, Mode::kTrain, &rng);
      const float loss = bce_with_logits<float>(logits, labels, &grad, weights);
      if (!std::isfinite(loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch + 1) +
                            ", batch starting at " + std::to_string(start));
      }
      model.backward(grad);
      adam.step(model.tensors());
    }

    const double val = loss_on(model, data, split.val);
    if (!std::isfinite(val)) {
      throw TrainingError("non-finite validation loss at epoch " + std::to_string(epoch + 1));
    }
    model.val_loss_history.push_back(val);
    if (val < best) {
      best = val;
      best_state = model.state();
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      ++epoch;
      break;
    }
  }
  model.load_state(best_state);
  model.trained_epochs = epoch;
  model.best_val_loss = best;
  return model;
}

}  // namespace repsel::nn
