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

#include "repsel/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "repsel/error.hpp"

namespace repsel::nn {

namespace {

template <typename T>
Tensor<T> make_tensor(std::string name, Eigen::Index rows, Eigen::Index cols,
                      T fill, bool trainable = true) {
  Tensor<T> t;
  t.name = std::move(name);
  t.value = Mat<T>::Constant(rows, cols, fill);
  t.grad = Mat<T>::Zero(rows, cols);
  t.trainable = trainable;
  return t;
}

template <typename T>
using RowMap = Eigen::Map<Mat<T>>;
template <typename T>
using ConstRowMap = Eigen::Map<const Mat<T>>;

}  // namespace

// ---------------------------------------------------------------- Dense

template <typename T>
Dense<T>::Dense(std::size_t in, std::size_t out)
    : weight_(make_tensor<T>("weight", static_cast<Eigen::Index>(in),
                             static_cast<Eigen::Index>(out), T(0))),
      bias_(make_tensor<T>("bias", 1, static_cast<Eigen::Index>(out), T(0))) {}

template <typename T>
Mat<T> Dense<T>::forward(const Mat<T>& x, Mode, Rng*) {
  if (x.cols() != weight_.value.rows()) {
    throw DimensionError("dense layer expects width " +
                         std::to_string(weight_.value.rows()) + ", got " +
                         std::to_string(x.cols()));
  }
  input_ = x;
  Mat<T> y = x * weight_.value;
  y.rowwise() += bias_.value.row(0);
  return y;
}

template <typename T>
Mat<T> Dense<T>::backward(const Mat<T>& grad_out) {
  weight_.grad.noalias() = input_.transpose() * grad_out;
  bias_.grad = grad_out.colwise().sum();
  return grad_out * weight_.value.transpose();
}

// ---------------------------------------------------------------- ReLU

template <typename T>
Mat<T> Relu<T>::forward(const Mat<T>& x, Mode, Rng*) {
  input_ = x;
  return x.cwiseMax(T(0));
}

template <typename T>
Mat<T> Relu<T>::backward(const Mat<T>& grad_out) {
  return (input_.array() > T(0)).select(grad_out, T(0));
}

// ---------------------------------------------------------------- Dropout

template <typename T>
Dropout<T>::Dropout(double rate) : rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must be in [0, 1)");
}

template <typename T>
Mat<T> Dropout<T>::forward(const Mat<T>& x, Mode mode, Rng* rng) {
  active_ = mode == Mode::kTrain && rate_ > 0.0;
  if (!active_) return x;
  if (rng == nullptr) throw ConfigError("dropout in training mode needs an rng");
  const T keep_scale = T(1.0 / (1.0 - rate_));
  mask_.resize(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask_.size(); ++i) {
    mask_.data()[i] = rng->uniform() >= rate_ ? keep_scale : T(0);
  }
  return x.cwiseProduct(mask_);
}

template <typename T>
Mat<T> Dropout<T>::backward(const Mat<T>& grad_out) {
  return active_ ? Mat<T>(grad_out.cwiseProduct(mask_)) : grad_out;
}

// ---------------------------------------------------------------- Conv1d

template <typename T>
Conv1d<T>::Conv1d(std::size_t in_channels, std::size_t out_channels,
                  std::size_t kernel, std::size_t length)
    : in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_(kernel),
      length_(length),
      weight_(make_tensor<T>("weight", static_cast<Eigen::Index>(out_channels),
                             static_cast<Eigen::Index>(in_channels * kernel), T(0))),
      bias_(make_tensor<T>("bias", 1, static_cast<Eigen::Index>(out_channels), T(0))) {
  if (kernel % 2 == 0) throw ConfigError("conv1d kernel size must be odd");
}

template <typename T>
Mat<T> Conv1d<T>::forward(const Mat<T>& x, Mode, Rng*) {
  const auto len = static_cast<Eigen::Index>(length_);
  const auto cin = static_cast<Eigen::Index>(in_channels_);
  const auto cout = static_cast<Eigen::Index>(out_channels_);
  const auto k = static_cast<Eigen::Index>(kernel_);
  const Eigen::Index pad = k / 2;
  if (x.cols() != cin * len) {
    throw DimensionError("conv1d expects width " + std::to_string(cin * len) +
                         ", got " + std::to_string(x.cols()));
  }
  columns_.resize(static_cast<std::size_t>(x.rows()));
  Mat<T> y(x.rows(), cout * len);
  for (Eigen::Index s = 0; s < x.rows(); ++s) {
    ConstRowMap<T> in(x.data() + s * x.cols(), cin, len);
    Mat<T>& cols = columns_[static_cast<std::size_t>(s)];
    cols.setZero(cin * k, len);
    for (Eigen::Index c = 0; c < cin; ++c) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index shift = j - pad;
        const Eigen::Index t0 = std::max<Eigen::Index>(0, -shift);
        const Eigen::Index t1 = std::min<Eigen::Index>(len, len - shift);
        if (t1 > t0) {
          cols.row(c * k + j).segment(t0, t1 - t0) = in.row(c).segment(t0 + shift, t1 - t0);
        }
      }
    }
    RowMap<T> out(y.data() + s * y.cols(), cout, len);
    out.noalias() = weight_.value * cols;
    out.colwise() += bias_.value.row(0).transpose();
  }
  return y;
}

template <typename T>
Mat<T> Conv1d<T>::backward(const Mat<T>& grad_out) {
  const auto len = static_cast<Eigen::Index>(length_);
  const auto cin = static_cast<Eigen::Index>(in_channels_);
  const auto cout = static_cast<Eigen::Index>(out_channels_);
  const auto k = static_cast<Eigen::Index>(kernel_);
  const Eigen::Index pad = k / 2;
  weight_.grad.setZero();
  bias_.grad.setZero();
  Mat<T> dx = Mat<T>::Zero(grad_out.rows(), cin * len);
  for (Eigen::Index s = 0; s < grad_out.rows(); ++s) {
    ConstRowMap<T> dy(grad_out.data() + s * grad_out.cols(), cout, len);
    const Mat<T>& cols = columns_[static_cast<std::size_t>(s)];
    weight_.grad.noalias() += dy * cols.transpose();
    bias_.grad += dy.rowwise().sum().transpose();
    const Mat<T> dcols = weight_.value.transpose() * dy;
    RowMap<T> din(dx.data() + s * dx.cols(), cin, len);
    for (Eigen::Index c = 0; c < cin; ++c) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index shift = j - pad;
        const Eigen::Index t0 = std::max<Eigen::Index>(0, -shift);
        const Eigen::Index t1 = std::min<Eigen::Index>(len, len - shift);
        if (t1 > t0) {
          din.row(c).segment(t0 + shift, t1 - t0) += dcols.row(c * k + j).segment(t0, t1 - t0);
        }
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------- MaxPool1d

template <typename T>
MaxPool1d<T>::MaxPool1d(std::size_t channels, std::size_t length, std::size_t pool)
    : channels_(channels), length_(length), pool_(pool) {
  if (pool < 1) throw ConfigError("pool size must be positive");
  if (length / pool < 1) throw ConfigError("maxpool leaves an empty sequence");
}

template <typename T>
Mat<T> MaxPool1d<T>::forward(const Mat<T>& x, Mode, Rng*) {
  const auto len = static_cast<Eigen::Index>(length_);
  const auto ch = static_cast<Eigen::Index>(channels_);
  const auto pool = static_cast<Eigen::Index>(pool_);
  const Eigen::Index out_len = len / pool;
  if (x.cols() != ch * len) {
    throw DimensionError("maxpool expects width " + std::to_string(ch * len));
  }
  in_rows_ = x.rows();
  Mat<T> y(x.rows(), ch * out_len);
  argmax_.resize(x.rows(), ch * out_len);
  for (Eigen::Index s = 0; s < x.rows(); ++s) {
    for (Eigen::Index c = 0; c < ch; ++c) {
      for (Eigen::Index t = 0; t < out_len; ++t) {
        Eigen::Index best = c * len + t * pool;
        for (Eigen::Index j = 1; j < pool; ++j) {
          const Eigen::Index idx = c * len + t * pool + j;
          if (x(s, idx) > x(s, best)) best = idx;
        }
        y(s, c * out_len + t) = x(s, best);
        argmax_(s, c * out_len + t) = best;
      }
    }
  }
  return y;
}

template <typename T>
Mat<T> MaxPool1d<T>::backward(const Mat<T>& grad_out) {
  Mat<T> dx = Mat<T>::Zero(in_rows_, static_cast<Eigen::Index>(channels_ * length_));
  for (Eigen::Index s = 0; s < grad_out.rows(); ++s) {
    for (Eigen::Index i = 0; i < grad_out.cols(); ++i) {
      dx(s, argmax_(s, i)) += grad_out(s, i);
    }
  }
  return dx;
}

// ---------------------------------------------------------------- BatchNorm1d

template <typename T>
BatchNorm1d<T>::BatchNorm1d(std::size_t channels, std::size_t length,
                            double momentum, double eps)
    : channels_(channels),
      length_(length),
      momentum_(momentum),
      eps_(eps),
      gamma_(make_tensor<T>("gamma", 1, static_cast<Eigen::Index>(channels), T(1))),
      beta_(make_tensor<T>("beta", 1, static_cast<Eigen::Index>(channels), T(0))),
      running_mean_(make_tensor<T>("running_mean", 1,
                                   static_cast<Eigen::Index>(channels), T(0), false)),
      running_var_(make_tensor<T>("running_var", 1,
                                  static_cast<Eigen::Index>(channels), T(1), false)) {}

template <typename T>
Mat<T> BatchNorm1d<T>::forward(const Mat<T>& x, Mode mode, Rng*) {
  const auto len = static_cast<Eigen::Index>(length_);
  const auto ch = static_cast<Eigen::Index>(channels_);
  if (x.cols() != ch * len) {
    throw DimensionError("batchnorm expects width " + std::to_string(ch * len));
  }
  training_pass_ = mode == Mode::kTrain;
  normalized_.resize(x.rows(), x.cols());
  inv_std_.resize(ch);
  Mat<T> y(x.rows(), x.cols());
  const double count = static_cast<double>(x.rows() * len);
  for (Eigen::Index c = 0; c < ch; ++c) {
    auto block = x.middleCols(c * len, len);
    double mean;
    double var;
    if (training_pass_) {
      mean = static_cast<double>(block.sum()) / count;
      var = static_cast<double>((block.array() - T(mean)).square().sum()) / count;
      running_mean_.value(0, c) =
          T(momentum_ * running_mean_.value(0, c) + (1.0 - momentum_) * mean);
      running_var_.value(0, c) =
          T(momentum_ * running_var_.value(0, c) + (1.0 - momentum_) * var);
    } else {
      mean = running_mean_.value(0, c);
      var = running_var_.value(0, c);
    }
    const T inv = T(1.0 / std::sqrt(var + eps_));
    inv_std_(c) = inv;
    normalized_.middleCols(c * len, len) = (block.array() - T(mean)) * inv;
    y.middleCols(c * len, len) =
        (normalized_.middleCols(c * len, len).array() * gamma_.value(0, c) +
         beta_.value(0, c));
  }
  return y;
}

template <typename T>
Mat<T> BatchNorm1d<T>::backward(const Mat<T>& grad_out) {
  const auto len = static_cast<Eigen::Index>(length_);
  const auto ch = static_cast<Eigen::Index>(channels_);
  const T count = T(static_cast<double>(grad_out.rows() * len));
  Mat<T> dx(grad_out.rows(), grad_out.cols());
  for (Eigen::Index c = 0; c < ch; ++c) {
    auto dy = grad_out.middleCols(c * len, len).array();
    auto xhat = normalized_.middleCols(c * len, len).array();
    gamma_.grad(0, c) = (dy * xhat).sum();
    beta_.grad(0, c) = dy.sum();
    const T g = gamma_.value(0, c);
    if (training_pass_) {
      const T sum_dxhat = g * dy.sum();
      const T sum_dxhat_xhat = g * (dy * xhat).sum();
      dx.middleCols(c * len, len) =
          (inv_std_(c) / count) * (count * g * dy - sum_dxhat - xhat * sum_dxhat_xhat);
    } else {
      dx.middleCols(c * len, len) = dy * (g * inv_std_(c));
    }
  }
  return dx;
}

// ---------------------------------------------------------------- loss

template <typename T>
T sigmoid(T z) {
  if (z >= T(0)) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

template <typename T>
T bce_with_logits(const Mat<T>& logits, const std::vector<T>& labels, Mat<T>* grad,
                  const std::vector<T>& weights) {
  const auto n = logits.rows();
  if (logits.cols() != 1 || static_cast<std::size_t>(n) != labels.size()) {
    throw DimensionError("loss expects one logit per label");
  }
  const bool weighted = !weights.empty();
  const T lo = T(kProbabilityClamp);
  const T hi = T(1) - T(kProbabilityClamp);
  if (grad != nullptr) grad->resize(n, 1);
  T total = T(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const T y = labels[static_cast<std::size_t>(i)];
    const T w = weighted ? weights[static_cast<std::size_t>(i)] : T(1);
    const T p = sigmoid(logits(i, 0));
    const T pc = std::clamp(p, lo, hi);
    total += -w * (y * std::log(pc) + (T(1) - y) * std::log(T(1) - pc));
    if (grad != nullptr) {
      // The clamp is flat outside (lo, hi), so the gradient vanishes there.
      (*grad)(i, 0) = (p > lo && p < hi) ? w * (p - y) / T(n) : T(0);
    }
  }
  return total / T(n);
}

template class Dense<float>;
template class Dense<double>;
template class Relu<float>;
template class Relu<double>;
template class Dropout<float>;
template class Dropout<double>;
template class Conv1d<float>;
template class Conv1d<double>;
template class MaxPool1d<float>;
template class MaxPool1d<double>;
template class BatchNorm1d<float>;
template class BatchNorm1d<double>;
template float sigmoid<float>(float);
template double sigmoid<double>(double);
template float bce_with_logits<float>(const Mat<float>&, const std::vector<float>&,
                                      Mat<float>*, const std::vector<float>&);
template double bce_with_logits<double>(const Mat<double>&, const std::vector<double>&,
                                        Mat<double>*, const std::vector<double>&);

}  // namespace repsel::nn
