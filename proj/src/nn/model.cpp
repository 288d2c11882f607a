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

#include "repsel/nn/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <zlib.h>

#include "repsel/binio.hpp"
#include "repsel/error.hpp"

namespace repsel::nn {

namespace {

constexpr char kMagic[5] = "EADM";
constexpr std::uint16_t kVersion = 1;
constexpr Eigen::Index kPredictChunk = 256;

}  // namespace

std::string_view to_string(ArchKind kind) {
  return kind == ArchKind::kFcn ? "fcn" : "cnn";
}

ArchKind parse_arch_kind(std::string_view name) {
  if (name == "fcn") return ArchKind::kFcn;
  if (name == "cnn") return ArchKind::kCnn;
  throw ConfigError("unknown architecture '" + std::string(name) + "'");
}

void ArchSpec::validate() const {
  if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
  if (hidden < 1) throw ConfigError("hidden width must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout rate must be in [0, 1)");
  }
  if (kind == ArchKind::kCnn) {
    if (kernel_size % 2 == 0) throw ConfigError("kernel size must be odd");
    if (pool < 1) throw ConfigError("pool must be >= 1");
    if (stage_lengths()[2] < 1) {
      throw ConfigError("cnn input_dim " + std::to_string(input_dim) +
                        " is too short for three pooling stages");
    }
  }
}

std::array<std::size_t, 3> ArchSpec::stage_lengths() const {
  std::array<std::size_t, 3> out{};
  std::size_t len = input_dim;
  for (auto& l : out) {
    len /= pool;
    l = len;
  }
  return out;
}

std::size_t ArchSpec::flatten_size() const {
  return kind == ArchKind::kFcn ? input_dim : conv_filters[2] * stage_lengths()[2];
}

template <typename T>
BasicModel<T>::BasicModel(const ArchSpec& arch) : arch_(arch) {
  arch_.validate();
  std::size_t head_in = arch_.input_dim;
  if (arch_.kind == ArchKind::kCnn) {
    std::size_t channels = 1;
    std::size_t len = arch_.input_dim;
    for (std::size_t s = 0; s < 3; ++s) {
      const std::size_t filters = arch_.conv_filters[s];
      layers_.push_back(std::make_unique<Conv1d<T>>(channels, filters,
                                                    arch_.kernel_size, len));
      layers_.push_back(std::make_unique<Relu<T>>());
      layers_.push_back(std::make_unique<MaxPool1d<T>>(filters, len, arch_.pool));
      len /= arch_.pool;
      layers_.push_back(std::make_unique<BatchNorm1d<T>>(filters, len));
      channels = filters;
    }
    head_in = channels * len;
  }
  layers_.push_back(std::make_unique<Dense<T>>(head_in, arch_.hidden));
  layers_.push_back(std::make_unique<Relu<T>>());
  layers_.push_back(std::make_unique<Dropout<T>>(arch_.dropout_rate));
  layers_.push_back(std::make_unique<Dense<T>>(arch_.hidden, 1));
}

template <typename T>
BasicModel<T>::BasicModel(const BasicModel& other)
    : trained_epochs(other.trained_epochs),
      best_val_loss(other.best_val_loss),
      val_loss_history(other.val_loss_history),
      arch_(other.arch_) {
  for (const auto& layer : other.layers_) layers_.push_back(layer->clone());
}

template <typename T>
BasicModel<T>& BasicModel<T>::operator=(const BasicModel& other) {
  if (this != &other) {
    BasicModel copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
Mat<T> BasicModel<T>::forward(const Mat<T>& x, Mode mode, Rng* rng) {
  if (static_cast<std::size_t>(x.cols()) != arch_.input_dim) {
    throw DimensionError("model expects dim " + std::to_string(arch_.input_dim) +
                         ", got " + std::to_string(x.cols()));
  }
  Mat<T> h = x;
  for (auto& layer : layers_) h = layer->forward(h, mode, rng);
  return h;
}

template <typename T>
void BasicModel<T>::backward(const Mat<T>& grad_logits) {
  Mat<T> g = grad_logits;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
}

template <typename T>
std::vector<Tensor<T>*> BasicModel<T>::tensors() {
  std::vector<Tensor<T>*> out;
  for (auto& layer : layers_) {
    for (auto* t : layer->tensors()) out.push_back(t);
  }
  return out;
}

template <typename T>
std::vector<const Tensor<T>*> BasicModel<T>::tensors() const {
  std::vector<const Tensor<T>*> out;
  for (const auto& layer : layers_) {
    for (auto* t : layer->tensors()) out.push_back(t);
  }
  return out;
}

template <typename T>
std::vector<T> BasicModel<T>::state() const {
  std::vector<T> out;
  for (const auto* t : tensors()) {
    out.insert(out.end(), t->value.data(), t->value.data() + t->value.size());
  }
  return out;
}

template <typename T>
void BasicModel<T>::load_state(const std::vector<T>& values) {
  std::size_t pos = 0;
  for (auto* t : tensors()) {
    const auto n = static_cast<std::size_t>(t->value.size());
    if (pos + n > values.size()) throw DimensionError("model state is too short");
    std::copy(values.begin() + static_cast<std::ptrdiff_t>(pos),
              values.begin() + static_cast<std::ptrdiff_t>(pos + n), t->value.data());
    pos += n;
  }
  if (pos != values.size()) throw DimensionError("model state is too long");
}

template <typename T>
void BasicModel<T>::zero_output_layer() {
  auto* out = dynamic_cast<Dense<T>*>(layers_.back().get());
  out->weight().value.setZero();
  out->bias().value.setZero();
}

template <typename T>
BasicModel<T> build(const ArchSpec& arch, std::uint64_t seed) {
  BasicModel<T> model(arch);
  Rng rng(seed);
  auto he_uniform = [&rng](Mat<T>& w, std::size_t fan_in) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      w.data()[i] = static_cast<T>(rng.uniform(-limit, limit));
    }
  };
  for (auto& layer : model.layers()) {
    if (auto* dense = dynamic_cast<Dense<T>*>(layer.get())) {
      he_uniform(dense->weight().value,
                 static_cast<std::size_t>(dense->weight().value.rows()));
    } else if (auto* conv = dynamic_cast<Conv1d<T>*>(layer.get())) {
      auto tensors = conv->tensors();
      he_uniform(tensors[0]->value, conv->fan_in());
    }
  }
  return model;
}

template <typename T>
std::size_t count_params(const BasicModel<T>& model) {
  std::size_t n = 0;
  for (const auto* t : model.tensors()) {
    if (t->trainable) n += static_cast<std::size_t>(t->value.size());
  }
  return n;
}

std::size_t count_params(const ArchSpec& arch) {
  arch.validate();
  std::size_t n = 0;
  if (arch.kind == ArchKind::kCnn) {
    std::size_t channels = 1;
    for (auto filters : arch.conv_filters) {
      n += filters * channels * arch.kernel_size + filters;  // conv
      n += 2 * filters;                                      // batch-norm scale/shift
      channels = filters;
    }
  }
  n += arch.flatten_size() * arch.hidden + arch.hidden;
  n += arch.hidden + 1;
  return n;
}

std::vector<double> predict(DownstreamModel& model, const FeatureMatrix& x) {
  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index start = 0; start < x.rows(); start += kPredictChunk) {
    const Eigen::Index rows = std::min(kPredictChunk, x.rows() - start);
    const Mat<float> logits = model.forward(x.middleRows(start, rows), Mode::kInference);
    for (Eigen::Index i = 0; i < rows; ++i) {
      scores.push_back(static_cast<double>(sigmoid(logits(i, 0))));
    }
  }
  return scores;
}

double predict_one(DownstreamModel& model, std::span<const float> x) {
  const Mat<float> row =
      Eigen::Map<const Mat<float>>(x.data(), 1, static_cast<Eigen::Index>(x.size()));
  return static_cast<double>(sigmoid(model.forward(row, Mode::kInference)(0, 0)));
}

void save_model(const DownstreamModel& model, const std::filesystem::path& path) {
  std::ostringstream buf(std::ios::binary);
  const auto& arch = model.arch();
  detail::put_magic(buf, kMagic);
  detail::put_le<std::uint16_t>(buf, kVersion);
  detail::put_le<std::uint16_t>(buf, static_cast<std::uint16_t>(arch.kind));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(arch.input_dim));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(arch.hidden));
  for (auto f : arch.conv_filters) detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(f));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(arch.kernel_size));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(arch.pool));
  detail::put_f32(buf, static_cast<float>(arch.dropout_rate));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(model.trained_epochs));
  detail::put_f32(buf, static_cast<float>(model.best_val_loss));
  const auto state = model.state();
  detail::put_le<std::uint64_t>(buf, state.size());
  for (float v : state) detail::put_f32(buf, v);

  const std::string bytes = buf.str();
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()),
            static_cast<uInt>(bytes.size())));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  detail::put_le<std::uint32_t>(out, crc);
  if (!out) throw IoError("write failed for " + path.string());
}

DownstreamModel load_model(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  if (bytes.size() < 8) throw FormatError("model file too short");
  const std::string body = bytes.substr(0, bytes.size() - 4);
  std::istringstream trailer(bytes.substr(bytes.size() - 4), std::ios::binary);
  const auto stored = detail::get_le<std::uint32_t>(trailer, "crc");
  const auto actual = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));
  if (stored != actual) throw FormatError("model checksum mismatch");

  std::istringstream in(body, std::ios::binary);
  detail::expect_magic(in, kMagic);
  if (detail::get_le<std::uint16_t>(in, "version") != kVersion) {
    throw FormatError("unsupported model version");
  }
  ArchSpec arch;
  const auto kind = detail::get_le<std::uint16_t>(in, "arch kind");
  if (kind > 1) throw FormatError("unknown arch kind");
  arch.kind = static_cast<ArchKind>(kind);
  arch.input_dim = detail::get_le<std::uint32_t>(in, "input dim");
  arch.hidden = detail::get_le<std::uint32_t>(in, "hidden");
  for (auto& f : arch.conv_filters) f = detail::get_le<std::uint32_t>(in, "filters");
  arch.kernel_size = detail::get_le<std::uint32_t>(in, "kernel");
  arch.pool = detail::get_le<std::uint32_t>(in, "pool");
  arch.dropout_rate = detail::get_f32(in, "dropout");
  DownstreamModel model(arch);
  model.trained_epochs = detail::get_le<std::uint32_t>(in, "epochs");
  model.best_val_loss = detail::get_f32(in, "best val loss");
  const auto n = detail::get_le<std::uint64_t>(in, "state size");
  if (n != model.state().size()) throw FormatError("model state size mismatch");
  std::vector<float> state(n);
  for (auto& v : state) v = detail::get_f32(in, "state");
  model.load_state(state);
  return model;
}

template class BasicModel<float>;
template class BasicModel<double>;
template BasicModel<float> build<float>(const ArchSpec&, std::uint64_t);
template BasicModel<double> build<double>(const ArchSpec&, std::uint64_t);
template std::size_t count_params<float>(const BasicModel<float>&);
template std::size_t count_params<double>(const BasicModel<double>&);

}  // namespace repsel::nn
