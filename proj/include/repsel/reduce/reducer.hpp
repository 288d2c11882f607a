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
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "repsel/store/dataset.hpp"
#include "repsel/types.hpp"

namespace repsel::reduce {

// kIdentity is the no-reduction baseline; the other five are the compared
// techniques.
enum class ReducerKind : std::uint16_t {
  kRandomSelect = 0,
  kPca = 1,
  kSvd = 2,
  kKpca = 3,
  kGrp = 4,
  kIdentity = 5,
};

// Linear exists so kernel PCA can be checked against plain PCA.
enum class KernelKind : std::uint16_t { kRbf = 0, kLinear = 1 };

std::string_view to_string(ReducerKind kind);
ReducerKind parse_reducer_kind(std::string_view name);

inline constexpr std::size_t kKpcaMaxFitRows = 2000;

struct ReducerSpec {
  ReducerKind kind = ReducerKind::kRandomSelect;
  double percentage = 1.0;
  std::uint64_t seed = 0;
  // RBF width; defaults to 1 / D.
  std::optional<double> gamma;
  KernelKind kernel = KernelKind::kRbf;
  std::size_t max_fit_rows = kKpcaMaxFitRows;
};

// round(p * D) with halves rounded up, clamped to [1, D]. Throws ConfigError
// unless p is in (0, 1].
std::size_t target_dim(double percentage, std::size_t input_dim);

struct SelectionParams {
  std::vector<std::uint32_t> indices;  // strictly increasing
};

struct PcaParams {
  VectorD mean;                // D
  MatrixD components;          // D x k, orthonormal columns
  VectorD explained_variance;  // k, non-increasing
};

struct SvdParams {
  MatrixD components;       // D x k right singular vectors
  VectorD singular_values;  // k, non-increasing
};

struct KpcaParams {
  MatrixD retained;          // n_fit x D
  MatrixD eigenvectors;      // n_fit x k, unit columns
  VectorD eigenvalues;       // k, of the double-centred kernel matrix
  double gamma = 0.0;
  KernelKind kernel = KernelKind::kRbf;
  VectorD kernel_row_means;  // n_fit
  double kernel_grand_mean = 0.0;
};

struct GrpParams {
  MatrixD projection;  // D x k, entries ~ N(0, 1/k)
};

struct IdentityParams {};

using ReducerParams = std::variant<SelectionParams, PcaParams, SvdParams,
                                   KpcaParams, GrpParams, IdentityParams>;

class FittedReducer {
 public:
  FittedReducer(ReducerKind kind, std::size_t input_dim, std::size_t output_dim,
                ReducerParams params, std::vector<std::size_t> fit_rows = {});

  ReducerKind kind() const { return kind_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  const ReducerParams& params() const { return params_; }

  // Rows of the fitting set that the parameters depend on (all rows except
  // for subsampled kernel PCA).
  const std::vector<std::size_t>& fit_rows() const { return fit_rows_; }

  template <typename P>
  const P& as() const { return std::get<P>(params_); }

  // Rows in, rows out. Throws DimensionError on a width mismatch.
  MatrixD transform(const MatrixD& x) const;
  VectorD transform_one(const VectorD& x) const;
  FeatureMatrix transform(const FeatureMatrix& x) const;
  store::EmbeddingDataset transform(const store::EmbeddingDataset& ds) const;

  // First k output coordinates of a spectral reducer (pca, svd, kpca). Equal
  // to fitting directly with output dim k. Throws ConfigError for other kinds.
  FittedReducer truncated(std::size_t k) const;

 private:
  ReducerKind kind_;
  std::size_t input_dim_;
  std::size_t output_dim_;
  ReducerParams params_;
  std::vector<std::size_t> fit_rows_;
};

// Fits on `train` only.
FittedReducer fit(const ReducerSpec& spec, const store::EmbeddingDataset& train);
FittedReducer fit(const ReducerSpec& spec, const MatrixD& train);

// Binary sidecar (.rdx): magic, version, kind, dims, then the parameter
// blocks in field order as float32 little-endian.
void save_reducer(const FittedReducer& r, const std::filesystem::path& path);
FittedReducer load_reducer(const std::filesystem::path& path);

}  // namespace repsel::reduce
