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

#include "repsel/reduce/reducer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "repsel/error.hpp"
#include "repsel/reduce/linalg.hpp"
#include "repsel/rng.hpp"

namespace repsel::reduce {

namespace {

// Eigenvalues at or below this fraction of the leading one carry no
// direction; their kernel PCA coordinates are emitted as zero.
constexpr double kRelativeEigenFloor = 1e-10;

MatrixD to_double(const FeatureMatrix& x) { return x.cast<double>(); }

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

std::vector<std::size_t> sample_rows(std::size_t n, std::size_t cap,
                                     std::uint64_t seed) {
  auto rows = all_rows(n);
  if (n <= cap) return rows;
  Rng rng(derive_seed({seed, 0x4B504341ULL}));
  for (std::size_t i = 0; i < cap; ++i) {
    std::swap(rows[i], rows[i + rng.below(n - i)]);
  }
  rows.resize(cap);
  std::sort(rows.begin(), rows.end());
  return rows;
}

FittedReducer fit_random_select(const ReducerSpec& spec, std::size_t d,
                                std::size_t n) {
  const std::size_t k = target_dim(spec.percentage, d);
  std::vector<std::uint32_t> pool(d);
  std::iota(pool.begin(), pool.end(), std::uint32_t{0});
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + rng.below(d - i)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return FittedReducer(ReducerKind::kRandomSelect, d, k,
                       SelectionParams{std::move(pool)}, all_rows(n));
}

FittedReducer fit_pca(const ReducerSpec& spec, const MatrixD& x) {
  const auto d = static_cast<std::size_t>(x.cols());
  const std::size_t k = target_dim(spec.percentage, d);
  const auto n = x.rows();
  const VectorD mean = x.colwise().mean().transpose();
  const MatrixD centered = x.rowwise() - mean.transpose();
  const double denom = static_cast<double>(std::max<Eigen::Index>(n - 1, 1));
  const MatrixD cov = (centered.transpose() * centered) / denom;

  auto eig = symmetric_eigh(cov);
  canonicalize_signs(eig.vectors);
  const auto kk = static_cast<Eigen::Index>(k);
  PcaParams p;
  p.mean = mean;
  p.components = eig.vectors.leftCols(kk);
  p.explained_variance = eig.values.head(kk).cwiseMax(0.0);
  return FittedReducer(ReducerKind::kPca, d, k, std::move(p),
                       all_rows(static_cast<std::size_t>(n)));
}

FittedReducer fit_svd(const ReducerSpec& spec, const MatrixD& x) {
  const auto d = static_cast<std::size_t>(x.cols());
  const std::size_t k = target_dim(spec.percentage, d);
  const auto kk = static_cast<Eigen::Index>(k);
  auto svd = svd_thin(x);
  SvdParams p;
  if (kk <= svd.v.cols()) {
    p.components = svd.v.leftCols(kk);
    p.singular_values = svd.s.head(kk);
  } else {
    // Fewer rows than requested components: the extra directions carry no
    // energy and are any orthonormal completion.
    p.components = complete_orthonormal(svd.v, kk);
    MatrixD extra = p.components.rightCols(kk - svd.v.cols());
    canonicalize_signs(extra);
    p.components.rightCols(kk - svd.v.cols()) = extra;
    p.singular_values = VectorD::Zero(kk);
    p.singular_values.head(svd.s.size()) = svd.s;
  }
  return FittedReducer(ReducerKind::kSvd, d, k, std::move(p),
                       all_rows(static_cast<std::size_t>(x.rows())));
}

MatrixD kernel_matrix(const MatrixD& a, const MatrixD& b, KernelKind kernel,
                      double gamma) {
  MatrixD k = a * b.transpose();
  if (kernel == KernelKind::kLinear) return k;
  const VectorD sa = a.rowwise().squaredNorm();
  const VectorD sb = b.rowwise().squaredNorm();
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      const double dist = std::max(0.0, sa(i) + sb(j) - 2.0 * k(i, j));
      k(i, j) = std::exp(-gamma * dist);
    }
  }
  return k;
}

FittedReducer fit_kpca(const ReducerSpec& spec, const MatrixD& x) {
  const auto d = static_cast<std::size_t>(x.cols());
  const std::size_t k = target_dim(spec.percentage, d);
  const double gamma = spec.gamma.value_or(1.0 / static_cast<double>(d));
  if (!(gamma > 0.0)) throw ConfigError("kpca gamma must be positive");
  if (spec.max_fit_rows < 1) throw ConfigError("kpca max_fit_rows must be positive");

  auto rows = sample_rows(static_cast<std::size_t>(x.rows()), spec.max_fit_rows,
                          spec.seed);
  MatrixD retained(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    retained.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  }

  const MatrixD kmat = kernel_matrix(retained, retained, spec.kernel, gamma);
  const VectorD row_means = kmat.rowwise().mean();
  const double grand = kmat.mean();
  MatrixD centered = kmat;
  centered.colwise() -= row_means;
  centered.rowwise() -= row_means.transpose();
  centered.array() += grand;
  centered = 0.5 * (centered + centered.transpose());

  auto eig = symmetric_eigh(centered);
  canonicalize_signs(eig.vectors);

  const auto n = retained.rows();
  const auto kk = static_cast<Eigen::Index>(k);
  const auto have = std::min(kk, n);
  KpcaParams p;
  p.eigenvectors = MatrixD::Zero(n, kk);
  p.eigenvectors.leftCols(have) = eig.vectors.leftCols(have);
  p.eigenvalues = VectorD::Zero(kk);
  p.eigenvalues.head(have) = eig.values.head(have);
  p.retained = std::move(retained);
  p.gamma = gamma;
  p.kernel = spec.kernel;
  p.kernel_row_means = row_means;
  p.kernel_grand_mean = grand;
  return FittedReducer(ReducerKind::kKpca, d, k, std::move(p), std::move(rows));
}

FittedReducer fit_grp(const ReducerSpec& spec, std::size_t d, std::size_t n) {
  const std::size_t k = target_dim(spec.percentage, d);
  Rng rng(spec.seed);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(k));
  GrpParams p;
  p.projection.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
  // Row-major fill so the stream order matches the serialized layout.
  for (Eigen::Index i = 0; i < p.projection.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.projection.cols(); ++j) {
      p.projection(i, j) = rng.normal(0.0, stddev);
    }
  }
  return FittedReducer(ReducerKind::kGrp, d, k, std::move(p), all_rows(n));
}

MatrixD kpca_scaled_vectors(const KpcaParams& p) {
  MatrixD scaled = p.eigenvectors;
  const double lead = p.eigenvalues.size() > 0 ? p.eigenvalues(0) : 0.0;
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    const double lambda = p.eigenvalues(j);
    if (lead > 0.0 && lambda > kRelativeEigenFloor * lead) {
      scaled.col(j) /= std::sqrt(lambda);
    } else {
      scaled.col(j).setZero();
    }
  }
  return scaled;
}

}  // namespace

std::string_view to_string(ReducerKind kind) {
  switch (kind) {
    case ReducerKind::kRandomSelect: return "random_select";
    case ReducerKind::kPca: return "pca";
    case ReducerKind::kSvd: return "svd";
    case ReducerKind::kKpca: return "kpca";
    case ReducerKind::kGrp: return "grp";
    case ReducerKind::kIdentity: return "identity";
  }
  return "unknown";
}

ReducerKind parse_reducer_kind(std::string_view name) {
  for (auto kind : {ReducerKind::kRandomSelect, ReducerKind::kPca, ReducerKind::kSvd,
                    ReducerKind::kKpca, ReducerKind::kGrp, ReducerKind::kIdentity}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown reducer kind '" + std::string(name) + "'");
}

std::size_t target_dim(double percentage, std::size_t input_dim) {
  if (!(percentage > 0.0 && percentage <= 1.0)) {
    throw ConfigError("percentage must be in (0, 1], got " + std::to_string(percentage));
  }
  if (input_dim == 0) throw ConfigError("input dim must be positive");
  const double exact = percentage * static_cast<double>(input_dim);
  auto k = static_cast<std::size_t>(std::floor(exact + 0.5));
  return std::clamp<std::size_t>(k, 1, input_dim);
}

FittedReducer::FittedReducer(ReducerKind kind, std::size_t input_dim,
                             std::size_t output_dim, ReducerParams params,
                             std::vector<std::size_t> fit_rows)
    : kind_(kind),
      input_dim_(input_dim),
      output_dim_(output_dim),
      params_(std::move(params)),
      fit_rows_(std::move(fit_rows)) {}

MatrixD FittedReducer::transform(const MatrixD& x) const {
  if (static_cast<std::size_t>(x.cols()) != input_dim_) {
    throw DimensionError("reducer expects dim " + std::to_string(input_dim_) +
                         ", got " + std::to_string(x.cols()));
  }
  switch (kind_) {
    case ReducerKind::kIdentity:
      return x;
    case ReducerKind::kRandomSelect: {
      const auto& idx = as<SelectionParams>().indices;
      MatrixD out(x.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t j = 0; j < idx.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = x.col(idx[j]);
      }
      return out;
    }
    case ReducerKind::kPca: {
      const auto& p = as<PcaParams>();
      return (x.rowwise() - p.mean.transpose()) * p.components;
    }
    case ReducerKind::kSvd:
      return x * as<SvdParams>().components;
    case ReducerKind::kGrp:
      return x * as<GrpParams>().projection;
    case ReducerKind::kKpca: {
      const auto& p = as<KpcaParams>();
      MatrixD kx = kernel_matrix(x, p.retained, p.kernel, p.gamma);
      const VectorD own_means = kx.rowwise().mean();
      kx.colwise() -= own_means;
      kx.rowwise() -= p.kernel_row_means.transpose();
      kx.array() += p.kernel_grand_mean;
      return kx * kpca_scaled_vectors(p);
    }
  }
  throw ConfigError("unknown reducer kind");
}

VectorD FittedReducer::transform_one(const VectorD& x) const {
  return transform(MatrixD(x.transpose())).row(0).transpose();
}

FeatureMatrix FittedReducer::transform(const FeatureMatrix& x) const {
  if (kind_ == ReducerKind::kRandomSelect) {
    if (static_cast<std::size_t>(x.cols()) != input_dim_) {
      throw DimensionError("reducer expects dim " + std::to_string(input_dim_) +
                           ", got " + std::to_string(x.cols()));
    }
    // Exact float gather, no round trip through double.
    const auto& idx = as<SelectionParams>().indices;
    FeatureMatrix out(x.rows(), static_cast<Eigen::Index>(idx.size()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) {
        out(i, static_cast<Eigen::Index>(j)) = x(i, idx[j]);
      }
    }
    return out;
  }
  if (kind_ == ReducerKind::kIdentity) {
    if (static_cast<std::size_t>(x.cols()) != input_dim_) {
      throw DimensionError("reducer expects dim " + std::to_string(input_dim_));
    }
    return x;
  }
  return transform(to_double(x)).cast<float>();
}

store::EmbeddingDataset FittedReducer::transform(
    const store::EmbeddingDataset& ds) const {
  return ds.with_samples(transform(ds.samples()));
}

FittedReducer FittedReducer::truncated(std::size_t k) const {
  if (k < 1 || k > output_dim_) throw ConfigError("truncation beyond fitted dim");
  const auto kk = static_cast<Eigen::Index>(k);
  switch (kind_) {
    case ReducerKind::kPca: {
      auto p = as<PcaParams>();
      p.components = p.components.leftCols(kk).eval();
      p.explained_variance = p.explained_variance.head(kk).eval();
      return FittedReducer(kind_, input_dim_, k, std::move(p), fit_rows_);
    }
    case ReducerKind::kSvd: {
      auto p = as<SvdParams>();
      p.components = p.components.leftCols(kk).eval();
      p.singular_values = p.singular_values.head(kk).eval();
      return FittedReducer(kind_, input_dim_, k, std::move(p), fit_rows_);
    }
    case ReducerKind::kKpca: {
      auto p = as<KpcaParams>();
      p.eigenvectors = p.eigenvectors.leftCols(kk).eval();
      p.eigenvalues = p.eigenvalues.head(kk).eval();
      return FittedReducer(kind_, input_dim_, k, std::move(p), fit_rows_);
    }
    default:
      throw ConfigError(std::string(to_string(kind_)) + " cannot be truncated");
  }
}

FittedReducer fit(const ReducerSpec& spec, const MatrixD& train) {
  if (train.rows() == 0) throw ConfigError("cannot fit a reducer on zero rows");
  const auto d = static_cast<std::size_t>(train.cols());
  const auto n = static_cast<std::size_t>(train.rows());
  switch (spec.kind) {
    case ReducerKind::kIdentity:
      return FittedReducer(ReducerKind::kIdentity, d, d, IdentityParams{}, all_rows(n));
    case ReducerKind::kRandomSelect:
      return fit_random_select(spec, d, n);
    case ReducerKind::kPca:
      return fit_pca(spec, train);
    case ReducerKind::kSvd:
      return fit_svd(spec, train);
    case ReducerKind::kKpca:
      return fit_kpca(spec, train);
    case ReducerKind::kGrp:
      return fit_grp(spec, d, n);
  }
  throw ConfigError("unknown reducer kind");
}

FittedReducer fit(const ReducerSpec& spec, const store::EmbeddingDataset& train) {
  if (train.size() == 0) throw ConfigError("cannot fit a reducer on zero rows");
  const auto d = train.dim();
  const auto n = train.size();
  // These never look at the data values; skip the double conversion.
  switch (spec.kind) {
    case ReducerKind::kIdentity:
      return FittedReducer(ReducerKind::kIdentity, d, d, IdentityParams{}, all_rows(n));
    case ReducerKind::kRandomSelect:
      return fit_random_select(spec, d, n);
    case ReducerKind::kGrp:
      return fit_grp(spec, d, n);
    default:
      return fit(spec, to_double(train.samples()));
  }
}

}  // namespace repsel::reduce
