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

#include <fstream>
#include <string>

#include "repsel/binio.hpp"
#include "repsel/error.hpp"
#include "repsel/reduce/reducer.hpp"

namespace repsel::reduce {

namespace {

constexpr char kMagic[5] = "EADR";
constexpr std::uint16_t kVersion = 1;

void put_block(std::ostream& out, const MatrixD& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      detail::put_f32(out, static_cast<float>(m(i, j)));
    }
  }
}

void put_block(std::ostream& out, const VectorD& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    detail::put_f32(out, static_cast<float>(v(i)));
  }
}

MatrixD get_block(std::istream& in, std::size_t rows, std::size_t cols) {
  MatrixD m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = detail::get_f32(in, "reducer parameters");
    }
  }
  return m;
}

VectorD get_vector(std::istream& in, std::size_t n) {
  VectorD v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = detail::get_f32(in, "reducer parameters");
  }
  return v;
}

}  // namespace

void save_reducer(const FittedReducer& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  detail::put_magic(out, kMagic);
  detail::put_le<std::uint16_t>(out, kVersion);
  detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(r.kind()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.input_dim()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.output_dim()));

  switch (r.kind()) {
    case ReducerKind::kIdentity:
      break;
    case ReducerKind::kRandomSelect:
      for (auto i : r.as<SelectionParams>().indices) detail::put_le<std::uint32_t>(out, i);
      break;
    case ReducerKind::kPca: {
      const auto& p = r.as<PcaParams>();
      put_block(out, p.mean);
      put_block(out, p.components);
      put_block(out, p.explained_variance);
      break;
    }
    case ReducerKind::kSvd: {
      const auto& p = r.as<SvdParams>();
      put_block(out, p.components);
      put_block(out, p.singular_values);
      break;
    }
    case ReducerKind::kKpca: {
      const auto& p = r.as<KpcaParams>();
      detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.retained.rows()));
      detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(p.kernel));
      detail::put_le<std::uint16_t>(out, 0);
      detail::put_f32(out, static_cast<float>(p.gamma));
      put_block(out, p.retained);
      put_block(out, p.eigenvectors);
      put_block(out, p.eigenvalues);
      put_block(out, p.kernel_row_means);
      detail::put_f32(out, static_cast<float>(p.kernel_grand_mean));
      break;
    }
    case ReducerKind::kGrp:
      put_block(out, r.as<GrpParams>().projection);
      break;
  }
  if (!out) throw IoError("write failed for " + path.string());
}

FittedReducer load_reducer(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  detail::expect_magic(in, kMagic);
  if (detail::get_le<std::uint16_t>(in, "version") != kVersion) {
    throw FormatError("unsupported reducer file version");
  }
  const auto tag = detail::get_le<std::uint16_t>(in, "kind");
  if (tag > static_cast<std::uint16_t>(ReducerKind::kIdentity)) {
    throw FormatError("unknown reducer kind tag " + std::to_string(tag));
  }
  const auto kind = static_cast<ReducerKind>(tag);
  const std::size_t d = detail::get_le<std::uint32_t>(in, "input dim");
  const std::size_t k = detail::get_le<std::uint32_t>(in, "output dim");

  switch (kind) {
    case ReducerKind::kIdentity:
      return FittedReducer(kind, d, k, IdentityParams{});
    case ReducerKind::kRandomSelect: {
      SelectionParams p;
      for (std::size_t i = 0; i < k; ++i) {
        p.indices.push_back(detail::get_le<std::uint32_t>(in, "indices"));
      }
      return FittedReducer(kind, d, k, std::move(p));
    }
    case ReducerKind::kPca: {
      PcaParams p;
      p.mean = get_vector(in, d);
      p.components = get_block(in, d, k);
      p.explained_variance = get_vector(in, k);
      return FittedReducer(kind, d, k, std::move(p));
    }
    case ReducerKind::kSvd: {
      SvdParams p;
      p.components = get_block(in, d, k);
      p.singular_values = get_vector(in, k);
      return FittedReducer(kind, d, k, std::move(p));
    }
    case ReducerKind::kKpca: {
      KpcaParams p;
      const std::size_t n = detail::get_le<std::uint32_t>(in, "kpca rows");
      p.kernel = static_cast<KernelKind>(detail::get_le<std::uint16_t>(in, "kernel"));
      (void)detail::get_le<std::uint16_t>(in, "reserved");
      p.gamma = detail::get_f32(in, "gamma");
      p.retained = get_block(in, n, d);
      p.eigenvectors = get_block(in, n, k);
      p.eigenvalues = get_vector(in, k);
      p.kernel_row_means = get_vector(in, n);
      p.kernel_grand_mean = detail::get_f32(in, "grand mean");
      return FittedReducer(kind, d, k, std::move(p));
    }
    case ReducerKind::kGrp: {
      GrpParams p;
      p.projection = get_block(in, d, k);
      return FittedReducer(kind, d, k, std::move(p));
    }
  }
  throw FormatError("unknown reducer kind");
}

}  // namespace repsel::reduce
