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

#include "repsel/reduce/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "repsel/error.hpp"

namespace repsel::reduce {

namespace {

void check_symmetric(const MatrixD& a) {
  if (a.rows() != a.cols()) throw DimensionError("matrix is not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw DataError("matrix is not symmetric");
  }
}

SymmetricEigen sorted_descending(const VectorD& values, const MatrixD& vectors,
                                 int sweeps) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return values(x) > values(y);
  });
  SymmetricEigen out;
  out.values.resize(values.size());
  out.vectors.resize(vectors.rows(), vectors.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto dst = static_cast<Eigen::Index>(i);
    out.values(dst) = values(order[i]);
    out.vectors.col(dst) = vectors.col(order[i]);
  }
  out.sweeps = sweeps;
  return out;
}

}  // namespace

SymmetricEigen jacobi_eigh(const MatrixD& input, double tolerance, int max_sweeps) {
  check_symmetric(input);
  const Eigen::Index n = input.rows();
  // Work on the exactly symmetric part.
  MatrixD a = 0.5 * (input + input.transpose());
  MatrixD v = MatrixD::Identity(n, n);
  const double norm = a.norm();

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index q = 1; q < n; ++q) {
      off += a.col(q).head(q).squaredNorm();
    }
    if (std::sqrt(2.0 * off) <= tolerance * norm) break;

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // A <- A J, then A <- J^T A; columns are contiguous, rows strided.
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return sorted_descending(a.diagonal(), v, sweep);
}

SymmetricEigen tridiagonal_eigh(const MatrixD& input) {
  check_symmetric(input);
  const Eigen::Index n = input.rows();
  if (n == 0) return {};
  MatrixD v = 0.5 * (input + input.transpose());
  VectorD d(n);
  VectorD e = VectorD::Zero(n);

  // Householder reduction to tridiagonal form; v accumulates the transform.
  for (Eigen::Index j = 0; j < n; ++j) d(j) = v(n - 1, j);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (Eigen::Index k = 0; k < i; ++k) scale += std::abs(d(k));
    if (scale == 0.0) {
      e(i) = d(i - 1);
      for (Eigen::Index j = 0; j < i; ++j) {
        d(j) = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (Eigen::Index k = 0; k < i; ++k) {
        d(k) /= scale;
        h += d(k) * d(k);
      }
      double f = d(i - 1);
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e(i) = scale * g;
      h -= f * g;
      d(i - 1) = f - g;
      for (Eigen::Index j = 0; j < i; ++j) e(j) = 0.0;

      for (Eigen::Index j = 0; j < i; ++j) {
        f = d(j);
        v(j, i) = f;
        g = e(j) + v(j, j) * f;
        for (Eigen::Index k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d(k);
          e(k) += v(k, j) * f;
        }
        e(j) = g;
      }
      f = 0.0;
      for (Eigen::Index j = 0; j < i; ++j) {
        e(j) /= h;
        f += e(j) * d(j);
      }
      const double hh = f / (h + h);
      for (Eigen::Index j = 0; j < i; ++j) e(j) -= hh * d(j);
      for (Eigen::Index j = 0; j < i; ++j) {
        f = d(j);
        g = e(j);
        for (Eigen::Index k = j; k <= i - 1; ++k) {
          v(k, j) -= (f * e(k) + g * d(k));
        }
        d(j) = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d(i) = h;
  }

  for (Eigen::Index i = 0; i < n - 1; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d(i + 1);
    if (h != 0.0) {
      for (Eigen::Index k = 0; k <= i; ++k) d(k) = v(k, i + 1) / h;
      for (Eigen::Index j = 0; j <= i; ++j) {
        double g = 0.0;
        for (Eigen::Index k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (Eigen::Index k = 0; k <= i; ++k) v(k, j) -= g * d(k);
      }
    }
    for (Eigen::Index k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    d(j) = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e(0) = 0.0;

  // Implicit QL on the tridiagonal matrix (d diagonal, e sub-diagonal).
  for (Eigen::Index i = 1; i < n; ++i) e(i - 1) = e(i);
  e(n - 1) = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  int iterations = 0;
  for (Eigen::Index l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d(l)) + std::abs(e(l)));
    Eigen::Index m = l;
    while (m < n) {
      if (std::abs(e(m)) <= eps * tst1) break;
      ++m;
    }
    if (m == n) m = n - 1;

    if (m > l) {
      do {
        ++iterations;
        double g = d(l);
        double p = (d(l + 1) - g) / (2.0 * e(l));
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d(l) = e(l) / (p + r);
        d(l + 1) = e(l) * (p + r);
        const double dl1 = d(l + 1);
        double h = g - d(l);
        for (Eigen::Index i = l + 2; i < n; ++i) d(i) -= h;
        f += h;

        p = d(m);
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        const double el1 = e(l + 1);
        double s = 0.0;
        double s2 = 0.0;
        for (Eigen::Index i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e(i);
          h = c * p;
          r = std::hypot(p, e(i));
          e(i + 1) = s * r;
          s = e(i) / r;
          c = p / r;
          p = c * d(i) - s * g;
          d(i + 1) = h + s * (c * g + s * d(i));
          for (Eigen::Index k = 0; k < n; ++k) {
            h = v(k, i + 1);
            v(k, i + 1) = s * v(k, i) + c * h;
            v(k, i) = c * v(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e(l) / dl1;
        e(l) = s * p;
        d(l) = c * p;
      } while (std::abs(e(l)) > eps * tst1);
    }
    d(l) += f;
    e(l) = 0.0;
  }
  return sorted_descending(d, v, iterations);
}

SymmetricEigen symmetric_eigh(const MatrixD& a) {
  if (static_cast<std::size_t>(a.rows()) <= kJacobiMaxOrder) return jacobi_eigh(a);
  return tridiagonal_eigh(a);
}

MatrixD complete_orthonormal(const MatrixD& q, Eigen::Index cols) {
  const Eigen::Index rows = q.rows();
  if (cols > rows) throw DimensionError("cannot complete more columns than rows");
  MatrixD out(rows, cols);
  Eigen::Index have = std::min(q.cols(), cols);
  out.leftCols(have) = q.leftCols(have);
  // Gram-Schmidt (twice) over the canonical basis.
  for (Eigen::Index basis = 0; basis < rows && have < cols; ++basis) {
    VectorD candidate = VectorD::Unit(rows, basis);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < have; ++j) {
        candidate -= out.col(j).dot(candidate) * out.col(j);
      }
    }
    const double norm = candidate.norm();
    if (norm > 1e-6) {
      out.col(have) = candidate / norm;
      ++have;
    }
  }
  return out;
}

ThinSvd svd_thin(const MatrixD& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index d = a.cols();
  const Eigen::Index r = std::min(n, d);
  const bool tall = n >= d;

  // Eigenvectors of the smaller Gram matrix give one side directly.
  const MatrixD gram = tall ? MatrixD(a.transpose() * a) : MatrixD(a * a.transpose());
  const auto eig = symmetric_eigh(gram);

  // Singular values are taken as |A v| rather than sqrt(lambda): a null
  // direction then comes out at rounding level (~eps * s_max) instead of
  // ~sqrt(eps) * s_max, so the relative cutoff below can recognise it.
  MatrixD known = eig.vectors.leftCols(r);
  MatrixD images(tall ? n : d, r);
  VectorD norms(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    images.col(i) = tall ? VectorD(a * known.col(i)) : VectorD(a.transpose() * known.col(i));
    norms(i) = images.col(i).norm();
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return norms(x) > norms(y); });

  ThinSvd out;
  out.s.resize(r);
  MatrixD sorted_known(known.rows(), r);
  MatrixD sorted_images(images.rows(), r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto src = order[static_cast<std::size_t>(i)];
    out.s(i) = norms(src);
    sorted_known.col(i) = known.col(src);
    sorted_images.col(i) = images.col(src);
  }
  known = std::move(sorted_known);

  const double cutoff = 1e-10 * (r > 0 ? out.s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < r && out.s(rank) > cutoff && out.s(rank) > 0.0) ++rank;
  out.s.tail(r - rank).setZero();

  MatrixD other(tall ? n : d, rank);
  for (Eigen::Index i = 0; i < rank; ++i) other.col(i) = sorted_images.col(i) / out.s(i);
  // Re-orthonormalise the recovered side; rounding in A*v/s leaves it slightly
  // off for small singular values.
  for (Eigen::Index i = 0; i < rank; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      other.col(i) -= other.col(j).dot(other.col(i)) * other.col(j);
    }
    other.col(i).normalize();
  }
  MatrixD completed = complete_orthonormal(other, r);

  if (tall) {
    out.v = std::move(known);
    out.u = std::move(completed);
  } else {
    out.u = std::move(known);
    out.v = std::move(completed);
  }
  canonicalize_signs(out.v, &out.u);
  return out;
}

void canonicalize_signs(MatrixD& vectors, MatrixD* partner) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, j) < 0) {
      vectors.col(j) *= -1.0;
      if (partner != nullptr && j < partner->cols()) partner->col(j) *= -1.0;
    }
  }
}

}  // namespace repsel::reduce
