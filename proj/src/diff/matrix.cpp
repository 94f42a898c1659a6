/*
 * Copyright 2026 The MTMT Uplift Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "diff/matrix.hpp"

#include <cmath>

#include "core/error.hpp"

namespace mtmt::diff {

std::string shape_string(size_t rows, size_t cols) {
  return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

Matrix::Matrix(size_t rows, size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(size_t rows, size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check(data_.size() == rows * cols, ErrorKind::kShape,
        "buffer of " + std::to_string(data_.size()) + " values cannot form " +
            diff::shape_string(rows, cols));
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const size_t n = rows.size();
  const size_t m = n == 0 ? 0 : rows.begin()->size();
  Matrix out(n, m);
  size_t r = 0;
  for (const auto& row : rows) {
    check(row.size() == m, ErrorKind::kShape, "ragged initializer rows");
    size_t c = 0;
    for (double v : row) out(r, c++) = v;
    ++r;
  }
  return out;
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::row_vector(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::identity(size_t n) {
  Matrix out(n, n);
  for (size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

std::string Matrix::shape_string() const { return diff::shape_string(rows_, cols_); }

void Matrix::fill(double value) {
  for (double& v : data_) v = value;
}

Matrix Matrix::reshaped(size_t rows, size_t cols) const {
  check(rows * cols == data_.size(), ErrorKind::kShape,
        "cannot reshape " + shape_string() + " to " + diff::shape_string(rows, cols));
  return Matrix(rows, cols, data_);
}

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_);
  for (size_t r = 0; r < rows_; ++r)
    for (size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& out) {
  const size_t m = a.rows(), k = a.cols(), n = b.cols();
  const double* pa = a.values().data();
  const double* pb = b.values().data();
  double* po = out.values().data();
  for (size_t i = 0; i < m; ++i) {
    double* orow = po + i * n;
    for (size_t p = 0; p < k; ++p) {
      const double s = pa[i * k + p];
      if (s == 0.0) continue;
      const double* brow = pb + p * n;
      for (size_t j = 0; j < n; ++j) orow[j] += s * brow[j];
    }
  }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  const size_t m = a.rows(), k = a.cols(), n = b.rows();
  const double* pa = a.values().data();
  const double* pb = b.values().data();
  double* po = out.values().data();
  for (size_t i = 0; i < m; ++i) {
    const double* arow = pa + i * k;
    for (size_t j = 0; j < n; ++j) {
      const double* brow = pb + j * k;
      // Four partial sums let the compiler vectorize without reassociation.
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      size_t p = 0;
      for (; p + 4 <= k; p += 4) {
        s0 += arow[p] * brow[p];
        s1 += arow[p + 1] * brow[p + 1];
        s2 += arow[p + 2] * brow[p + 2];
        s3 += arow[p + 3] * brow[p + 3];
      }
      for (; p < k; ++p) s0 += arow[p] * brow[p];
      po[i * n + j] += (s0 + s1) + (s2 + s3);
    }
  }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  // a is k x m, b is k x n, out is m x n.
  const size_t k = a.rows(), m = a.cols(), n = b.cols();
  const double* pa = a.values().data();
  const double* pb = b.values().data();
  double* po = out.values().data();
  for (size_t p = 0; p < k; ++p) {
    const double* arow = pa + p * m;
    const double* brow = pb + p * n;
    for (size_t i = 0; i < m; ++i) {
      const double s = arow[i];
      if (s == 0.0) continue;
      double* orow = po + i * n;
      for (size_t j = 0; j < n; ++j) orow[j] += s * brow[j];
    }
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  check(a.cols() == b.rows(), ErrorKind::kShape,
        "matmul inner dimensions differ: " + a.shape_string() + " x " + b.shape_string());
  Matrix out(a.rows(), b.cols());
  gemm_nn(a, b, out);
  return out;
}

bool all_finite(const Matrix& m) {
  for (double v : m.values())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace mtmt::diff
