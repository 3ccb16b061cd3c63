// Copyright 2026 The contactflow Authors
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

#include "nn/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace cf::nn {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  Require(data_.size() == rows_ * cols_, ErrorCode::kDimension,
          "matrix data length does not match shape");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    Require(r.size() == cols_, ErrorCode::kDimension, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::RowVector(std::span<const double> values) {
  return Matrix(1, values.size(), {values.begin(), values.end()});
}

Matrix Matrix::ColumnVector(std::span<const double> values) {
  return Matrix(values.size(), 1, {values.begin(), values.end()});
}

Matrix Matrix::Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Matrix::ShapeString() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix MatMul(const Matrix& a, const Matrix& b) {
  Require(a.cols() == b.rows(), ErrorCode::kDimension,
          "matmul " + a.ShapeString() + " * " + b.ShapeString());
  Matrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* o = out.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = a(i, k);
      if (s == 0.0) continue;
      const double* br = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) o[j] += s * br[j];
    }
  }
  return out;
}

Matrix MatMulTransB(const Matrix& a, const Matrix& b) {
  Require(a.cols() == b.cols(), ErrorCode::kDimension,
          "matmul " + a.ShapeString() + " * (" + b.ShapeString() + ")^T");
  Matrix out(a.rows(), b.rows());
  const std::size_t d = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ar = a.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* br = b.row(j).data();
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += ar[k] * br[k];
      out(i, j) = s;
    }
  }
  return out;
}

Matrix MatMulTransA(const Matrix& a, const Matrix& b) {
  Require(a.rows() == b.rows(), ErrorCode::kDimension,
          "matmul (" + a.ShapeString() + ")^T * " + b.ShapeString());
  Matrix out(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* br = b.row(r).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double s = a(r, i);
      if (s == 0.0) continue;
      double* o = out.row(i).data();
      for (std::size_t j = 0; j < n; ++j) o[j] += s * br[j];
    }
  }
  return out;
}

Matrix Transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix ConcatRows(std::span<const Matrix> parts) {
  std::size_t rows = 0;
  const std::size_t cols = parts.empty() ? 0 : parts.front().cols();
  for (const auto& p : parts) {
    Require(p.cols() == cols, ErrorCode::kDimension,
            "row concatenation with mismatched widths");
    rows += p.rows();
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const auto& p : parts)
    data.insert(data.end(), p.values().begin(), p.values().end());
  return Matrix(rows, cols, std::move(data));
}

Matrix ConcatCols(std::span<const Matrix> parts) {
  const std::size_t rows = parts.empty() ? 0 : parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    Require(p.rows() == rows, ErrorCode::kDimension,
            "column concatenation with mismatched heights");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t offset = 0;
    for (const auto& p : parts) {
      std::copy(p.row(r).begin(), p.row(r).end(), out.row(r).begin() + offset);
      offset += p.cols();
    }
  }
  return out;
}

Matrix SliceRows(const Matrix& a, std::size_t begin, std::size_t end) {
  Require(begin <= end && end <= a.rows(), ErrorCode::kDimension,
          "row slice out of range");
  std::vector<double> data(a.values().begin() + begin * a.cols(),
                           a.values().begin() + end * a.cols());
  return Matrix(end - begin, a.cols(), std::move(data));
}

double MaxAbsDiff(const Matrix& a, const Matrix& b) {
  Require(a.SameShape(b), ErrorCode::kDimension, "shape mismatch in comparison");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace cf::nn
