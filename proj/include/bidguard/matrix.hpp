// Copyright 2026 The Bidguard Authors
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

#ifndef BIDGUARD_MATRIX_HPP_
#define BIDGUARD_MATRIX_HPP_

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bidguard {

// Dense row-major matrix. Rows index papers, columns index reviewers
// throughout the library.
template <typename T>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative shape");
  }
  Matrix(int rows, int cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != static_cast<size_t>(rows) * cols)
      throw std::invalid_argument("Matrix: data size does not match shape");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  const T& operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  T row_sum(int r) const {
    T s{};
    for (int c = 0; c < cols_; ++c) s += (*this)(r, c);
    return s;
  }
  T col_sum(int c) const {
    T s{};
    for (int r = 0; r < rows_; ++r) s += (*this)(r, c);
    return s;
  }

 private:
  int rows_, cols_;
  std::vector<T> data_;
};

using DoubleMatrix = Matrix<double>;
using IntMatrix = Matrix<std::int64_t>;
// std::vector<bool> has no data(); byte-backed bool matrix instead.
using BoolMatrix = Matrix<std::uint8_t>;

inline void require_same_shape(const DoubleMatrix& a, const DoubleMatrix& b,
                               const std::string& what) {
  if (!a.same_shape(b))
    throw std::invalid_argument("shape mismatch: " + what);
}

}  // namespace bidguard

#endif  // BIDGUARD_MATRIX_HPP_
