#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace bitopic {

// Dense row-major matrix. Just enough surface for count tables and
// row-stochastic distributions; rows are contiguous so hot loops can walk raw
// pointers.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int64_t rows, int64_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {
    assert(rows >= 0 && cols >= 0);
  }

  T* operator[](int64_t r) {
    assert(r >= 0 && r < rows_);
    return data_.data() + r * cols_;
  }
  const T* operator[](int64_t r) const {
    assert(r >= 0 && r < rows_);
    return data_.data() + r * cols_;
  }

  int64_t rows() const { return rows_; }
  int64_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  void fill(T v) { data_.assign(data_.size(), v); }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  int64_t rows_ = 0;
  int64_t cols_ = 0;
  std::vector<T> data_;
};

}  // namespace bitopic
