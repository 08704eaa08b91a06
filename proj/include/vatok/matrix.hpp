#pragma once

#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

namespace vatok {

/// Non-owning row-major view of a rows x cols block of values.
template <typename T>
struct MatrixView {
  std::span<T> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  MatrixView() = default;
  MatrixView(std::span<T> values, std::size_t r, std::size_t c) : data(values), rows(r), cols(c) {}

  // Allow MatrixView<T> -> MatrixView<const T>.
  template <typename U>
    requires std::is_same_v<const U, T> && (!std::is_same_v<U, T>)
  MatrixView(MatrixView<U> other) : data(other.data), rows(other.rows), cols(other.cols) {}

  [[nodiscard]] std::span<T> row(std::size_t r) const { return data.subspan(r * cols, cols); }
  [[nodiscard]] T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Owning row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {}

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  [[nodiscard]] T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  [[nodiscard]] const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  [[nodiscard]] std::span<T> row(std::size_t r) { return std::span<T>(data_).subspan(r * cols_, cols_); }
  [[nodiscard]] std::span<const T> row(std::size_t r) const {
    return std::span<const T>(data_).subspan(r * cols_, cols_);
  }

  [[nodiscard]] MatrixView<T> view() { return {std::span<T>(data_), rows_, cols_}; }
  [[nodiscard]] MatrixView<const T> view() const { return {std::span<const T>(data_), rows_, cols_}; }

  [[nodiscard]] const std::vector<T>& values() const { return data_; }
  [[nodiscard]] std::vector<T>& values() { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

}  // namespace vatok
