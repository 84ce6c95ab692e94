#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "covertnet/bool_matrix.hpp"

namespace covertnet {

/// Row-major 2-D array of doubles. Scalars are 1 x 1, bias rows are 1 x n.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Tensor scalar(double v) { return Tensor(1, 1, v); }
  /// Column vector.
  static Tensor column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::array<std::size_t, 2> shape() const noexcept { return {rows_, cols_}; }
  bool same_shape(const Tensor& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  double item() const;
  bool all_finite() const noexcept;

  Tensor& operator+=(const Tensor& o);
  Tensor& operator*=(double s);

  bool operator==(const Tensor&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor relu(const Tensor& x);

/// Row-wise softmax restricted to entries where `mask` is true; masked entries
/// are exactly 0. Each row needs at least one unmasked entry.
Tensor masked_softmax(const Tensor& scores, const BoolMatrix& mask);

/// Mean absolute error between two equally shaped tensors.
double mae_loss(const Tensor& pred, const Tensor& target);

}  // namespace covertnet
