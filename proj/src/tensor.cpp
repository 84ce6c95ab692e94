#include "covertnet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covertnet/error.hpp"

namespace covertnet {

namespace {

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

}  // namespace

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) throw InvalidInput("Tensor: value count does not match shape");
}

Tensor Tensor::column(std::span<const double> v) { return Tensor(v.size(), 1, std::vector<double>(v.begin(), v.end())); }

double Tensor::item() const {
  if (data_.size() != 1) throw InvalidInput("Tensor::item: not a scalar (" + shape_str(*this) + ")");
  return data_[0];
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Tensor& Tensor::operator+=(const Tensor& o) {
  if (!same_shape(o)) throw InvalidInput("Tensor +=: shape mismatch " + shape_str(*this) + " vs " + shape_str(o));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (auto& x : data_) x *= s;
  return *this;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows())
    throw InvalidInput("matmul: inner dimensions differ (" + shape_str(a) + " * " + shape_str(b) + ")");
  Tensor out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Tensor transpose(const Tensor& a) {
  Tensor out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (auto& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor masked_softmax(const Tensor& scores, const BoolMatrix& mask) {
  if (mask.rows() != scores.rows() || mask.cols() != scores.cols())
    throw InvalidInput("masked_softmax: mask shape differs from scores " + shape_str(scores));
  Tensor out(scores.rows(), scores.cols());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    double peak = -INFINITY;
    for (std::size_t j = 0; j < scores.cols(); ++j)
      if (mask(i, j)) peak = std::max(peak, scores(i, j));
    if (peak == -INFINITY) throw InvalidInput("masked_softmax: row " + std::to_string(i) + " is fully masked");
    double total = 0.0;
    for (std::size_t j = 0; j < scores.cols(); ++j)
      if (mask(i, j)) total += out(i, j) = std::exp(scores(i, j) - peak);
    for (std::size_t j = 0; j < scores.cols(); ++j) out(i, j) /= total;
  }
  return out;
}

double mae_loss(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target))
    throw InvalidInput("mae_loss: shape mismatch " + shape_str(pred) + " vs " + shape_str(target));
  if (pred.size() == 0) throw InvalidInput("mae_loss: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(target[i] - pred[i]);
  return s / static_cast<double>(pred.size());
}

}  // namespace covertnet
