#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "covertnet/tensor.hpp"

namespace covertnet {

/// Named tensors in insertion order.
class ParamSet {
 public:
  using Entry = std::pair<std::string, Tensor>;

  void insert(std::string name, Tensor value);

  bool contains(const std::string& name) const { return find(name) != nullptr; }
  const Tensor* find(const std::string& name) const;
  Tensor* find(const std::string& name);
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t scalar_count() const noexcept;

  auto begin() noexcept { return entries_.begin(); }
  auto end() noexcept { return entries_.end(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  /// Same names, order, and shapes.
  bool congruent(const ParamSet& other) const;

  /// Element-wise sum with a congruent set.
  ParamSet& operator+=(const ParamSet& other);
  ParamSet& operator*=(double s);

  /// Zero tensors with the same names and shapes.
  ParamSet zeros_like() const;

  bool operator==(const ParamSet&) const = default;

 private:
  std::vector<Entry> entries_;
};

/// Gradients keyed and shaped like the ParamSet they belong to.
using GradSet = ParamSet;

/// FNV-1a over names, shapes and value bit patterns, as 16 hex digits.
std::string digest(const ParamSet& params);

}  // namespace covertnet
