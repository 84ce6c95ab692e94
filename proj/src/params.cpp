#include "covertnet/params.hpp"

#include <bit>
#include <cstdio>

#include "covertnet/error.hpp"

namespace covertnet {

void ParamSet::insert(std::string name, Tensor value) {
  if (contains(name)) throw InvalidInput("ParamSet: duplicate name '" + name + "'");
  entries_.emplace_back(std::move(name), std::move(value));
}

const Tensor* ParamSet::find(const std::string& name) const {
  for (const auto& [n, t] : entries_)
    if (n == name) return &t;
  return nullptr;
}

Tensor* ParamSet::find(const std::string& name) {
  for (auto& [n, t] : entries_)
    if (n == name) return &t;
  return nullptr;
}

const Tensor& ParamSet::at(const std::string& name) const {
  if (const auto* t = find(name)) return *t;
  throw InvalidInput("ParamSet: no parameter '" + name + "'");
}

Tensor& ParamSet::at(const std::string& name) {
  if (auto* t = find(name)) return *t;
  throw InvalidInput("ParamSet: no parameter '" + name + "'");
}

std::size_t ParamSet::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second.size();
  return n;
}

bool ParamSet::congruent(const ParamSet& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].first != other.entries_[i].first || !entries_[i].second.same_shape(other.entries_[i].second))
      return false;
  return true;
}

ParamSet& ParamSet::operator+=(const ParamSet& other) {
  if (!congruent(other)) throw InvalidInput("ParamSet +=: sets are not congruent");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i].second += other.entries_[i].second;
  return *this;
}

ParamSet& ParamSet::operator*=(double s) {
  for (auto& e : entries_) e.second *= s;
  return *this;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet z;
  for (const auto& [n, t] : entries_) z.insert(n, Tensor(t.rows(), t.cols()));
  return z;
}

std::string digest(const ParamSet& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [name, t] : params) {
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    feed(t.rows());
    feed(t.cols());
    for (double v : t.values()) feed(std::bit_cast<std::uint64_t>(v));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace covertnet
