#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "isac/common.hpp"

namespace isac {

/// Dense row-major tensor of fixed rank. The last index is contiguous.
template <typename T, std::size_t Rank>
class Tensor {
 public:
  using Shape = std::array<std::size_t, Rank>;

  Tensor() { shape_.fill(0); }
  explicit Tensor(const Shape& shape, T fill = T{})
      : shape_(shape), data_(count(shape), fill) {}

  const Shape& shape() const { return shape_; }
  std::size_t dim(std::size_t axis) const { return shape_[axis]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  template <typename... I>
  T& operator()(I... idx) {
    static_assert(sizeof...(I) == Rank);
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <typename... I>
  const T& operator()(I... idx) const {
    static_assert(sizeof...(I) == Rank);
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  /// Stride (in elements) of the given axis.
  std::size_t stride(std::size_t axis) const {
    std::size_t s = 1;
    for (std::size_t a = Rank; a-- > axis + 1;) s *= shape_[a];
    return s;
  }

  static std::size_t count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
  }

 private:
  std::size_t offset(const std::array<std::size_t, Rank>& idx) const {
    std::size_t off = 0;
    for (std::size_t a = 0; a < Rank; ++a) off = off * shape_[a] + idx[a];
    return off;
  }

  Shape shape_;
  std::vector<T> data_;
};

using CTensor3 = Tensor<cplx, 3>;
using RMatrix = Tensor<double, 2>;
using RTensor4 = Tensor<double, 4>;
using Mask = Tensor<std::uint8_t, 2>;

template <typename T, std::size_t Rank>
std::string shape_string(const std::array<T, Rank>& shape) {
  std::string s = "(";
  for (std::size_t a = 0; a < Rank; ++a) {
    if (a) s += " x ";
    s += std::to_string(shape[a]);
  }
  return s + ")";
}

}  // namespace isac
