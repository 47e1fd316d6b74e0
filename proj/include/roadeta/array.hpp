#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "roadeta/errors.hpp"

namespace roadeta::ad {

// Dense row-major array of doubles. Rank 1 or 2 in practice; a scalar is
// shape {1}. Compute precision is fixed at 64-bit; checkpoints may store
// 32-bit payloads (see checkpoint.hpp).
struct Array {
  std::vector<int64_t> shape;
  std::vector<double> data;

  Array() = default;
  Array(std::vector<int64_t> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    if (size() != static_cast<int64_t>(data.size()))
      throw ShapeMismatch("array data length does not match shape");
  }

  static Array zeros(std::vector<int64_t> s) {
    int64_t n = 1;
    for (auto d : s) n *= d;
    return Array(std::move(s), std::vector<double>(static_cast<size_t>(n), 0.0));
  }
  static Array scalar(double v) { return Array({1}, {v}); }
  static Array vec(std::vector<double> v) {
    auto n = static_cast<int64_t>(v.size());
    return Array({n}, std::move(v));
  }

  int64_t size() const {
    int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }
  int64_t rank() const { return static_cast<int64_t>(shape.size()); }
  int64_t rows() const { return shape.empty() ? 1 : shape[0]; }
  int64_t cols() const { return rank() >= 2 ? shape[1] : 1; }

  double& at(int64_t r, int64_t c) { return data[static_cast<size_t>(r * cols() + c)]; }
  double at(int64_t r, int64_t c) const { return data[static_cast<size_t>(r * cols() + c)]; }
  double& operator[](int64_t i) { return data[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return data[static_cast<size_t>(i)]; }

  bool same_shape(const Array& o) const { return shape == o.shape; }
};

}  // namespace roadeta::ad
