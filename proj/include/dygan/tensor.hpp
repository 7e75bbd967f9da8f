/* Copyright 2026 The dygan Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dygan/errors.hpp"

namespace dygan {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

/// Seeded pseudorandom source used by every initializer.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Uniform and normal draws are derived here (53-bit mantissa
/// uniform, Box-Muller normal) instead of through <random> distributions,
/// which are implementation-defined; the same seed therefore yields the same
/// values on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  // Unbiased integer in [0, n).
  std::size_t index(std::size_t n);

  // Child generator for an independent stream; depends only on (seed, stream).
  Rng fork(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Dense row-major tensor.
///
/// Extents are always >= 1 and data().size() == product(shape). A default
/// constructed tensor is a rank-0 scalar holding 0.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() : data_(1, T{0}) {}
  explicit BasicTensor(Shape shape, T fill = T{0});
  BasicTensor(Shape shape, std::vector<T> data);

  static BasicTensor zeros(Shape shape) { return BasicTensor(std::move(shape)); }
  static BasicTensor full(Shape shape, T value) { return BasicTensor(std::move(shape), value); }
  static BasicTensor randn(Shape shape, Rng& rng, double stddev = 1.0);
  static BasicTensor uniform(Shape shape, Rng& rng, double lo, double hi);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const { return data_.size(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  template <typename... I>
  T& operator()(I... idx) {
    return data_[offset_of(static_cast<std::size_t>(idx)...)];
  }
  template <typename... I>
  const T& operator()(I... idx) const {
    return data_[offset_of(static_cast<std::size_t>(idx)...)];
  }

  // Flat offset of a full multi-index; throws DimensionError when out of range.
  std::size_t offset(std::span<const std::size_t> index) const;
  Shape unravel(std::size_t flat) const;

  BasicTensor reshaped(Shape shape) const&;
  BasicTensor reshaped(Shape shape) &&;

  template <typename U>
  BasicTensor<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return BasicTensor<U>(shape_, std::move(out));
  }

  BasicTensor zeros_like() const { return BasicTensor(shape_); }
  void fill(T value);
  void set_zero() { fill(T{0}); }

  BasicTensor& operator+=(const BasicTensor& other);
  BasicTensor& operator-=(const BasicTensor& other);
  BasicTensor& operator*=(T scale);

  bool operator==(const BasicTensor& other) const = default;

 private:
  template <typename... I>
  std::size_t offset_of(I... idx) const {
    const std::size_t index[] = {idx...};
    return offset(index);
  }

  Shape shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

template <typename T>
BasicTensor<T> operator+(BasicTensor<T> a, const BasicTensor<T>& b) {
  a += b;
  return a;
}
template <typename T>
BasicTensor<T> operator-(BasicTensor<T> a, const BasicTensor<T>& b) {
  a -= b;
  return a;
}

// Throws DimensionError naming both shapes unless they are equal.
void require_same_shape(const Shape& a, const Shape& b, const char* what);
void require_rank(const Shape& s, std::size_t rank, const char* what);

// Largest absolute elementwise difference.
template <typename T>
double max_abs_diff(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <typename T>
bool all_finite(const BasicTensor<T>& t);

// --- numeric ops -----------------------------------------------------------

template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <typename T>
T sigmoid(T x);

// out[..., i] = x[..., i] * sigmoid(x[..., m + i]) for last extent 2m.
template <typename T>
BasicTensor<T> glu(const BasicTensor<T>& x);
template <typename T>
BasicTensor<T> glu_backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out);

inline constexpr double kLayerNormEps = 1e-5;

template <typename T>
struct LayerNormCache {
  BasicTensor<T> normalized;  // (x - mean) * inv_std, same shape as x
  std::vector<T> inv_std;     // one per position
};

// Normalizes every position of a [..., c] tensor across its last axis, then
// applies gain and bias ([c] each).
template <typename T>
BasicTensor<T> layer_norm(const BasicTensor<T>& x, const BasicTensor<T>& gain,
                          const BasicTensor<T>& bias, double eps = kLayerNormEps,
                          LayerNormCache<T>* cache = nullptr);

// Accumulates into grad_gain / grad_bias and returns the input gradient.
template <typename T>
BasicTensor<T> layer_norm_backward(const LayerNormCache<T>& cache, const BasicTensor<T>& gain,
                                   const BasicTensor<T>& grad_out, BasicTensor<T>& grad_gain,
                                   BasicTensor<T>& grad_bias);

}  // namespace dygan
