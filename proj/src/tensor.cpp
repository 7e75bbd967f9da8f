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

#include "dygan/tensor.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dygan/kernels.hpp"

namespace dygan {

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": shape mismatch " + shape_str(a) + " vs " +
                         shape_str(b));
}

void require_rank(const Shape& s, std::size_t rank, const char* what) {
  if (s.size() != rank)
    throw DimensionError(std::string(what) + ": expected rank " + std::to_string(rank) +
                         ", got shape " + shape_str(s));
}

// --- Rng --------------------------------------------------------------------

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw ContractError("Rng::index: empty range");
  const std::uint64_t range = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return static_cast<std::size_t>(v % range);
}

Rng Rng::fork(std::uint64_t stream) const {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed_ + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return Rng(z);
}

// --- BasicTensor ------------------------------------------------------------

namespace {
void check_extents(const Shape& shape) {
  for (auto e : shape)
    if (e == 0) throw DimensionError("tensor extents must be >= 1, got " + shape_str(shape));
}
}  // namespace

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, T fill) : shape_(std::move(shape)) {
  check_extents(shape_);
  data_.assign(shape_numel(shape_), fill);
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_extents(shape_);
  if (data_.size() != shape_numel(shape_))
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str(shape_));
}

template <typename T>
BasicTensor<T> BasicTensor<T>::randn(Shape shape, Rng& rng, double stddev) {
  BasicTensor out(std::move(shape));
  for (auto& v : out.data_) v = static_cast<T>(stddev * rng.normal());
  return out;
}

template <typename T>
BasicTensor<T> BasicTensor<T>::uniform(Shape shape, Rng& rng, double lo, double hi) {
  BasicTensor out(std::move(shape));
  for (auto& v : out.data_) v = static_cast<T>(rng.uniform(lo, hi));
  return out;
}

template <typename T>
std::size_t BasicTensor<T>::dim(std::size_t axis) const {
  if (axis >= shape_.size())
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " +
                         shape_str(shape_));
  return shape_[axis];
}

template <typename T>
std::size_t BasicTensor<T>::offset(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size())
    throw DimensionError("index rank " + std::to_string(index.size()) + " does not match shape " +
                         shape_str(shape_));
  std::size_t flat = 0;
  for (std::size_t a = 0; a < index.size(); ++a) {
    if (index[a] >= shape_[a])
      throw DimensionError("index " + std::to_string(index[a]) + " out of range on axis " +
                           std::to_string(a) + " of " + shape_str(shape_));
    flat = flat * shape_[a] + index[a];
  }
  return flat;
}

template <typename T>
Shape BasicTensor<T>::unravel(std::size_t flat) const {
  if (flat >= data_.size())
    throw DimensionError("flat index " + std::to_string(flat) + " out of range for " +
                         shape_str(shape_));
  Shape idx(shape_.size());
  for (std::size_t a = shape_.size(); a-- > 0;) {
    idx[a] = flat % shape_[a];
    flat /= shape_[a];
  }
  return idx;
}

template <typename T>
BasicTensor<T> BasicTensor<T>::reshaped(Shape shape) const& {
  return BasicTensor(*this).reshaped(std::move(shape));
}

template <typename T>
BasicTensor<T> BasicTensor<T>::reshaped(Shape shape) && {
  check_extents(shape);
  if (shape_numel(shape) != data_.size())
    throw DimensionError("cannot reshape " + shape_str(shape_) + " to " + shape_str(shape));
  shape_ = std::move(shape);
  return std::move(*this);
}

template <typename T>
void BasicTensor<T>::fill(T value) {
  for (auto& v : data_) v = value;
}

template <typename T>
BasicTensor<T>& BasicTensor<T>::operator+=(const BasicTensor& other) {
  require_same_shape(shape_, other.shape_, "tensor +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

template <typename T>
BasicTensor<T>& BasicTensor<T>::operator-=(const BasicTensor& other) {
  require_same_shape(shape_, other.shape_, "tensor -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

template <typename T>
BasicTensor<T>& BasicTensor<T>::operator*=(T scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

template <typename T>
double max_abs_diff(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
  return m;
}

template <typename T>
bool all_finite(const BasicTensor<T>& t) {
  for (auto v : t.values())
    if (!std::isfinite(v)) return false;
  return true;
}

// --- ops ----------------------------------------------------------------------

template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
    throw DimensionError("matmul: incompatible shapes " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
  const std::size_t m = a.dim(0), n = a.dim(1), p = b.dim(1);
  BasicTensor<T> out({m, p});
  kernels::gemm_nn(m, n, p, a.data(), n, b.data(), p, out.data(), p);
  return out;
}

template <typename T>
T sigmoid(T x) {
  if (x >= T{0}) return T{1} / (T{1} + std::exp(-x));
  const T e = std::exp(x);
  return e / (T{1} + e);
}

namespace {
template <typename T>
std::size_t glu_half(const BasicTensor<T>& x) {
  if (x.rank() == 0 || x.shape().back() % 2 != 0)
    throw DimensionError("glu: last extent must be even, got shape " + shape_str(x.shape()));
  return x.shape().back() / 2;
}
}  // namespace

template <typename T>
BasicTensor<T> glu(const BasicTensor<T>& x) {
  const std::size_t m = glu_half(x);
  Shape out_shape = x.shape();
  out_shape.back() = m;
  BasicTensor<T> out(out_shape);
  const std::size_t rows = x.numel() / (2 * m);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = x.data() + r * 2 * m;
    T* o = out.data() + r * m;
    for (std::size_t i = 0; i < m; ++i) o[i] = in[i] * sigmoid(in[m + i]);
  }
  return out;
}

template <typename T>
BasicTensor<T> glu_backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out) {
  const std::size_t m = glu_half(x);
  Shape out_shape = x.shape();
  out_shape.back() = m;
  require_same_shape(grad_out.shape(), out_shape, "glu_backward");
  BasicTensor<T> grad(x.shape());
  const std::size_t rows = x.numel() / (2 * m);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = x.data() + r * 2 * m;
    const T* g = grad_out.data() + r * m;
    T* gx = grad.data() + r * 2 * m;
    for (std::size_t i = 0; i < m; ++i) {
      const T sg = sigmoid(in[m + i]);
      gx[i] = g[i] * sg;
      gx[m + i] = g[i] * in[i] * sg * (T{1} - sg);
    }
  }
  return grad;
}

template <typename T>
BasicTensor<T> layer_norm(const BasicTensor<T>& x, const BasicTensor<T>& gain,
                          const BasicTensor<T>& bias, double eps, LayerNormCache<T>* cache) {
  if (!(eps > 0.0)) throw ConfigError("layer_norm: eps must be positive");
  if (x.rank() == 0) throw DimensionError("layer_norm: input must have rank >= 1");
  const std::size_t c = x.shape().back();
  require_same_shape(gain.shape(), {c}, "layer_norm gain");
  require_same_shape(bias.shape(), {c}, "layer_norm bias");
  const std::size_t rows = x.numel() / c;
  BasicTensor<T> out(x.shape());
  if (cache) {
    cache->normalized = BasicTensor<T>(x.shape());
    cache->inv_std.assign(rows, T{0});
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = x.data() + r * c;
    T* o = out.data() + r * c;
    T mean = 0;
    for (std::size_t p = 0; p < c; ++p) mean += in[p];
    mean /= static_cast<T>(c);
    T var = 0;
    for (std::size_t p = 0; p < c; ++p) var += (in[p] - mean) * (in[p] - mean);
    var /= static_cast<T>(c);
    const T inv = T{1} / std::sqrt(var + static_cast<T>(eps));
    for (std::size_t p = 0; p < c; ++p) {
      const T xh = (in[p] - mean) * inv;
      o[p] = gain[p] * xh + bias[p];
      if (cache) cache->normalized[r * c + p] = xh;
    }
    if (cache) cache->inv_std[r] = inv;
  }
  return out;
}

template <typename T>
BasicTensor<T> layer_norm_backward(const LayerNormCache<T>& cache, const BasicTensor<T>& gain,
                                   const BasicTensor<T>& grad_out, BasicTensor<T>& grad_gain,
                                   BasicTensor<T>& grad_bias) {
  require_same_shape(grad_out.shape(), cache.normalized.shape(), "layer_norm_backward");
  const std::size_t c = gain.numel();
  const std::size_t rows = grad_out.numel() / c;
  if (cache.inv_std.size() != rows) throw ContractError("layer_norm_backward: stale cache");
  BasicTensor<T> grad(grad_out.shape());
  std::vector<T> dxh(c);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* g = grad_out.data() + r * c;
    const T* xh = cache.normalized.data() + r * c;
    T mean_d = 0, mean_dx = 0;
    for (std::size_t p = 0; p < c; ++p) {
      grad_gain[p] += g[p] * xh[p];
      grad_bias[p] += g[p];
      dxh[p] = g[p] * gain[p];
      mean_d += dxh[p];
      mean_dx += dxh[p] * xh[p];
    }
    mean_d /= static_cast<T>(c);
    mean_dx /= static_cast<T>(c);
    T* gx = grad.data() + r * c;
    for (std::size_t p = 0; p < c; ++p)
      gx[p] = cache.inv_std[r] * (dxh[p] - mean_d - xh[p] * mean_dx);
  }
  return grad;
}

#define DYGAN_INSTANTIATE(T)                                                                   \
  template class BasicTensor<T>;                                                              \
  template double max_abs_diff<T>(const BasicTensor<T>&, const BasicTensor<T>&);              \
  template bool all_finite<T>(const BasicTensor<T>&);                                         \
  template BasicTensor<T> matmul<T>(const BasicTensor<T>&, const BasicTensor<T>&);            \
  template T sigmoid<T>(T);                                                                   \
  template BasicTensor<T> glu<T>(const BasicTensor<T>&);                                      \
  template BasicTensor<T> glu_backward<T>(const BasicTensor<T>&, const BasicTensor<T>&);      \
  template BasicTensor<T> layer_norm<T>(const BasicTensor<T>&, const BasicTensor<T>&,         \
                                        const BasicTensor<T>&, double, LayerNormCache<T>*);   \
  template BasicTensor<T> layer_norm_backward<T>(const LayerNormCache<T>&,                    \
                                                 const BasicTensor<T>&, const BasicTensor<T>&,\
                                                 BasicTensor<T>&, BasicTensor<T>&);

DYGAN_INSTANTIATE(float)
DYGAN_INSTANTIATE(double)

#undef DYGAN_INSTANTIATE

}  // namespace dygan
