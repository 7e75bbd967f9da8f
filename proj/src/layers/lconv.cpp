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

#include "dygan/layers/lconv.hpp"

#include <algorithm>
#include <cmath>

#include "dygan/kernels.hpp"

namespace dygan {

std::size_t head_of(std::size_t channel, std::size_t channels, std::size_t heads) {
  return channel / (channels / heads);
}

namespace {

void check_heads(std::size_t channels, std::size_t heads, const char* what) {
  if (heads == 0 || channels % heads != 0)
    throw ConfigError(std::string(what) + ": heads (" + std::to_string(heads) +
                      ") must divide channels (" + std::to_string(channels) + ")");
}

void check_kernel_size(std::size_t k, const char* what) {
  if (k == 0 || k % 2 == 0)
    throw ConfigError(std::string(what) + ": kernel size must be odd, got " + std::to_string(k));
}

// Depthwise head-shared convolution. kernel_at(i, j) returns the [k, h]
// kernel used at output position (i, j).
template <typename T, typename KernelAt>
BasicTensor<T> depthwise_forward(const BasicTensor<T>& x, std::size_t k, std::size_t h,
                                 KernelAt kernel_at) {
  const std::size_t b = x.dim(0), t = x.dim(1), c = x.dim(2), group = c / h, pad = k / 2;
  BasicTensor<T> out(x.shape());
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < t; ++j) {
      const T* kern = kernel_at(i, j);
      T* o = out.data() + (i * t + j) * c;
      for (std::size_t q = 0; q < k; ++q) {
        if (j + q < pad || j + q - pad >= t) continue;
        const T* in = x.data() + (i * t + j + q - pad) * c;
        for (std::size_t hh = 0; hh < h; ++hh) {
          const T w = kern[q * h + hh];
          for (std::size_t p = hh * group; p < (hh + 1) * group; ++p) o[p] += w * in[p];
        }
      }
    }
  return out;
}

// Returns dL/dx; per-position kernel gradients go through grad_kernel_at(i, j),
// which returns a [k, h] accumulator.
template <typename T, typename KernelAt, typename GradKernelAt>
BasicTensor<T> depthwise_backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out,
                                  std::size_t k, std::size_t h, KernelAt kernel_at,
                                  GradKernelAt grad_kernel_at) {
  require_same_shape(grad_out.shape(), x.shape(), "depthwise conv backward");
  const std::size_t b = x.dim(0), t = x.dim(1), c = x.dim(2), group = c / h, pad = k / 2;
  BasicTensor<T> grad_x(x.shape());
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < t; ++j) {
      const T* kern = kernel_at(i, j);
      T* gk = grad_kernel_at(i, j);
      const T* g = grad_out.data() + (i * t + j) * c;
      for (std::size_t q = 0; q < k; ++q) {
        if (j + q < pad || j + q - pad >= t) continue;
        const std::size_t src = (i * t + j + q - pad) * c;
        const T* in = x.data() + src;
        T* gx = grad_x.data() + src;
        for (std::size_t hh = 0; hh < h; ++hh) {
          const T w = kern[q * h + hh];
          T acc = 0;
          for (std::size_t p = hh * group; p < (hh + 1) * group; ++p) {
            acc += g[p] * in[p];
            gx[p] += w * g[p];
          }
          gk[q * h + hh] += acc;
        }
      }
    }
  return grad_x;
}

template <typename T>
void check_input(const BasicTensor<T>& x, std::size_t heads, const char* what) {
  require_rank(x.shape(), 3, what);
  check_heads(x.dim(2), heads, what);
}

}  // namespace

// --- LconvLayer -------------------------------------------------------------

template <typename T>
LconvLayer<T>::LconvLayer(std::size_t k, std::size_t heads) : kernel({k, heads}) {
  check_kernel_size(k, "LconvLayer");
  if (heads == 0) throw ConfigError("LconvLayer: heads must be >= 1");
}

template <typename T>
LconvLayer<T> LconvLayer<T>::identity(std::size_t k, std::size_t heads) {
  LconvLayer layer(k, heads);
  for (std::size_t hh = 0; hh < heads; ++hh) layer.kernel(k / 2, hh) = T{1};
  return layer;
}

template <typename T>
LconvLayer<T> LconvLayer<T>::zeros_like() const {
  LconvLayer g;
  g.kernel = kernel.zeros_like();
  return g;
}

template <typename T>
BasicTensor<T> LconvLayer<T>::forward(const BasicTensor<T>& x) const {
  check_input(x, heads(), "LconvLayer");
  const T* kern = kernel.data();
  return depthwise_forward(x, kernel_size(), heads(),
                           [kern](std::size_t, std::size_t) { return kern; });
}

template <typename T>
BasicTensor<T> LconvLayer<T>::backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out,
                                       LconvLayer& grads) const {
  check_input(x, heads(), "LconvLayer backward");
  require_same_shape(grads.kernel.shape(), kernel.shape(), "LconvLayer grads");
  const T* kern = kernel.data();
  T* gk = grads.kernel.data();
  return depthwise_backward(
      x, grad_out, kernel_size(), heads(), [kern](std::size_t, std::size_t) { return kern; },
      [gk](std::size_t, std::size_t) { return gk; });
}

// --- DynConvLayer -------------------------------------------------------------

template <typename T>
DynConvLayer<T>::DynConvLayer(std::size_t c, std::size_t k_, std::size_t heads, bool softmax)
    : w1({c, 2 * c}),
      b1({2 * c}),
      w2({c, k_ * heads}),
      b2({k_ * heads}),
      k(k_),
      h(heads),
      softmax_kernel(softmax) {
  check_kernel_size(k, "DynConvLayer");
  check_heads(c, heads, "DynConvLayer");
}

template <typename T>
DynConvLayer<T> DynConvLayer<T>::init(std::size_t c, std::size_t k_, std::size_t heads, Rng& rng,
                                      bool softmax) {
  DynConvLayer layer(c, k_, heads, softmax);
  layer.w1 = init_weight<T>({c, 2 * c}, c, rng);
  layer.w2 = init_weight<T>({c, k_ * heads}, c, rng);
  return layer;
}

template <typename T>
DynConvLayer<T> DynConvLayer<T>::zeros_like() const {
  DynConvLayer g = *this;
  g.w1.set_zero();
  g.b1.set_zero();
  g.w2.set_zero();
  g.b2.set_zero();
  return g;
}

template <typename T>
BasicTensor<T> DynConvLayer<T>::forward(const BasicTensor<T>& x, DynConvCache<T>* cache) const {
  check_input(x, h, "DynConvLayer");
  const std::size_t c = channels();
  if (x.dim(2) != c)
    throw DimensionError("DynConvLayer: input " + shape_str(x.shape()) + " vs channels " +
                         std::to_string(c));
  const std::size_t b = x.dim(0), t = x.dim(1), rows = b * t, kh = k * h;

  BasicTensor<T> projected({b, t, 2 * c});
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(b1.data(), 2 * c, projected.data() + r * 2 * c);
  kernels::gemm_nn(rows, c, 2 * c, x.data(), c, w1.data(), 2 * c, projected.data(), 2 * c);

  BasicTensor<T> gated = glu(projected);

  BasicTensor<T> kern({b, t, k, h});
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(b2.data(), kh, kern.data() + r * kh);
  kernels::gemm_nn(rows, c, kh, gated.data(), c, w2.data(), kh, kern.data(), kh);

  if (softmax_kernel) {
    for (std::size_t r = 0; r < rows; ++r) {
      T* kr = kern.data() + r * kh;
      for (std::size_t hh = 0; hh < h; ++hh) {
        T mx = kr[hh];
        for (std::size_t q = 1; q < k; ++q) mx = std::max(mx, kr[q * h + hh]);
        T sum = 0;
        for (std::size_t q = 0; q < k; ++q) {
          kr[q * h + hh] = std::exp(kr[q * h + hh] - mx);
          sum += kr[q * h + hh];
        }
        for (std::size_t q = 0; q < k; ++q) kr[q * h + hh] /= sum;
      }
    }
  }

  const T* kp = kern.data();
  BasicTensor<T> out =
      depthwise_forward(x, k, h, [kp, t, kh](std::size_t i, std::size_t j) {
        return kp + (i * t + j) * kh;
      });

  if (cache) {
    cache->input = x;
    cache->projected = std::move(projected);
    cache->gated = std::move(gated);
    cache->kernels = std::move(kern);
  }
  return out;
}

template <typename T>
BasicTensor<T> DynConvLayer<T>::generate_kernels(const BasicTensor<T>& x) const {
  DynConvCache<T> cache;
  forward(x, &cache);
  return std::move(cache.kernels);
}

template <typename T>
BasicTensor<T> DynConvLayer<T>::backward(const DynConvCache<T>& cache,
                                         const BasicTensor<T>& grad_out,
                                         DynConvLayer& grads) const {
  const BasicTensor<T>& x = cache.input;
  const std::size_t c = channels();
  if (x.rank() != 3 || x.dim(2) != c || cache.kernels.shape() != Shape{x.dim(0), x.dim(1), k, h})
    throw ContractError("DynConvLayer backward: cache does not match this layer");
  require_same_shape(grad_out.shape(), x.shape(), "DynConvLayer backward");
  require_same_shape(grads.w1.shape(), w1.shape(), "DynConvLayer grads");
  require_same_shape(grads.w2.shape(), w2.shape(), "DynConvLayer grads");
  const std::size_t b = x.dim(0), t = x.dim(1), rows = b * t, kh = k * h;

  // Direct path through the convolution, plus dL/dK'.
  BasicTensor<T> grad_kern({b, t, k, h});
  const T* kp = cache.kernels.data();
  T* gkp = grad_kern.data();
  BasicTensor<T> grad_x = depthwise_backward(
      x, grad_out, k, h,
      [kp, t, kh](std::size_t i, std::size_t j) { return kp + (i * t + j) * kh; },
      [gkp, t, kh](std::size_t i, std::size_t j) { return gkp + (i * t + j) * kh; });

  if (softmax_kernel) {
    for (std::size_t r = 0; r < rows; ++r) {
      const T* s = kp + r * kh;
      T* g = gkp + r * kh;
      for (std::size_t hh = 0; hh < h; ++hh) {
        T dot = 0;
        for (std::size_t q = 0; q < k; ++q) dot += s[q * h + hh] * g[q * h + hh];
        for (std::size_t q = 0; q < k; ++q) g[q * h + hh] = s[q * h + hh] * (g[q * h + hh] - dot);
      }
    }
  }

  // K' = X' W2 + b2
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t a = 0; a < kh; ++a) grads.b2[a] += gkp[r * kh + a];
  kernels::gemm_tn(rows, c, kh, cache.gated.data(), c, gkp, kh, grads.w2.data(), kh);
  BasicTensor<T> grad_gated({b, t, c});
  kernels::gemm_nt(rows, kh, c, gkp, kh, w2.data(), kh, grad_gated.data(), c);

  // X' = GLU(x W1 + b1)
  BasicTensor<T> grad_proj = glu_backward(cache.projected, grad_gated);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t a = 0; a < 2 * c; ++a) grads.b1[a] += grad_proj[r * 2 * c + a];
  kernels::gemm_tn(rows, c, 2 * c, x.data(), c, grad_proj.data(), 2 * c, grads.w1.data(), 2 * c);
  kernels::gemm_nt(rows, 2 * c, c, grad_proj.data(), 2 * c, w1.data(), 2 * c, grad_x.data(), c);
  return grad_x;
}

template struct LconvLayer<float>;
template struct LconvLayer<double>;
template struct DynConvLayer<float>;
template struct DynConvLayer<double>;

}  // namespace dygan
