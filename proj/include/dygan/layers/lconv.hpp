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
#include <string_view>

#include "dygan/layers/common.hpp"
#include "dygan/tensor.hpp"

namespace dygan {

// Channel p of a c-channel input belongs to head p / (c / heads): heads own
// contiguous, equally sized channel groups.
std::size_t head_of(std::size_t channel, std::size_t channels, std::size_t heads);

/// Lightweight convolution: a depthwise 1d convolution over time whose
/// channels share one kernel per head.
///
///   o[i, j, p] = sum_q K[q, head(p)] * x[i, j + q - k/2, p]
///
/// with zero padding outside [0, t), so the time extent is preserved.
template <typename T>
struct LconvLayer {
  BasicTensor<T> kernel;  // [k, h]

  LconvLayer() = default;
  LconvLayer(std::size_t k, std::size_t heads);
  // Identity start: a one on the center tap of every head.
  static LconvLayer identity(std::size_t k, std::size_t heads);

  std::size_t kernel_size() const { return kernel.dim(0); }
  std::size_t heads() const { return kernel.dim(1); }

  BasicTensor<T> forward(const BasicTensor<T>& x) const;
  BasicTensor<T> backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out,
                          LconvLayer& grads) const;

  LconvLayer zeros_like() const;
  static std::size_t param_count(std::size_t k, std::size_t heads) { return k * heads; }

  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) {
    f(param_name(prefix, "kernel"), kernel);
  }
  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) const {
    f(param_name(prefix, "kernel"), kernel);
  }
};

/// Values retained by DynConvLayer::forward for the backward pass.
template <typename T>
struct DynConvCache {
  BasicTensor<T> input;      // x        [b, t, c]
  BasicTensor<T> projected;  // x W1 + b1 [b, t, 2c]
  BasicTensor<T> gated;      // GLU(...)  [b, t, c]
  BasicTensor<T> kernels;    // K'       [b, t, k, h], after the optional softmax
};

/// Dynamic convolution: a lightweight convolution whose kernel is predicted
/// for every time step from the input itself.
///
///   X' = GLU(x W1 + b1)
///   K' = X' W2 + b2               reshaped to [b, t, k, h]
///   o[i, j, p] = sum_q K'[i, j, q, head(p)] * x[i, j + q - k/2, p]
///
/// When softmax_kernel is set, K' is normalized over the k taps of each head.
template <typename T>
struct DynConvLayer {
  BasicTensor<T> w1;  // [c, 2c]
  BasicTensor<T> b1;  // [2c]
  BasicTensor<T> w2;  // [c, k*h]
  BasicTensor<T> b2;  // [k*h]
  std::size_t k = 3;
  std::size_t h = 1;
  bool softmax_kernel = false;

  DynConvLayer() = default;
  DynConvLayer(std::size_t channels, std::size_t k, std::size_t heads,
               bool softmax_kernel = false);
  static DynConvLayer init(std::size_t channels, std::size_t k, std::size_t heads, Rng& rng,
                           bool softmax_kernel = false);

  std::size_t channels() const { return w1.dim(0); }

  BasicTensor<T> forward(const BasicTensor<T>& x, DynConvCache<T>* cache = nullptr) const;
  // Kernels generated for x, shape [b, t, k, h].
  BasicTensor<T> generate_kernels(const BasicTensor<T>& x) const;
  BasicTensor<T> backward(const DynConvCache<T>& cache, const BasicTensor<T>& grad_out,
                          DynConvLayer& grads) const;

  DynConvLayer zeros_like() const;
  static std::size_t param_count(std::size_t c, std::size_t k, std::size_t heads) {
    return c * 2 * c + 2 * c + c * k * heads + k * heads;
  }

  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) {
    f(param_name(prefix, "W1"), w1);
    f(param_name(prefix, "b1"), b1);
    f(param_name(prefix, "W2"), w2);
    f(param_name(prefix, "b2"), b2);
  }
  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) const {
    f(param_name(prefix, "W1"), w1);
    f(param_name(prefix, "b1"), b1);
    f(param_name(prefix, "W2"), w2);
    f(param_name(prefix, "b2"), b2);
  }
};

// Parameters of the four c x c projections of a self-attention block, the
// layer dynamic convolution stands in for.
inline std::size_t attention_projection_params(std::size_t c) { return 4 * c * c; }

}  // namespace dygan
