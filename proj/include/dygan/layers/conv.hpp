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

// Plain convolutions and pooling. All convolutions are cross-correlations
// (no kernel flip) with zero padding of kernel/2 on each side, so stride-1
// convolutions preserve spatial extents. Kernel widths must be odd.
namespace dygan {

/// 1d convolution over the time axis of [b, t, c_in] features.
template <typename T>
struct Conv1d {
  BasicTensor<T> kernel;  // [k_w, c_in, c_out]
  BasicTensor<T> bias;    // [c_out]

  Conv1d() = default;
  Conv1d(std::size_t c_in, std::size_t c_out, std::size_t width);
  static Conv1d init(std::size_t c_in, std::size_t c_out, std::size_t width, Rng& rng);

  std::size_t width() const { return kernel.dim(0); }
  std::size_t in_channels() const { return kernel.dim(1); }
  std::size_t out_channels() const { return kernel.dim(2); }

  BasicTensor<T> forward(const BasicTensor<T>& x) const;
  // Returns dL/dx and accumulates parameter gradients into `grads`.
  BasicTensor<T> backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out,
                          Conv1d& grads) const;

  Conv1d zeros_like() const;
  static std::size_t param_count(std::size_t c_in, std::size_t c_out, std::size_t width) {
    return width * c_in * c_out + c_out;
  }

  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) {
    f(param_name(prefix, "kernel"), kernel);
    f(param_name(prefix, "bias"), bias);
  }
  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) const {
    f(param_name(prefix, "kernel"), kernel);
    f(param_name(prefix, "bias"), bias);
  }
};

/// 2d convolution over NHWC tensors [b, h, w, c_in].
template <typename T>
struct Conv2d {
  BasicTensor<T> kernel;  // [k_h, k_w, c_in, c_out]
  BasicTensor<T> bias;    // [c_out]
  std::size_t stride = 1;

  Conv2d() = default;
  Conv2d(std::size_t c_in, std::size_t c_out, std::size_t k_h, std::size_t k_w,
         std::size_t stride = 1);
  static Conv2d init(std::size_t c_in, std::size_t c_out, std::size_t k_h, std::size_t k_w,
                     Rng& rng, std::size_t stride = 1);

  std::size_t in_channels() const { return kernel.dim(2); }
  std::size_t out_channels() const { return kernel.dim(3); }
  Shape output_shape(const Shape& input) const;

  BasicTensor<T> forward(const BasicTensor<T>& x) const;
  BasicTensor<T> backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out,
                          Conv2d& grads) const;

  Conv2d zeros_like() const;
  static std::size_t param_count(std::size_t c_in, std::size_t c_out, std::size_t k_h,
                                 std::size_t k_w) {
    return k_h * k_w * c_in * c_out + c_out;
  }

  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) {
    f(param_name(prefix, "kernel"), kernel);
    f(param_name(prefix, "bias"), bias);
  }
  template <typename F>
  void for_each_param(std::string_view prefix, F&& f) const {
    f(param_name(prefix, "kernel"), kernel);
    f(param_name(prefix, "bias"), bias);
  }
};

/// Average pooling over NHWC tensors. Output extents are
/// ceil((n - window) / stride) + 1 (1 when n <= window); windows that run
/// past the edge average only the elements they cover, so a constant field
/// pools to the same constant. The default 2/2 halves extents with ceil
/// division.
struct AvgPool2d {
  std::size_t window = 2;
  std::size_t stride = 2;

  std::size_t output_extent(std::size_t n) const;
  Shape output_shape(const Shape& input) const;

  template <typename T>
  BasicTensor<T> forward(const BasicTensor<T>& x) const;
  template <typename T>
  BasicTensor<T> backward(const Shape& input_shape, const BasicTensor<T>& grad_out) const;
};

}  // namespace dygan
