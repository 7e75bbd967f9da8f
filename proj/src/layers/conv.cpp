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

#include "dygan/layers/conv.hpp"

#include <algorithm>

#include "dygan/kernels.hpp"

namespace dygan {

namespace {

void require_odd(std::size_t k, const char* what) {
  if (k == 0 || k % 2 == 0)
    throw ConfigError(std::string(what) + ": kernel extent must be odd, got " + std::to_string(k));
}

// Output positions o in [0, n_out) whose input index o*stride + tap - pad lies
// in [0, n_in). Returns [lo, hi).
std::pair<std::size_t, std::size_t> valid_range(std::size_t n_in, std::size_t n_out,
                                                std::size_t stride, std::size_t tap,
                                                std::size_t pad) {
  // need o*stride >= pad - tap and o*stride <= n_in - 1 + pad - tap
  std::size_t lo = 0;
  if (pad > tap) lo = (pad - tap + stride - 1) / stride;
  const std::ptrdiff_t top = static_cast<std::ptrdiff_t>(n_in) - 1 +
                             static_cast<std::ptrdiff_t>(pad) - static_cast<std::ptrdiff_t>(tap);
  if (top < 0) return {0, 0};
  const std::size_t hi = std::min(n_out, static_cast<std::size_t>(top) / stride + 1);
  return {lo, std::max(lo, hi)};
}

}  // namespace

// --- Conv1d -------------------------------------------------------------------

template <typename T>
Conv1d<T>::Conv1d(std::size_t c_in, std::size_t c_out, std::size_t width)
    : kernel({width, c_in, c_out}), bias({c_out}) {
  require_odd(width, "Conv1d");
}

template <typename T>
Conv1d<T> Conv1d<T>::init(std::size_t c_in, std::size_t c_out, std::size_t width, Rng& rng) {
  Conv1d conv(c_in, c_out, width);
  conv.kernel = init_weight<T>({width, c_in, c_out}, width * c_in, rng);
  return conv;
}

template <typename T>
Conv1d<T> Conv1d<T>::zeros_like() const {
  Conv1d g;
  g.kernel = kernel.zeros_like();
  g.bias = bias.zeros_like();
  return g;
}

template <typename T>
BasicTensor<T> Conv1d<T>::forward(const BasicTensor<T>& x) const {
  require_rank(x.shape(), 3, "Conv1d input");
  const std::size_t b = x.dim(0), t = x.dim(1), ci = in_channels(), co = out_channels();
  if (x.dim(2) != ci)
    throw DimensionError("Conv1d: input " + shape_str(x.shape()) + " vs kernel " +
                         shape_str(kernel.shape()));
  const std::size_t kw = width(), pad = kw / 2;
  BasicTensor<T> out({b, t, co});
  for (std::size_t i = 0; i < b; ++i) {
    T* o = out.data() + i * t * co;
    for (std::size_t j = 0; j < t; ++j) std::copy_n(bias.data(), co, o + j * co);
    const T* in = x.data() + i * t * ci;
    for (std::size_t q = 0; q < kw; ++q) {
      const auto [lo, hi] = valid_range(t, t, 1, q, pad);
      if (lo >= hi) continue;
      kernels::gemm_nn(hi - lo, ci, co, in + (lo + q - pad) * ci, ci, kernel.data() + q * ci * co,
                       co, o + lo * co, co);
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> Conv1d<T>::backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out,
                                   Conv1d& grads) const {
  const std::size_t b = x.dim(0), t = x.dim(1), ci = in_channels(), co = out_channels();
  require_same_shape(grad_out.shape(), {b, t, co}, "Conv1d backward");
  require_same_shape(grads.kernel.shape(), kernel.shape(), "Conv1d grads");
  const std::size_t kw = width(), pad = kw / 2;
  BasicTensor<T> grad_x(x.shape());
  for (std::size_t i = 0; i < b; ++i) {
    const T* g = grad_out.data() + i * t * co;
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t r = 0; r < co; ++r) grads.bias[r] += g[j * co + r];
    const T* in = x.data() + i * t * ci;
    T* gx = grad_x.data() + i * t * ci;
    for (std::size_t q = 0; q < kw; ++q) {
      const auto [lo, hi] = valid_range(t, t, 1, q, pad);
      if (lo >= hi) continue;
      const std::size_t src = lo + q - pad;
      kernels::gemm_nt(hi - lo, co, ci, g + lo * co, co, kernel.data() + q * ci * co, co,
                       gx + src * ci, ci);
      kernels::gemm_tn(hi - lo, ci, co, in + src * ci, ci, g + lo * co, co,
                       grads.kernel.data() + q * ci * co, co);
    }
  }
  return grad_x;
}

// --- Conv2d -------------------------------------------------------------------

template <typename T>
Conv2d<T>::Conv2d(std::size_t c_in, std::size_t c_out, std::size_t k_h, std::size_t k_w,
                  std::size_t stride_)
    : kernel({k_h, k_w, c_in, c_out}), bias({c_out}), stride(stride_) {
  require_odd(k_h, "Conv2d");
  require_odd(k_w, "Conv2d");
  if (stride == 0) throw ConfigError("Conv2d: stride must be >= 1");
}

template <typename T>
Conv2d<T> Conv2d<T>::init(std::size_t c_in, std::size_t c_out, std::size_t k_h, std::size_t k_w,
                          Rng& rng, std::size_t stride_) {
  Conv2d conv(c_in, c_out, k_h, k_w, stride_);
  conv.kernel = init_weight<T>({k_h, k_w, c_in, c_out}, k_h * k_w * c_in, rng);
  return conv;
}

template <typename T>
Conv2d<T> Conv2d<T>::zeros_like() const {
  Conv2d g;
  g.kernel = kernel.zeros_like();
  g.bias = bias.zeros_like();
  g.stride = stride;
  return g;
}

template <typename T>
Shape Conv2d<T>::output_shape(const Shape& in) const {
  require_rank(in, 4, "Conv2d input");
  if (in[3] != in_channels())
    throw DimensionError("Conv2d: input " + shape_str(in) + " vs kernel " +
                         shape_str(kernel.shape()));
  const std::size_t kh = kernel.dim(0), kw = kernel.dim(1);
  const std::size_t ho = (in[1] + 2 * (kh / 2) - kh) / stride + 1;
  const std::size_t wo = (in[2] + 2 * (kw / 2) - kw) / stride + 1;
  return {in[0], ho, wo, out_channels()};
}

template <typename T>
BasicTensor<T> Conv2d<T>::forward(const BasicTensor<T>& x) const {
  const Shape os = output_shape(x.shape());
  const std::size_t b = x.dim(0), h = x.dim(1), w = x.dim(2), ci = in_channels();
  const std::size_t ho = os[1], wo = os[2], co = os[3];
  const std::size_t kh = kernel.dim(0), kw = kernel.dim(1), ph = kh / 2, pw = kw / 2;
  BasicTensor<T> out(os);
  for (std::size_t i = 0; i < b; ++i) {
    T* ob = out.data() + i * ho * wo * co;
    for (std::size_t s = 0; s < ho * wo; ++s) std::copy_n(bias.data(), co, ob + s * co);
    const T* xb = x.data() + i * h * w * ci;
    for (std::size_t dy = 0; dy < kh; ++dy) {
      const auto [ylo, yhi] = valid_range(h, ho, stride, dy, ph);
      for (std::size_t dx = 0; dx < kw; ++dx) {
        const auto [xlo, xhi] = valid_range(w, wo, stride, dx, pw);
        if (xlo >= xhi) continue;
        const T* kern = kernel.data() + (dy * kw + dx) * ci * co;
        for (std::size_t oy = ylo; oy < yhi; ++oy) {
          const std::size_t iy = oy * stride + dy - ph;
          const std::size_t ix = xlo * stride + dx - pw;
          kernels::gemm_nn(xhi - xlo, ci, co, xb + (iy * w + ix) * ci, stride * ci, kern, co,
                           ob + (oy * wo + xlo) * co, co);
        }
      }
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> Conv2d<T>::backward(const BasicTensor<T>& x, const BasicTensor<T>& grad_out,
                                   Conv2d& grads) const {
  const Shape os = output_shape(x.shape());
  require_same_shape(grad_out.shape(), os, "Conv2d backward");
  require_same_shape(grads.kernel.shape(), kernel.shape(), "Conv2d grads");
  const std::size_t b = x.dim(0), h = x.dim(1), w = x.dim(2), ci = in_channels();
  const std::size_t ho = os[1], wo = os[2], co = os[3];
  const std::size_t kh = kernel.dim(0), kw = kernel.dim(1), ph = kh / 2, pw = kw / 2;

  // Transposed taps [kh, kw, co, ci] so the input-gradient product is a plain gemm.
  BasicTensor<T> kt({kh, kw, co, ci});
  for (std::size_t tap = 0; tap < kh * kw; ++tap)
    for (std::size_t a = 0; a < ci; ++a)
      for (std::size_t r = 0; r < co; ++r)
        kt[(tap * co + r) * ci + a] = kernel[(tap * ci + a) * co + r];

  BasicTensor<T> grad_x(x.shape());
  for (std::size_t i = 0; i < b; ++i) {
    const T* gb = grad_out.data() + i * ho * wo * co;
    for (std::size_t s = 0; s < ho * wo; ++s)
      for (std::size_t r = 0; r < co; ++r) grads.bias[r] += gb[s * co + r];
    const T* xb = x.data() + i * h * w * ci;
    T* gxb = grad_x.data() + i * h * w * ci;
    for (std::size_t dy = 0; dy < kh; ++dy) {
      const auto [ylo, yhi] = valid_range(h, ho, stride, dy, ph);
      for (std::size_t dx = 0; dx < kw; ++dx) {
        const auto [xlo, xhi] = valid_range(w, wo, stride, dx, pw);
        if (xlo >= xhi) continue;
        const std::size_t tap = dy * kw + dx;
        for (std::size_t oy = ylo; oy < yhi; ++oy) {
          const std::size_t iy = oy * stride + dy - ph;
          const std::size_t ix = xlo * stride + dx - pw;
          const T* g = gb + (oy * wo + xlo) * co;
          kernels::gemm_nn(xhi - xlo, co, ci, g, co, kt.data() + tap * co * ci, ci,
                           gxb + (iy * w + ix) * ci, stride * ci);
          kernels::gemm_tn(xhi - xlo, ci, co, xb + (iy * w + ix) * ci, stride * ci, g, co,
                           grads.kernel.data() + tap * ci * co, co);
        }
      }
    }
  }
  return grad_x;
}

// --- AvgPool2d ----------------------------------------------------------------

std::size_t AvgPool2d::output_extent(std::size_t n) const {
  if (n <= window) return 1;
  return (n - window + stride - 1) / stride + 1;
}

Shape AvgPool2d::output_shape(const Shape& in) const {
  require_rank(in, 4, "AvgPool2d input");
  return {in[0], output_extent(in[1]), output_extent(in[2]), in[3]};
}

template <typename T>
BasicTensor<T> AvgPool2d::forward(const BasicTensor<T>& x) const {
  const Shape os = output_shape(x.shape());
  const std::size_t b = x.dim(0), h = x.dim(1), w = x.dim(2), c = x.dim(3);
  BasicTensor<T> out(os);
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t oy = 0; oy < os[1]; ++oy)
      for (std::size_t ox = 0; ox < os[2]; ++ox) {
        const std::size_t y0 = oy * stride, y1 = std::min(h, y0 + window);
        const std::size_t x0 = ox * stride, x1 = std::min(w, x0 + window);
        T* o = out.data() + ((i * os[1] + oy) * os[2] + ox) * c;
        for (std::size_t y = y0; y < y1; ++y)
          for (std::size_t xx = x0; xx < x1; ++xx) {
            const T* in = x.data() + ((i * h + y) * w + xx) * c;
            for (std::size_t p = 0; p < c; ++p) o[p] += in[p];
          }
        const T count = static_cast<T>((y1 - y0) * (x1 - x0));
        for (std::size_t p = 0; p < c; ++p) o[p] /= count;
      }
  return out;
}

template <typename T>
BasicTensor<T> AvgPool2d::backward(const Shape& input_shape, const BasicTensor<T>& grad_out) const {
  const Shape os = output_shape(input_shape);
  require_same_shape(grad_out.shape(), os, "AvgPool2d backward");
  const std::size_t b = input_shape[0], h = input_shape[1], w = input_shape[2],
                    c = input_shape[3];
  BasicTensor<T> grad(input_shape);
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t oy = 0; oy < os[1]; ++oy)
      for (std::size_t ox = 0; ox < os[2]; ++ox) {
        const std::size_t y0 = oy * stride, y1 = std::min(h, y0 + window);
        const std::size_t x0 = ox * stride, x1 = std::min(w, x0 + window);
        const T* g = grad_out.data() + ((i * os[1] + oy) * os[2] + ox) * c;
        const T count = static_cast<T>((y1 - y0) * (x1 - x0));
        for (std::size_t y = y0; y < y1; ++y)
          for (std::size_t xx = x0; xx < x1; ++xx) {
            T* gi = grad.data() + ((i * h + y) * w + xx) * c;
            for (std::size_t p = 0; p < c; ++p) gi[p] += g[p] / count;
          }
      }
  return grad;
}

template struct Conv1d<float>;
template struct Conv1d<double>;
template struct Conv2d<float>;
template struct Conv2d<double>;
template BasicTensor<float> AvgPool2d::forward<float>(const BasicTensor<float>&) const;
template BasicTensor<double> AvgPool2d::forward<double>(const BasicTensor<double>&) const;
template BasicTensor<float> AvgPool2d::backward<float>(const Shape&,
                                                       const BasicTensor<float>&) const;
template BasicTensor<double> AvgPool2d::backward<double>(const Shape&,
                                                         const BasicTensor<double>&) const;

}  // namespace dygan
