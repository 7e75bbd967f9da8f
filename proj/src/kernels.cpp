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

#include "dygan/kernels.hpp"

#include <algorithm>
#include <vector>

namespace dygan::kernels {

namespace {
constexpr std::size_t kDepthBlock = 256;
}

template <typename T>
void gemm_nn(std::size_t m, std::size_t n, std::size_t p, const T* a, std::size_t lda, const T* b,
             std::size_t ldb, T* c, std::size_t ldc) {
  for (std::size_t k0 = 0; k0 < n; k0 += kDepthBlock) {
    const std::size_t k1 = std::min(n, k0 + kDepthBlock);
    std::size_t i = 0;
    // Four output rows share each streamed row of B.
    for (; i + 4 <= m; i += 4) {
      T* c0 = c + i * ldc;
      T* c1 = c0 + ldc;
      T* c2 = c1 + ldc;
      T* c3 = c2 + ldc;
      const T* a0 = a + i * lda;
      const T* a1 = a0 + lda;
      const T* a2 = a1 + lda;
      const T* a3 = a2 + lda;
      for (std::size_t k = k0; k < k1; ++k) {
        const T v0 = a0[k], v1 = a1[k], v2 = a2[k], v3 = a3[k];
        const T* brow = b + k * ldb;
        for (std::size_t j = 0; j < p; ++j) {
          const T bv = brow[j];
          c0[j] += v0 * bv;
          c1[j] += v1 * bv;
          c2[j] += v2 * bv;
          c3[j] += v3 * bv;
        }
      }
    }
    for (; i < m; ++i) {
      T* crow = c + i * ldc;
      const T* arow = a + i * lda;
      for (std::size_t k = k0; k < k1; ++k) {
        const T v = arow[k];
        const T* brow = b + k * ldb;
        for (std::size_t j = 0; j < p; ++j) crow[j] += v * brow[j];
      }
    }
  }
}

template <typename T>
void gemm_nt(std::size_t m, std::size_t n, std::size_t p, const T* a, std::size_t lda, const T* b,
             std::size_t ldb, T* c, std::size_t ldc) {
  // Transpose B once so the inner loop streams contiguous memory.
  std::vector<T> bt(n * p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < n; ++k) bt[k * p + j] = b[j * ldb + k];
  gemm_nn(m, n, p, a, lda, bt.data(), p, c, ldc);
}

template <typename T>
void gemm_tn(std::size_t m, std::size_t n, std::size_t p, const T* a, std::size_t lda, const T* b,
             std::size_t ldb, T* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * lda;
    const T* brow = b + i * ldb;
    for (std::size_t k = 0; k < n; ++k) {
      const T v = arow[k];
      T* crow = c + k * ldc;
      for (std::size_t j = 0; j < p; ++j) crow[j] += v * brow[j];
    }
  }
}

#define DYGAN_INSTANTIATE(T)                                                                    \
  template void gemm_nn<T>(std::size_t, std::size_t, std::size_t, const T*, std::size_t,       \
                           const T*, std::size_t, T*, std::size_t);                            \
  template void gemm_nt<T>(std::size_t, std::size_t, std::size_t, const T*, std::size_t,       \
                           const T*, std::size_t, T*, std::size_t);                            \
  template void gemm_tn<T>(std::size_t, std::size_t, std::size_t, const T*, std::size_t,       \
                           const T*, std::size_t, T*, std::size_t);

DYGAN_INSTANTIATE(float)
DYGAN_INSTANTIATE(double)

#undef DYGAN_INSTANTIATE

}  // namespace dygan::kernels
