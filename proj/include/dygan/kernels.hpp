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

// Row-major accumulate-into GEMM kernels. All leading dimensions are in
// elements. Summation order is fixed, so results are bit-reproducible.
namespace dygan::kernels {

// C[m,p] += A[m,n] * B[n,p]
template <typename T>
void gemm_nn(std::size_t m, std::size_t n, std::size_t p, const T* a, std::size_t lda, const T* b,
             std::size_t ldb, T* c, std::size_t ldc);

// C[m,p] += A[m,n] * B[p,n]^T
template <typename T>
void gemm_nt(std::size_t m, std::size_t n, std::size_t p, const T* a, std::size_t lda, const T* b,
             std::size_t ldb, T* c, std::size_t ldc);

// C[n,p] += A[m,n]^T * B[m,p]
template <typename T>
void gemm_tn(std::size_t m, std::size_t n, std::size_t p, const T* a, std::size_t lda, const T* b,
             std::size_t ldb, T* c, std::size_t ldc);

}  // namespace dygan::kernels
