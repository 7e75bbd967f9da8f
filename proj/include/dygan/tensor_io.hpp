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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <variant>

#include "dygan/tensor.hpp"

// DYT1 container: "DYT1" | u8 dtype (0=f32, 1=f64) | u8 rank |
// rank x u64 extents | row-major payload. Little-endian throughout.
namespace dygan {

enum class DType : std::uint8_t { f32 = 0, f64 = 1 };

template <typename T>
constexpr DType dtype_of();
template <>
constexpr DType dtype_of<float>() {
  return DType::f32;
}
template <>
constexpr DType dtype_of<double>() {
  return DType::f64;
}

const char* dtype_name(DType d);

using AnyTensor = std::variant<Tensor, TensorD>;

Shape shape_of(const AnyTensor& t);
DType dtype_of(const AnyTensor& t);

template <typename T>
void write_dyt(std::ostream& os, const BasicTensor<T>& t);
void write_dyt(std::ostream& os, const AnyTensor& t);

AnyTensor read_dyt(std::istream& is);

// Reads a tensor and converts it to T when the stored dtype differs.
template <typename T>
BasicTensor<T> read_dyt_as(std::istream& is);

template <typename T>
void save_dyt(const std::filesystem::path& path, const BasicTensor<T>& t);
AnyTensor load_dyt(const std::filesystem::path& path);
template <typename T>
BasicTensor<T> load_dyt_as(const std::filesystem::path& path);

template <typename T>
BasicTensor<T> convert_to(const AnyTensor& t);

}  // namespace dygan
