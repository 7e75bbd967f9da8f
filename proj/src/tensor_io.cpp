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

#include "dygan/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace dygan {

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'Y', 'T', '1'};
constexpr std::uint8_t kMaxRank = 16;

template <typename U>
void put_le(std::ostream& os, U value) {
  std::array<char, sizeof(U)> bytes;
  for (std::size_t i = 0; i < sizeof(U); ++i)
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  os.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& is) {
  std::array<unsigned char, sizeof(U)> bytes;
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!is) throw IoError("DYT1: unexpected end of stream");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

template <typename T>
using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;

template <typename T>
BasicTensor<T> read_payload(std::istream& is, Shape shape) {
  const std::size_t n = shape_numel(shape);
  std::vector<T> data(n);
  for (auto& v : data) v = std::bit_cast<T>(get_le<Bits<T>>(is));
  return BasicTensor<T>(std::move(shape), std::move(data));
}

}  // namespace

const char* dtype_name(DType d) { return d == DType::f32 ? "f32" : "f64"; }

Shape shape_of(const AnyTensor& t) {
  return std::visit([](const auto& x) { return x.shape(); }, t);
}

DType dtype_of(const AnyTensor& t) { return t.index() == 0 ? DType::f32 : DType::f64; }

template <typename T>
void write_dyt(std::ostream& os, const BasicTensor<T>& t) {
  if (t.rank() > kMaxRank) throw IoError("DYT1: rank too large");
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(dtype_of<T>()));
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(t.rank()));
  for (auto e : t.shape()) put_le<std::uint64_t>(os, e);
  for (auto v : t.values()) put_le<Bits<T>>(os, std::bit_cast<Bits<T>>(v));
  if (!os) throw IoError("DYT1: write failed");
}

void write_dyt(std::ostream& os, const AnyTensor& t) {
  std::visit([&](const auto& x) { write_dyt(os, x); }, t);
}

AnyTensor read_dyt(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw IoError("DYT1: bad magic bytes");
  const auto dtype = get_le<std::uint8_t>(is);
  const auto rank = get_le<std::uint8_t>(is);
  if (rank > kMaxRank) throw IoError("DYT1: rank " + std::to_string(rank) + " too large");
  Shape shape(rank);
  for (auto& e : shape) {
    e = static_cast<std::size_t>(get_le<std::uint64_t>(is));
    if (e == 0) throw IoError("DYT1: zero extent");
  }
  switch (dtype) {
    case 0:
      return read_payload<float>(is, std::move(shape));
    case 1:
      return read_payload<double>(is, std::move(shape));
    default:
      throw IoError("DYT1: unknown dtype tag " + std::to_string(dtype));
  }
}

template <typename T>
BasicTensor<T> convert_to(const AnyTensor& t) {
  return std::visit(
      [](const auto& x) -> BasicTensor<T> {
        if constexpr (std::is_same_v<typename std::decay_t<decltype(x)>::value_type, T>)
          return x;
        else
          return x.template cast<T>();
      },
      t);
}

template <typename T>
BasicTensor<T> read_dyt_as(std::istream& is) {
  return convert_to<T>(read_dyt(is));
}

template <typename T>
void save_dyt(const std::filesystem::path& path, const BasicTensor<T>& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_dyt(os, t);
}

AnyTensor load_dyt(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_dyt(is);
}

template <typename T>
BasicTensor<T> load_dyt_as(const std::filesystem::path& path) {
  return convert_to<T>(load_dyt(path));
}

#define DYGAN_INSTANTIATE(T)                                                   \
  template void write_dyt<T>(std::ostream&, const BasicTensor<T>&);           \
  template BasicTensor<T> read_dyt_as<T>(std::istream&);                      \
  template void save_dyt<T>(const std::filesystem::path&, const BasicTensor<T>&); \
  template BasicTensor<T> load_dyt_as<T>(const std::filesystem::path&);       \
  template BasicTensor<T> convert_to<T>(const AnyTensor&);

DYGAN_INSTANTIATE(float)
DYGAN_INSTANTIATE(double)

#undef DYGAN_INSTANTIATE

}  // namespace dygan
