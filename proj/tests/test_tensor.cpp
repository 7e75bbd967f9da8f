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

#include <bit>
#include <cstring>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

#include "dygan/errors.hpp"
#include "dygan/kernels.hpp"
#include "dygan/tensor.hpp"
#include "dygan/tensor_io.hpp"

using namespace dygan;

TEST_SUITE("tensor") {

TEST_CASE("shape, indexing and reshape") {
  Tensor t({2, 3, 4});
  CHECK(t.numel() == 24);
  CHECK(t.rank() == 3);
  t(1, 2, 3) = 5.0f;
  CHECK(t[23] == 5.0f);
  CHECK(t.offset(std::vector<std::size_t>{1, 0, 2}) == 14);
  CHECK(t.unravel(14) == Shape{1, 0, 2});
  const Tensor r = t.reshaped({6, 4});
  CHECK(r(5, 3) == 5.0f);
  CHECK_THROWS_AS(t.reshaped({5, 5}), DimensionError);
  CHECK_THROWS_AS(t.dim(3), DimensionError);
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<float>{1, 2, 3}), DimensionError);

  const Tensor scalar;
  CHECK(scalar.rank() == 0);
  CHECK(scalar.numel() == 1);
  CHECK(scalar[0] == 0.0f);
}

TEST_CASE("extents must be positive") {
  CHECK_THROWS_AS(Tensor({0, 4}), DimensionError);
  CHECK_THROWS_AS(Tensor({3, 0}, std::vector<float>{}), DimensionError);
  CHECK_THROWS_AS(matmul(Tensor({3, 2}), Tensor({3, 2})), DimensionError);
}

TEST_CASE("arithmetic requires equal shapes") {
  Tensor a = Tensor::full({2, 2}, 1.0f);
  const Tensor b = Tensor::full({2, 2}, 2.0f);
  CHECK((a + b) == Tensor::full({2, 2}, 3.0f));
  CHECK((b - a) == a);
  a *= 4.0f;
  CHECK(a == Tensor::full({2, 2}, 4.0f));
  CHECK_THROWS_AS(a += Tensor({4}), DimensionError);
}

TEST_CASE("rng is reproducible and forks are distinct") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42);
  Rng f0 = c.fork(0), f1 = c.fork(1);
  CHECK(f0.next_u64() != f1.next_u64());
  Rng d(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = d.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(d.index(3) < 3);
  }
  CHECK_THROWS_AS(d.index(0), ContractError);
}

TEST_CASE("randn has roughly unit moments") {
  Rng rng(3);
  const TensorD t = TensorD::randn({20000}, rng);
  double mean = 0.0, sq = 0.0;
  for (double v : t.values()) {
    mean += v;
    sq += v * v;
  }
  mean /= 20000.0;
  sq /= 20000.0;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(sq - 1.0) < 0.05);
}

TEST_CASE("gemm kernels match a naive product on ragged sizes") {
  Rng rng(11);
  for (const auto& [m, n, p] : {std::tuple{1, 1, 1}, {5, 7, 3}, {9, 300, 11}, {17, 4, 260}}) {
    const TensorD a = TensorD::randn({std::size_t(m), std::size_t(n)}, rng);
    const TensorD b = TensorD::randn({std::size_t(n), std::size_t(p)}, rng);
    const TensorD ref = oracle::matmul(a, b);
    CHECK(max_abs_diff(matmul(a, b), ref) < 1e-12);

    // Accumulation: c starts at ones.
    TensorD c = TensorD::full({std::size_t(m), std::size_t(p)}, 1.0);
    kernels::gemm_nn(m, n, p, a.data(), n, b.data(), p, c.data(), p);
    CHECK(max_abs_diff(c, ref + TensorD::full(ref.shape(), 1.0)) < 1e-12);

    // a (m x n) times (b^T)^T, with bt stored [p, n].
    TensorD bt({std::size_t(p), std::size_t(n)});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) bt(j, i) = b(i, j);
    TensorD c2({std::size_t(m), std::size_t(p)});
    kernels::gemm_nt(m, n, p, a.data(), n, bt.data(), n, c2.data(), p);
    CHECK(max_abs_diff(c2, ref) < 1e-12);

    // a^T b with at stored [n, m].
    TensorD at({std::size_t(n), std::size_t(m)});
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) at(j, i) = a(i, j);
    TensorD c3({std::size_t(m), std::size_t(p)});
    kernels::gemm_tn(n, m, p, at.data(), m, b.data(), p, c3.data(), p);
    CHECK(max_abs_diff(c3, ref) < 1e-12);
  }
}

TEST_CASE("glu halves the last axis") {
  Rng rng(5);
  const TensorD x = TensorD::randn({2, 3, 8}, rng);
  const TensorD y = glu(x);
  CHECK(y.shape() == Shape{2, 3, 4});
  CHECK(max_abs_diff(y, oracle::glu(x)) < 1e-15);
  CHECK_THROWS_AS(glu(TensorD({2, 3})), DimensionError);
}

TEST_CASE("layer norm matches the two-pass oracle") {
  Rng rng(6);
  const TensorD x = TensorD::randn({2, 5, 7}, rng, 3.0);
  const TensorD gain = TensorD::randn({7}, rng), bias = TensorD::randn({7}, rng);
  CHECK(max_abs_diff(layer_norm(x, gain, bias), oracle::layer_norm(x, gain, bias, 1e-5)) < 1e-12);
  // Constant rows stay finite and map to the bias.
  const TensorD flat = TensorD::full({1, 7}, 2.5);
  const TensorD y = layer_norm(flat, gain, bias);
  for (std::size_t p = 0; p < 7; ++p) CHECK(y[p] == doctest::Approx(bias[p]));
}

TEST_CASE("DYT1 round trip is bit exact") {
  Rng rng(9);
  Tensor f = Tensor::randn({3, 1, 4}, rng);
  f[0] = std::numeric_limits<float>::quiet_NaN();
  f[1] = -0.0f;
  f[2] = std::numeric_limits<float>::infinity();
  f[3] = std::numeric_limits<float>::denorm_min();
  std::stringstream ss;
  write_dyt(ss, f);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "DYT1");
  CHECK(bytes[4] == 0);
  CHECK(bytes[5] == 3);
  CHECK(bytes.size() == 4 + 1 + 1 + 3 * 8 + 12 * 4);
  const Tensor g = read_dyt_as<float>(ss);
  REQUIRE(g.shape() == f.shape());
  CHECK(std::memcmp(g.data(), f.data(), 12 * sizeof(float)) == 0);

  const TensorD d = TensorD::randn({5}, rng);
  std::stringstream sd;
  write_dyt(sd, d);
  const AnyTensor any = read_dyt(sd);
  CHECK(dtype_of(any) == DType::f64);
  CHECK(std::get<TensorD>(any) == d);
}

TEST_CASE("DYT1 little-endian layout") {
  std::stringstream ss;
  write_dyt(ss, Tensor({2}, std::vector<float>{1.0f, -2.0f}));
  const std::string b = ss.str();
  // extent 2 as u64 LE
  CHECK(b[6] == 2);
  for (int i = 7; i < 14; ++i) CHECK(b[i] == 0);
  std::uint32_t bits = 0;
  std::memcpy(&bits, b.data() + 14, 4);
  CHECK(bits == std::bit_cast<std::uint32_t>(1.0f));
}

TEST_CASE("malformed DYT1 input is rejected") {
  auto read = [](const std::string& s) {
    std::stringstream ss(s);
    return read_dyt(ss);
  };
  CHECK_THROWS_AS(read("DYT2"), IoError);
  CHECK_THROWS_AS(read(std::string("DYT1\x07\x01", 6)), IoError);
  std::stringstream ok;
  write_dyt(ok, Tensor({4}));
  const std::string full = ok.str();
  CHECK_THROWS_AS(read(full.substr(0, full.size() - 1)), IoError);
  std::string zero_extent = full;
  zero_extent[6] = 0;  // first extent 4 -> 0
  CHECK_THROWS(read(zero_extent));
  CHECK_THROWS_AS(load_dyt("/nonexistent/file.dyt"), IoError);
}

}  // TEST_SUITE
