/* Copyright 2026 The rubiconv Authors. All Rights Reserved.

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

#include "rubiconv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rubiconv {

namespace {

constexpr std::size_t kColumnChunk = 256;

void check_gemm_shapes(ConstMatrixView a, ConstMatrixView b, MatrixView c) {
  if (a.cols != b.rows) {
    throw std::invalid_argument("gemm: inner dimensions differ (" +
                                std::to_string(a.cols) + " vs " +
                                std::to_string(b.rows) + ")");
  }
  if (c.rows != a.rows || c.cols != b.cols) {
    throw std::invalid_argument("gemm: output shape mismatch");
  }
}

// One output tile: rows [i, i+1), columns [j0, j1). Accumulation order over
// the inner index is fixed.
template <GemmMode kMode>
void gemm_tile(ConstMatrixView a, ConstMatrixView b, MatrixView c,
               std::size_t i, std::size_t j0, std::size_t j1,
               OpCounter& tally) {
  Complex* out = &c(i, 0);
  for (std::size_t j = j0; j < j1; ++j) out[j] = Complex{};
  for (std::size_t p = 0; p < a.cols; ++p) {
    const Complex aip = a(i, p);
    const Complex* brow = &b(p, 0);
    for (std::size_t j = j0; j < j1; ++j) {
      if constexpr (kMode == GemmMode::kKaratsuba) {
        out[j] += mul_karatsuba(aip, brow[j], tally);
      } else {
        out[j] += mul_standard(aip, brow[j], tally);
      }
    }
  }
}

template <GemmMode kMode>
void gemm_dispatch(ConstMatrixView a, ConstMatrixView b, MatrixView c,
                   bool parallel, OpCounter* counter) {
  const std::size_t chunks = (b.cols + kColumnChunk - 1) / kColumnChunk;
  const std::ptrdiff_t tiles = static_cast<std::ptrdiff_t>(a.rows * chunks);
  std::uint64_t complex_muls = 0;
  std::uint64_t real_muls = 0;
#pragma omp parallel for schedule(static) if (parallel && tiles > 1) \
    reduction(+ : complex_muls, real_muls)
  for (std::ptrdiff_t t = 0; t < tiles; ++t) {
    const std::size_t i = static_cast<std::size_t>(t) / chunks;
    const std::size_t j0 = (static_cast<std::size_t>(t) % chunks) * kColumnChunk;
    const std::size_t j1 = std::min(b.cols, j0 + kColumnChunk);
    OpCounter tally;
    gemm_tile<kMode>(a, b, c, i, j0, j1, tally);
    complex_muls += tally.complex_muls;
    real_muls += tally.real_muls;
  }
  if (counter != nullptr) *counter += OpCounter{complex_muls, real_muls};
}

void gemm_impl(ConstMatrixView a, ConstMatrixView b, MatrixView c,
               GemmMode mode, bool parallel, OpCounter* counter) {
  check_gemm_shapes(a, b, c);
  if (mode == GemmMode::kKaratsuba) {
    gemm_dispatch<GemmMode::kKaratsuba>(a, b, c, parallel, counter);
  } else {
    gemm_dispatch<GemmMode::kStandard>(a, b, c, parallel, counter);
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("ComplexMatrix: data length " +
                                std::to_string(data_.size()) +
                                " != rows*cols " + std::to_string(rows * cols));
  }
}

ComplexMatrix ComplexMatrix::Identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ConstMatrixView ComplexMatrix::block(std::size_t row0, std::size_t col0,
                                     std::size_t rows, std::size_t cols) const {
  if (row0 + rows > rows_ || col0 + cols > cols_) {
    throw std::out_of_range("ComplexMatrix::block out of range");
  }
  return {data_.data() + row0 * cols_ + col0, rows, cols, cols_};
}

MatrixView ComplexMatrix::block(std::size_t row0, std::size_t col0,
                                std::size_t rows, std::size_t cols) {
  if (row0 + rows > rows_ || col0 + cols > cols_) {
    throw std::out_of_range("ComplexMatrix::block out of range");
  }
  return {data_.data() + row0 * cols_ + col0, rows, cols, cols_};
}

Complex root_of_unity(std::size_t n, std::uint64_t power) {
  if (n == 0) throw std::invalid_argument("root_of_unity: n must be >= 1");
  const std::uint64_t p = power % n;
  if (p == 0) return {1.0, 0.0};
  // Exact values at the quarter points keep F_2 and F_4 free of rounding.
  if (4 * p == n) return {0.0, 1.0};
  if (2 * p == n) return {-1.0, 0.0};
  if (4 * p == 3 * n) return {0.0, -1.0};
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(p) /
                       static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

ComplexMatrix dft_matrix(std::size_t j) {
  if (j == 0) throw std::invalid_argument("dft_matrix: size must be >= 1");
  std::vector<Complex> roots(j);
  for (std::size_t p = 0; p < j; ++p) roots[p] = root_of_unity(j, p);
  ComplexMatrix f(j, j);
  for (std::size_t l = 0; l < j; ++l) {
    for (std::size_t m = 0; m < j; ++m) f(l, m) = roots[(l * m) % j];
  }
  return f;
}

void gemm_into(ConstMatrixView a, ConstMatrixView b, MatrixView c,
               GemmMode mode, OpCounter* counter) {
  gemm_impl(a, b, c, mode, /*parallel=*/true, counter);
}

void gemm_into_serial(ConstMatrixView a, ConstMatrixView b, MatrixView c,
                      GemmMode mode, OpCounter* counter) {
  gemm_impl(a, b, c, mode, /*parallel=*/false, counter);
}

ComplexMatrix gemm(const ComplexMatrix& a, const ComplexMatrix& b,
                   GemmMode mode, OpCounter* counter) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("gemm: A is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", B is " +
                                std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
  }
  ComplexMatrix c(a.rows(), b.cols());
  gemm_into(a.view(), b.view(), c.view(), mode, counter);
  return c;
}

ComplexMatrix elementwise_mul(const ComplexMatrix& a, const ComplexMatrix& b,
                              OpCounter* counter) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("elementwise_mul: shape mismatch");
  }
  ComplexMatrix c(a.rows(), a.cols());
  const auto lhs = a.data();
  const auto rhs = b.data();
  auto out = c.data();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
  std::uint64_t complex_muls = 0;
  std::uint64_t real_muls = 0;
#pragma omp parallel for schedule(static) reduction(+ : complex_muls, real_muls)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    OpCounter tally;
    out[i] = mul_standard(lhs[i], rhs[i], tally);
    complex_muls += tally.complex_muls;
    real_muls += tally.real_muls;
  }
  if (counter != nullptr) *counter += OpCounter{complex_muls, real_muls};
  return c;
}

std::vector<Complex> naive_dft(std::span<const Complex> x) {
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("naive_dft: empty input");
  std::vector<Complex> roots(n);
  for (std::size_t p = 0; p < n; ++p) roots[p] = root_of_unity(n, p);
  std::vector<Complex> y(n);
  for (std::size_t j = 0; j < n; ++j) {
    Complex acc{};
    std::size_t idx = 0;  // (j * l) mod n, advanced incrementally
    for (std::size_t l = 0; l < n; ++l) {
      acc += roots[idx] * x[l];
      idx += j;
      if (idx >= n) idx -= n;
    }
    y[j] = acc;
  }
  return y;
}

std::vector<Complex> conj(std::span<const Complex> x) {
  std::vector<Complex> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(),
                 [](Complex v) { return std::conj(v); });
  return out;
}

namespace reference {

ComplexMatrix gemm(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("reference::gemm: shape mismatch");
  }
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double re = 0.0;
      double im = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) {
        const Complex x = a(i, p);
        const Complex y = b(p, j);
        re += x.real() * y.real() - x.imag() * y.imag();
        im += x.real() * y.imag() + x.imag() * y.real();
      }
      c(i, j) = {re, im};
    }
  }
  return c;
}

}  // namespace reference

}  // namespace rubiconv
