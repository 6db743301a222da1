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

#ifndef RUBICONV_LINALG_HPP_
#define RUBICONV_LINALG_HPP_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rubiconv {

using Complex = std::complex<double>;

// Multiplication tallies. Kernels accumulate into thread-local tallies and add
// them to the caller's counter once, so a counter is never shared across
// threads.
struct OpCounter {
  std::uint64_t complex_muls = 0;
  std::uint64_t real_muls = 0;

  OpCounter& operator+=(const OpCounter& other) {
    complex_muls += other.complex_muls;
    real_muls += other.real_muls;
    return *this;
  }
};

enum class GemmMode { kStandard, kKaratsuba };

// Non-owning strided views used by the blockwise GEMMs.
struct ConstMatrixView {
  const Complex* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t stride = 0;

  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data[r * stride + c];
  }
};

struct MatrixView {
  Complex* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t stride = 0;

  Complex& operator()(std::size_t r, std::size_t c) const {
    return data[r * stride + c];
  }
  operator ConstMatrixView() const { return {data, rows, cols, stride}; }
};

// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  // Throws std::invalid_argument unless data.size() == rows * cols.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data);

  static ComplexMatrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  Complex& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  ConstMatrixView view() const { return {data_.data(), rows_, cols_, cols_}; }
  MatrixView view() { return {data_.data(), rows_, cols_, cols_}; }
  // Sub-block [row0, row0 + rows) x [col0, col0 + cols).
  ConstMatrixView block(std::size_t row0, std::size_t col0, std::size_t rows,
                        std::size_t cols) const;
  MatrixView block(std::size_t row0, std::size_t col0, std::size_t rows,
                   std::size_t cols);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

// exp(+2*pi*i * power / n), with the exponent reduced mod n before the
// trigonometric evaluation so large powers keep full accuracy.
Complex root_of_unity(std::size_t n, std::uint64_t power);

// F_j with (F_j)_{lm} = exp(+2*pi*i * l*m / j).
ComplexMatrix dft_matrix(std::size_t j);

// Scalar complex products routed through the tally so that the per-product
// real multiplication count is observable.
inline Complex mul_standard(Complex a, Complex b, OpCounter& tally) {
  tally.complex_muls += 1;
  tally.real_muls += 4;
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

// (a+bi)(c+di): p1 = ac, p2 = bd, p3 = (a+b)(c+d); re = p1-p2, im = p3-p1-p2.
inline Complex mul_karatsuba(Complex a, Complex b, OpCounter& tally) {
  tally.complex_muls += 1;
  tally.real_muls += 3;
  const double p1 = a.real() * b.real();
  const double p2 = a.imag() * b.imag();
  const double p3 = (a.real() + a.imag()) * (b.real() + b.imag());
  return {p1 - p2, p3 - p1 - p2};
}

// c = a * b. Parallel over output tiles; each output entry is accumulated by
// one thread in a fixed order, so results do not depend on the thread count.
void gemm_into(ConstMatrixView a, ConstMatrixView b, MatrixView c,
               GemmMode mode, OpCounter* counter = nullptr);

// Same contract as gemm_into, always on the calling thread. Used inside
// regions that are already parallel.
void gemm_into_serial(ConstMatrixView a, ConstMatrixView b, MatrixView c,
                      GemmMode mode, OpCounter* counter = nullptr);

ComplexMatrix gemm(const ComplexMatrix& a, const ComplexMatrix& b,
                   GemmMode mode = GemmMode::kStandard,
                   OpCounter* counter = nullptr);

// Hadamard product with standard complex multiplication.
ComplexMatrix elementwise_mul(const ComplexMatrix& a, const ComplexMatrix& b,
                              OpCounter* counter = nullptr);

// O(N^2) DFT with the positive-exponent convention.
std::vector<Complex> naive_dft(std::span<const Complex> x);

std::vector<Complex> conj(std::span<const Complex> x);

namespace reference {

// Textbook dot-product GEMM, single-threaded. Kept as the serial baseline the
// tiled kernel is tested and benchmarked against.
ComplexMatrix gemm(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace reference

}  // namespace rubiconv

#endif  // RUBICONV_LINALG_HPP_
