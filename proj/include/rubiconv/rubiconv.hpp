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

#ifndef RUBICONV_RUBICONV_HPP_
#define RUBICONV_RUBICONV_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rubiconv/linalg.hpp"
#include "rubiconv/packing.hpp"
#include "rubiconv/signal.hpp"

namespace rubiconv {

// Everything the packed transform needs that depends only on
// (doc_lengths, filter_len, k). Built once per batch and shared by every
// layer and channel that sees the same document boundaries.
struct RubiConvPlan {
  PackedLayout layout;
  ComplexMatrix m1;       // F_k
  ComplexMatrix twiddle;  // k x m_total, doc i column b row a: w_{L_i'}^{a*b}
  std::vector<ComplexMatrix> m2_blocks;  // F_{m_i}, applied blockwise
  IndexMap p1;
  IndexMap pre_ifft;
  IndexMap p2;         // truncates each document to L_i
  IndexMap p2_padded;  // keeps all L_i' frequencies
  std::vector<double> inv_scale;        // per grid column: 1 / L_i'
  std::vector<std::size_t> column_doc;  // per grid column: document index
  // Entries materialized while building the plan, not counting M1, which
  // depends on k alone.
  std::uint64_t construction_entries = 0;

  friend bool operator==(const RubiConvPlan&, const RubiConvPlan&) = default;
};

RubiConvPlan build_plan(std::span<const std::size_t> doc_lengths,
                        std::size_t filter_len, std::size_t k = kDefaultK);

// Packed transform on a k x (m_total * batches) grid holding `batches`
// independent grids side by side: M1 from the left, twiddle, then each
// document block right-multiplied by its own F_{m_i}. Document i's output
// block holds its L_i'-point DFT in column-major order.
ComplexMatrix forward_grid(const RubiConvPlan& plan, const ComplexMatrix& grid,
                           GemmMode mode = GemmMode::kKaratsuba,
                           OpCounter* counter = nullptr);

// Padded packed vector in, per-document L_i'-point DFTs out (same length).
// Throws std::invalid_argument if x.size() != total_padded.
std::vector<Complex> forward(const RubiConvPlan& plan,
                             std::span<const Complex> x,
                             GemmMode mode = GemmMode::kKaratsuba,
                             OpCounter* counter = nullptr);

// Per-document inverse through the forward kernel:
// x_i = conj(forward(conj(X)))_i / L_i'.
std::vector<Complex> inverse(const RubiConvPlan& plan,
                             std::span<const Complex> spectrum,
                             GemmMode mode = GemmMode::kKaratsuba,
                             OpCounter* counter = nullptr);

// Padded batch values, total_padded x D row-major; padded tails are zero.
std::vector<double> pad_to_layout(const PackedLayout& layout,
                                  const PackedSignal& x);

// Filter taps laid out per document, total_padded x D row-major. Document i
// receives the first min(L_F, L_i) taps followed by zeros up to L_i'.
std::vector<double> filter_grid_embed(const RubiConvPlan& plan,
                                      const FilterBank& f);

// Splits the transform of Z = B + iF (both real) into the transforms of B and
// F using conjugate symmetry within each document block.
struct DualSpectra {
  ComplexMatrix batch;
  ComplexMatrix filter;
};
DualSpectra recover_dual_real(const RubiConvPlan& plan,
                              const ComplexMatrix& z_spectrum);

enum class ConvPath {
  kFused,    // one forward pass over B + iF, then symmetry recovery
  kUnfused,  // separate forward passes for B and F
};

struct ConvOptions {
  ConvPath path = ConvPath::kFused;
  GemmMode gemm = GemmMode::kKaratsuba;
};

// Depthwise causal convolution of every document with the filter bank,
// returning L_total x D. Throws std::invalid_argument on channel count,
// sequence length or filter length mismatch with the plan.
PackedSignal convolve(const RubiConvPlan& plan, const PackedSignal& x,
                      const FilterBank& f, ConvOptions options = {},
                      OpCounter* counter = nullptr);

// Closed-form multiplication counts of the kernels above.
std::uint64_t forward_complex_muls(const PackedLayout& layout);
std::uint64_t convolve_complex_muls(const PackedLayout& layout,
                                    std::size_t channels,
                                    ConvPath path = ConvPath::kFused);

}  // namespace rubiconv

#endif  // RUBICONV_RUBICONV_HPP_
