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

#ifndef RUBICONV_DIRECT_HPP_
#define RUBICONV_DIRECT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rubiconv/linalg.hpp"
#include "rubiconv/signal.hpp"

namespace rubiconv {

inline constexpr std::uint64_t kDefaultOperatorCap = std::uint64_t{1} << 28;

// Raised when a baseline would exceed its configured memory or work budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
};

enum class BlockMode { kToeplitzLinear, kCirculant };

// diag(A_1, ..., A_n): block b acts on document b only.
struct BlockDiagOperator {
  BlockMode mode = BlockMode::kToeplitzLinear;
  std::vector<RealMatrix> blocks;
};

// Toeplitz blocks are lower triangular with A(t, t - tau) = f[tau]; circulant
// blocks wrap t - tau mod L_b. Throws CapacityError if sum of L_b^2 exceeds
// `max_entries`.
BlockDiagOperator build_operator(std::span<const std::size_t> doc_lengths,
                                 std::span<const double> taps, BlockMode mode,
                                 std::uint64_t max_entries = kDefaultOperatorCap);

// Per-document dense matvec; tallies one real multiplication per block entry.
std::vector<double> apply(const BlockDiagOperator& op, std::span<const double> x,
                          OpCounter* counter = nullptr);

// y_i[t] = sum_{tau=0}^{min(t, L_F-1)} f[tau] x_i[t - tau], per document.
std::vector<double> oracle_convolve(std::span<const std::size_t> doc_lengths,
                                    std::span<const double> x,
                                    std::span<const double> taps);

PackedSignal oracle_convolve(std::span<const std::size_t> doc_lengths,
                             const PackedSignal& x, const FilterBank& f);

// Baseline that loops over documents: zero every other document, run a causal
// direct convolution over the whole packed sequence, keep this document's
// positions.
PackedSignal masked_convolve(std::span<const std::size_t> doc_lengths,
                             const PackedSignal& x, const FilterBank& f,
                             OpCounter* counter = nullptr);

// Real multiply-adds of the baselines above, per call.
std::uint64_t operator_real_muls(std::span<const std::size_t> doc_lengths,
                                 std::size_t channels);
std::uint64_t masked_real_muls(std::span<const std::size_t> doc_lengths,
                               std::size_t filter_len, std::size_t channels);

}  // namespace rubiconv

#endif  // RUBICONV_DIRECT_HPP_
