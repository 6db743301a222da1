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

#ifndef RUBICONV_COOLEY_TUKEY_HPP_
#define RUBICONV_COOLEY_TUKEY_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rubiconv/linalg.hpp"
#include "rubiconv/signal.hpp"

namespace rubiconv {

// Packed layout for the masked radix-2 transform: every document gets its own
// power-of-two span, so active butterflies never pair positions of two
// documents.
struct CtLayout {
  std::vector<std::size_t> doc_lengths;
  std::size_t filter_len = 1;
  std::vector<std::size_t> pow2_lengths;
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  std::size_t max_log2 = 0;

  std::size_t num_docs() const { return doc_lengths.size(); }
};

// Span i is the least power of two >= L_i + min(L_i, L_F) - 1.
CtLayout build_ct_layout(std::span<const std::size_t> doc_lengths,
                         std::size_t filter_len);

// Spans given directly (each must be a power of two); doc_lengths = spans.
CtLayout ct_layout_from_spans(std::span<const std::size_t> spans);

// Per-position butterfly coefficients of one stage:
// y' = y * tw0 + roll(y, m/2) * twf + roll(y, -m/2) * twb,
// with roll(y, s)[i] = y[(i - s) mod N].
struct StageTwiddles {
  std::vector<Complex> tw0;
  std::vector<Complex> twf;
  std::vector<Complex> twb;
};

struct CtPlan {
  CtLayout layout;
  std::vector<StageTwiddles> stages;  // stages[s - 1] for s = 1..max_log2
};

CtPlan build_ct_plan(CtLayout layout);

// Within each span of length 2^s, local index i moves to the s-bit reversal
// of i. Throws std::invalid_argument for a non-power-of-two span or a length
// mismatch.
std::vector<Complex> bit_reverse_permute(std::span<const Complex> y,
                                         const CtLayout& layout);

using StageObserver =
    std::function<void(std::size_t stage, std::span<const Complex> state)>;

// Bit reversal followed by the masked butterfly stages over the whole packed
// vector. `observer`, if set, sees the state after every stage.
std::vector<Complex> masked_fft(const CtPlan& plan, std::span<const Complex> y,
                                OpCounter* counter = nullptr,
                                const StageObserver& observer = {});

// Per-document inverse: conj(masked_fft(conj(X))) / span.
std::vector<Complex> masked_ifft(const CtPlan& plan,
                                 std::span<const Complex> spectrum,
                                 OpCounter* counter = nullptr);

// Depthwise causal convolution, same contract as rubiconv::convolve.
PackedSignal ct_convolve(const CtPlan& plan, const PackedSignal& x,
                         const FilterBank& f, OpCounter* counter = nullptr);

std::uint64_t masked_fft_complex_muls(const CtLayout& layout);
std::uint64_t ct_convolve_complex_muls(const CtLayout& layout,
                                       std::size_t channels);

namespace reference {

// Single-threaded masked transform with the stage update written as a plain
// loop; the baseline for the OpenMP kernel.
std::vector<Complex> masked_fft(const CtPlan& plan,
                                std::span<const Complex> y);

}  // namespace reference

}  // namespace rubiconv

#endif  // RUBICONV_COOLEY_TUKEY_HPP_
