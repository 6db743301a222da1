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

#include "rubiconv/direct.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace rubiconv {

namespace {

std::size_t total_length(std::span<const std::size_t> doc_lengths) {
  return std::accumulate(doc_lengths.begin(), doc_lengths.end(),
                         std::size_t{0});
}

// Causal sum of one document; `x` and `y` point at its first position.
void causal_sum(std::span<const double> x, std::span<const double> taps,
                std::span<double> y) {
  for (std::size_t t = 0; t < x.size(); ++t) {
    const std::size_t last = std::min(t, taps.size() - 1);
    double acc = 0.0;
    for (std::size_t tau = 0; tau <= last; ++tau) acc += taps[tau] * x[t - tau];
    y[t] = acc;
  }
}

}  // namespace

BlockDiagOperator build_operator(std::span<const std::size_t> doc_lengths,
                                 std::span<const double> taps, BlockMode mode,
                                 std::uint64_t max_entries) {
  if (taps.empty()) throw std::invalid_argument("build_operator: no taps");
  std::uint64_t entries = 0;
  for (const std::size_t len : doc_lengths) {
    if (len == 0) {
      throw std::invalid_argument("build_operator: zero-length document");
    }
    entries += static_cast<std::uint64_t>(len) * len;
  }
  if (entries > max_entries) {
    throw CapacityError("build_operator: " + std::to_string(entries) +
                        " block entries exceed the cap of " +
                        std::to_string(max_entries));
  }

  BlockDiagOperator op;
  op.mode = mode;
  op.blocks.reserve(doc_lengths.size());
  for (const std::size_t len : doc_lengths) {
    RealMatrix block{len, len, std::vector<double>(len * len, 0.0)};
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t tau = 0; tau < taps.size(); ++tau) {
        if (mode == BlockMode::kToeplitzLinear) {
          if (tau > t) break;
          block(t, t - tau) = taps[tau];
        } else {
          block(t, (t + len - tau % len) % len) += taps[tau];
        }
      }
    }
    op.blocks.push_back(std::move(block));
  }
  return op;
}

std::vector<double> apply(const BlockDiagOperator& op, std::span<const double> x,
                          OpCounter* counter) {
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (const RealMatrix& block : op.blocks) {
    offsets.push_back(total);
    total += block.cols;
  }
  if (x.size() != total) {
    throw std::invalid_argument("apply: input length " +
                                std::to_string(x.size()) + " != operator width " +
                                std::to_string(total));
  }
  std::vector<double> y(total, 0.0);
  const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>(op.blocks.size());
  std::uint64_t real_muls = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : real_muls)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const RealMatrix& block = op.blocks[static_cast<std::size_t>(b)];
    const std::size_t off = offsets[static_cast<std::size_t>(b)];
    for (std::size_t r = 0; r < block.rows; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < block.cols; ++c) {
        acc += block(r, c) * x[off + c];
      }
      y[off + r] = acc;
    }
    real_muls += static_cast<std::uint64_t>(block.rows) * block.cols;
  }
  if (counter != nullptr) counter->real_muls += real_muls;
  return y;
}

std::vector<double> oracle_convolve(std::span<const std::size_t> doc_lengths,
                                    std::span<const double> x,
                                    std::span<const double> taps) {
  if (taps.empty()) throw std::invalid_argument("oracle_convolve: no taps");
  if (x.size() != total_length(doc_lengths)) {
    throw std::invalid_argument("oracle_convolve: signal length mismatch");
  }
  std::vector<double> y(x.size());
  std::size_t off = 0;
  for (const std::size_t len : doc_lengths) {
    causal_sum(x.subspan(off, len), taps, std::span(y).subspan(off, len));
    off += len;
  }
  return y;
}

PackedSignal oracle_convolve(std::span<const std::size_t> doc_lengths,
                             const PackedSignal& x, const FilterBank& f) {
  if (x.channels != f.channels) {
    throw std::invalid_argument("oracle_convolve: channel count mismatch");
  }
  PackedSignal y(x.length, x.channels);
  const std::ptrdiff_t channels = static_cast<std::ptrdiff_t>(x.channels);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ch = 0; ch < channels; ++ch) {
    const std::size_t d = static_cast<std::size_t>(ch);
    y.set_channel(d, oracle_convolve(doc_lengths, x.channel(d), f.channel(d)));
  }
  return y;
}

PackedSignal masked_convolve(std::span<const std::size_t> doc_lengths,
                             const PackedSignal& x, const FilterBank& f,
                             OpCounter* counter) {
  if (x.channels != f.channels) {
    throw std::invalid_argument("masked_convolve: channel count mismatch");
  }
  if (x.length != total_length(doc_lengths)) {
    throw std::invalid_argument("masked_convolve: signal length mismatch");
  }
  PackedSignal y(x.length, x.channels);
  const std::size_t n = x.length;
  const std::ptrdiff_t channels = static_cast<std::ptrdiff_t>(x.channels);
  std::uint64_t real_muls = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : real_muls)
  for (std::ptrdiff_t ch = 0; ch < channels; ++ch) {
    const std::size_t d = static_cast<std::size_t>(ch);
    const std::vector<double> taps = f.channel(d);
    std::vector<double> masked(n);
    std::vector<double> full(n);
    std::size_t off = 0;
    for (const std::size_t len : doc_lengths) {
      std::fill(masked.begin(), masked.end(), 0.0);
      for (std::size_t t = off; t < off + len; ++t) masked[t] = x.at(t, d);
      causal_sum(masked, taps, full);
      for (std::size_t t = 0; t < n; ++t) {
        real_muls += std::min(t, taps.size() - 1) + 1;
      }
      for (std::size_t t = off; t < off + len; ++t) y.at(t, d) = full[t];
      off += len;
    }
  }
  if (counter != nullptr) counter->real_muls += real_muls;
  return y;
}

std::uint64_t operator_real_muls(std::span<const std::size_t> doc_lengths,
                                 std::size_t channels) {
  std::uint64_t per_channel = 0;
  for (const std::size_t len : doc_lengths) {
    per_channel += static_cast<std::uint64_t>(len) * len;
  }
  return per_channel * channels;
}

std::uint64_t masked_real_muls(std::span<const std::size_t> doc_lengths,
                               std::size_t filter_len, std::size_t channels) {
  const std::uint64_t n = total_length(doc_lengths);
  const std::uint64_t f = filter_len;
  // sum_{t<n} min(t + 1, f)
  const std::uint64_t ramp = std::min(n, f);
  const std::uint64_t per_pass = ramp * (ramp + 1) / 2 + (n - ramp) * f;
  return per_pass * doc_lengths.size() * channels;
}

}  // namespace rubiconv
