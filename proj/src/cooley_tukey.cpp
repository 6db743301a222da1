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

#include "rubiconv/cooley_tukey.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace rubiconv {

namespace {

CtLayout finish_layout(CtLayout layout) {
  layout.offsets.clear();
  layout.total = 0;
  layout.max_log2 = 0;
  for (const std::size_t span : layout.pow2_lengths) {
    layout.offsets.push_back(layout.total);
    layout.total += span;
    layout.max_log2 = std::max<std::size_t>(layout.max_log2,
                                            std::countr_zero(span));
  }
  return layout;
}

void check_spans(const CtLayout& layout, std::size_t length) {
  for (const std::size_t span : layout.pow2_lengths) {
    if (!std::has_single_bit(span)) {
      throw std::invalid_argument("masked transform: span " +
                                  std::to_string(span) +
                                  " is not a power of two");
    }
  }
  if (length != layout.total) {
    throw std::invalid_argument("masked transform: input length " +
                                std::to_string(length) + " != layout total " +
                                std::to_string(layout.total));
  }
}

std::size_t reverse_bits(std::size_t v, std::size_t bits) {
  std::size_t r = 0;
  for (std::size_t b = 0; b < bits; ++b) {
    r = (r << 1) | (v & 1);
    v >>= 1;
  }
  return r;
}

// One stage of the roll-based update. Reads `in`, writes `out`.
void apply_stage(const StageTwiddles& tw, std::size_t half,
                 std::span<const Complex> in, std::span<Complex> out,
                 bool parallel, OpCounter& tally) {
  const std::size_t n = in.size();
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(n);
  std::uint64_t complex_muls = 0;
  std::uint64_t real_muls = 0;
#pragma omp parallel for schedule(static) if (parallel) \
    reduction(+ : complex_muls, real_muls)
  for (std::ptrdiff_t s = 0; s < count; ++s) {
    const std::size_t i = static_cast<std::size_t>(s);
    const std::size_t behind = (i + n - half % n) % n;  // roll(y, m/2)[i]
    const std::size_t ahead = (i + half) % n;           // roll(y, -m/2)[i]
    OpCounter local;
    out[i] = mul_standard(in[i], tw.tw0[i], local) +
             mul_standard(in[behind], tw.twf[i], local) +
             mul_standard(in[ahead], tw.twb[i], local);
    complex_muls += local.complex_muls;
    real_muls += local.real_muls;
  }
  tally += OpCounter{complex_muls, real_muls};
}

std::vector<Complex> run_masked(const CtPlan& plan, std::span<const Complex> y,
                                bool parallel, OpCounter* counter,
                                const StageObserver& observer) {
  std::vector<Complex> state = bit_reverse_permute(y, plan.layout);
  std::vector<Complex> next(state.size());
  OpCounter tally;
  for (std::size_t s = 1; s <= plan.stages.size(); ++s) {
    apply_stage(plan.stages[s - 1], std::size_t{1} << (s - 1), state, next,
                parallel, tally);
    state.swap(next);
    if (observer) observer(s, state);
  }
  if (counter != nullptr) *counter += tally;
  return state;
}

}  // namespace

CtLayout build_ct_layout(std::span<const std::size_t> doc_lengths,
                         std::size_t filter_len) {
  if (doc_lengths.empty()) {
    throw std::invalid_argument("build_ct_layout: no documents");
  }
  if (filter_len == 0) {
    throw std::invalid_argument("build_ct_layout: filter length must be >= 1");
  }
  CtLayout layout;
  layout.doc_lengths.assign(doc_lengths.begin(), doc_lengths.end());
  layout.filter_len = filter_len;
  for (const std::size_t len : doc_lengths) {
    if (len == 0) {
      throw std::invalid_argument("build_ct_layout: zero-length document");
    }
    layout.pow2_lengths.push_back(
        std::bit_ceil(len + std::min(len, filter_len) - 1));
  }
  return finish_layout(std::move(layout));
}

CtLayout ct_layout_from_spans(std::span<const std::size_t> spans) {
  if (spans.empty()) {
    throw std::invalid_argument("ct_layout_from_spans: no documents");
  }
  CtLayout layout;
  layout.doc_lengths.assign(spans.begin(), spans.end());
  layout.pow2_lengths.assign(spans.begin(), spans.end());
  for (const std::size_t span : spans) {
    if (!std::has_single_bit(span)) {
      throw std::invalid_argument("ct_layout_from_spans: span " +
                                  std::to_string(span) +
                                  " is not a power of two");
    }
  }
  return finish_layout(std::move(layout));
}

CtPlan build_ct_plan(CtLayout layout) {
  check_spans(layout, layout.total);
  CtPlan plan;
  plan.layout = std::move(layout);
  const CtLayout& lay = plan.layout;
  for (std::size_t s = 1; s <= lay.max_log2; ++s) {
    const std::size_t m = std::size_t{1} << s;
    const std::size_t half = m / 2;
    StageTwiddles tw{std::vector<Complex>(lay.total, 1.0),
                     std::vector<Complex>(lay.total, 0.0),
                     std::vector<Complex>(lay.total, 0.0)};
    for (std::size_t d = 0; d < lay.num_docs(); ++d) {
      // Spans shorter than the stage keep the identity triple (1, 0, 0).
      if (lay.pow2_lengths[d] < m) continue;
      for (std::size_t j = 0; j < lay.pow2_lengths[d]; ++j) {
        const std::size_t i = lay.offsets[d] + j;
        const std::size_t pos = j % m;
        if (pos < half) {
          // Even half: E + w^p O, with O sitting m/2 ahead.
          tw.twb[i] = root_of_unity(m, pos);
        } else {
          // Odd half: E - w^p O, with E sitting m/2 behind.
          tw.tw0[i] = -root_of_unity(m, pos - half);
          tw.twf[i] = 1.0;
        }
      }
    }
    plan.stages.push_back(std::move(tw));
  }
  return plan;
}

std::vector<Complex> bit_reverse_permute(std::span<const Complex> y,
                                         const CtLayout& layout) {
  check_spans(layout, y.size());
  std::vector<Complex> out(y.size());
  for (std::size_t d = 0; d < layout.pow2_lengths.size(); ++d) {
    const std::size_t span = layout.pow2_lengths[d];
    const std::size_t bits = static_cast<std::size_t>(std::countr_zero(span));
    const std::size_t off = layout.offsets[d];
    for (std::size_t i = 0; i < span; ++i) {
      out[off + reverse_bits(i, bits)] = y[off + i];
    }
  }
  return out;
}

std::vector<Complex> masked_fft(const CtPlan& plan, std::span<const Complex> y,
                                OpCounter* counter,
                                const StageObserver& observer) {
  return run_masked(plan, y, /*parallel=*/true, counter, observer);
}

std::vector<Complex> masked_ifft(const CtPlan& plan,
                                 std::span<const Complex> spectrum,
                                 OpCounter* counter) {
  std::vector<Complex> y = masked_fft(plan, conj(spectrum), counter);
  const CtLayout& layout = plan.layout;
  for (std::size_t d = 0; d < layout.num_docs(); ++d) {
    const double scale = 1.0 / static_cast<double>(layout.pow2_lengths[d]);
    for (std::size_t t = 0; t < layout.pow2_lengths[d]; ++t) {
      Complex& v = y[layout.offsets[d] + t];
      v = std::conj(v) * scale;
    }
  }
  return y;
}

PackedSignal ct_convolve(const CtPlan& plan, const PackedSignal& x,
                         const FilterBank& f, OpCounter* counter) {
  const CtLayout& layout = plan.layout;
  std::size_t total_valid = 0;
  for (const std::size_t len : layout.doc_lengths) total_valid += len;
  if (x.channels != f.channels) {
    throw std::invalid_argument("ct_convolve: channel count mismatch");
  }
  if (x.length != total_valid) {
    throw std::invalid_argument("ct_convolve: signal length mismatch");
  }
  if (f.taps != layout.filter_len) {
    throw std::invalid_argument("ct_convolve: filter length mismatch");
  }

  PackedSignal out(total_valid, x.channels);
  const std::ptrdiff_t channels = static_cast<std::ptrdiff_t>(x.channels);
  std::uint64_t complex_muls = 0;
  std::uint64_t real_muls = 0;
  // Channels in parallel; the stage kernel inside stays on this thread.
#pragma omp parallel for schedule(dynamic) reduction(+ : complex_muls, real_muls)
  for (std::ptrdiff_t ch = 0; ch < channels; ++ch) {
    const std::size_t d = static_cast<std::size_t>(ch);
    std::vector<Complex> sig(layout.total, 0.0);
    std::vector<Complex> taps(layout.total, 0.0);
    std::size_t src = 0;
    for (std::size_t doc = 0; doc < layout.num_docs(); ++doc) {
      const std::size_t len = layout.doc_lengths[doc];
      const std::size_t off = layout.offsets[doc];
      for (std::size_t t = 0; t < len; ++t) sig[off + t] = x.at(src + t, d);
      const std::size_t n_taps = std::min(f.taps, len);
      for (std::size_t t = 0; t < n_taps; ++t) taps[off + t] = f.at(t, d);
      src += len;
    }
    OpCounter tally;
    const std::vector<Complex> sx = run_masked(plan, sig, false, &tally, {});
    const std::vector<Complex> sf = run_masked(plan, taps, false, &tally, {});
    std::vector<Complex> prod(layout.total);
    for (std::size_t i = 0; i < layout.total; ++i) {
      prod[i] = std::conj(mul_standard(sx[i], sf[i], tally));
    }
    const std::vector<Complex> y = run_masked(plan, prod, false, &tally, {});
    src = 0;
    for (std::size_t doc = 0; doc < layout.num_docs(); ++doc) {
      const double scale =
          1.0 / static_cast<double>(layout.pow2_lengths[doc]);
      for (std::size_t t = 0; t < layout.doc_lengths[doc]; ++t) {
        out.at(src + t, d) = y[layout.offsets[doc] + t].real() * scale;
      }
      src += layout.doc_lengths[doc];
    }
    complex_muls += tally.complex_muls;
    real_muls += tally.real_muls;
  }
  if (counter != nullptr) *counter += OpCounter{complex_muls, real_muls};
  return out;
}

std::uint64_t masked_fft_complex_muls(const CtLayout& layout) {
  return 3ull * layout.total * layout.max_log2;
}

std::uint64_t ct_convolve_complex_muls(const CtLayout& layout,
                                       std::size_t channels) {
  return channels * (3 * masked_fft_complex_muls(layout) + layout.total);
}

namespace reference {

std::vector<Complex> masked_fft(const CtPlan& plan,
                                std::span<const Complex> y) {
  std::vector<Complex> state = bit_reverse_permute(y, plan.layout);
  const std::size_t n = state.size();
  std::vector<Complex> forward_roll(n);
  std::vector<Complex> backward_roll(n);
  for (std::size_t s = 1; s <= plan.stages.size(); ++s) {
    const std::size_t half = std::size_t{1} << (s - 1);
    std::rotate_copy(state.begin(), state.end() - static_cast<std::ptrdiff_t>(half),
                     state.end(), forward_roll.begin());
    std::rotate_copy(state.begin(), state.begin() + static_cast<std::ptrdiff_t>(half),
                     state.end(), backward_roll.begin());
    const StageTwiddles& tw = plan.stages[s - 1];
    for (std::size_t i = 0; i < n; ++i) {
      state[i] = state[i] * tw.tw0[i] + forward_roll[i] * tw.twf[i] +
                 backward_roll[i] * tw.twb[i];
    }
  }
  return state;
}

}  // namespace reference

}  // namespace rubiconv
