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

#include "rubiconv/rubiconv.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace rubiconv {

namespace {

std::size_t batch_count(const RubiConvPlan& plan, const ComplexMatrix& grid) {
  const std::size_t cols = plan.layout.total_cols;
  if (grid.rows() != plan.layout.k || cols == 0 || grid.cols() % cols != 0) {
    throw std::invalid_argument(
        "forward_grid: grid must be k x (m_total * batches), got " +
        std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()));
  }
  return grid.cols() / cols;
}

void check_signal(const RubiConvPlan& plan, const PackedSignal& x,
                  const FilterBank& f) {
  if (x.channels != f.channels) {
    throw std::invalid_argument("convolve: signal has " +
                                std::to_string(x.channels) +
                                " channels, filter has " +
                                std::to_string(f.channels));
  }
  if (x.length != plan.layout.total_valid) {
    throw std::invalid_argument("convolve: signal length " +
                                std::to_string(x.length) +
                                " does not match the plan's " +
                                std::to_string(plan.layout.total_valid));
  }
  if (f.taps != plan.layout.filter_len) {
    throw std::invalid_argument("convolve: filter length " +
                                std::to_string(f.taps) +
                                " does not match the plan's " +
                                std::to_string(plan.layout.filter_len));
  }
}

// Lays `channels` padded real channels (total_padded x D row-major) onto a
// k x (m_total * D) grid through P1, optionally adding a second set as the
// imaginary part.
ComplexMatrix to_grid(const RubiConvPlan& plan, std::span<const double> re,
                      std::span<const double> im, std::size_t channels) {
  const std::size_t k = plan.layout.k;
  const std::size_t cols = plan.layout.total_cols;
  ComplexMatrix grid(k, cols * channels);
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t j = static_cast<std::size_t>(r) * cols + c;
      const std::size_t src = plan.p1.source_index(j) * channels;
      for (std::size_t d = 0; d < channels; ++d) {
        grid(static_cast<std::size_t>(r), d * cols + c) = {
            re[src + d], im.empty() ? 0.0 : im[src + d]};
      }
    }
  }
  return grid;
}

// Pointwise spectrum product followed by the pre-IFFT reshape and
// conjugation, so the result can go straight into forward_grid.
ComplexMatrix product_for_inverse(const RubiConvPlan& plan,
                                  const ComplexMatrix& batch,
                                  const ComplexMatrix& filter,
                                  OpCounter* counter) {
  const ComplexMatrix s = elementwise_mul(batch, filter, counter);
  const std::size_t k = plan.layout.k;
  const std::size_t cols = plan.layout.total_cols;
  const std::size_t batches = s.cols() / cols;
  ComplexMatrix out(k, s.cols());
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t j = static_cast<std::size_t>(r) * cols + c;
      const std::size_t sr = plan.pre_ifft.src_row[j];
      const std::size_t sc = plan.pre_ifft.src_col[j];
      for (std::size_t b = 0; b < batches; ++b) {
        out(static_cast<std::size_t>(r), b * cols + c) =
            std::conj(s(sr, b * cols + sc));
      }
    }
  }
  return out;
}

// Real part, per-document 1/L_i' scaling and P2 truncation of the second
// forward pass. The conjugation of the inverse identity does not change the
// real part, so it is skipped.
PackedSignal finish_inverse(const RubiConvPlan& plan, const ComplexMatrix& y,
                            std::size_t channels) {
  const std::size_t cols = plan.layout.total_cols;
  PackedSignal out(plan.layout.total_valid, channels);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.length);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const std::size_t j = static_cast<std::size_t>(t);
    const std::size_t r = plan.p2.src_row[j];
    const std::size_t c = plan.p2.src_col[j];
    for (std::size_t d = 0; d < channels; ++d) {
      out.at(j, d) = y(r, d * cols + c).real() * plan.inv_scale[c];
    }
  }
  return out;
}

}  // namespace

RubiConvPlan build_plan(std::span<const std::size_t> doc_lengths,
                        std::size_t filter_len, std::size_t k) {
  RubiConvPlan plan;
  plan.layout = build_layout(doc_lengths, filter_len, k);
  const PackedLayout& layout = plan.layout;
  const std::size_t cols = layout.total_cols;

  plan.m1 = dft_matrix(k);
  plan.twiddle = ComplexMatrix(k, cols);
  std::map<std::size_t, ComplexMatrix> dft_cache;
  std::uint64_t entries = k * cols;
  for (std::size_t i = 0; i < layout.num_docs(); ++i) {
    const std::size_t m = layout.cols_per_doc[i];
    const std::size_t n = layout.padded_lengths[i];
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        plan.twiddle(a, layout.col_offsets[i] + b) =
            root_of_unity(n, static_cast<std::uint64_t>(a) * b);
      }
    }
    auto it = dft_cache.find(m);
    if (it == dft_cache.end()) it = dft_cache.emplace(m, dft_matrix(m)).first;
    plan.m2_blocks.push_back(it->second);
    entries += m * m;
  }

  plan.p1 = build_p1(layout);
  plan.pre_ifft = build_pre_ifft_map(layout);
  plan.p2 = build_p2(layout, P2Extent::kDocument);
  plan.p2_padded = build_p2(layout, P2Extent::kPadded);
  plan.column_doc = column_documents(layout);
  plan.inv_scale.resize(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    plan.inv_scale[c] =
        1.0 / static_cast<double>(layout.padded_lengths[plan.column_doc[c]]);
  }
  entries += plan.p1.size() + plan.pre_ifft.size() + plan.p2.size() +
             plan.p2_padded.size() + 2 * cols;
  plan.construction_entries = entries;
  return plan;
}

ComplexMatrix forward_grid(const RubiConvPlan& plan, const ComplexMatrix& grid,
                           GemmMode mode, OpCounter* counter) {
  const std::size_t batches = batch_count(plan, grid);
  const PackedLayout& layout = plan.layout;
  const std::size_t k = layout.k;
  const std::size_t cols = layout.total_cols;

  // Column DFTs for every document and batch at once.
  ComplexMatrix y = gemm(plan.m1, grid, mode, counter);

  // Twiddles use standard multiplication; Karatsuba only pays off inside
  // the GEMMs.
  {
    std::uint64_t complex_muls = 0;
    std::uint64_t real_muls = 0;
    const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(static) reduction(+ : complex_muls, real_muls)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      OpCounter tally;
      const std::size_t row = static_cast<std::size_t>(r);
      for (std::size_t b = 0; b < batches; ++b) {
        for (std::size_t c = 0; c < cols; ++c) {
          Complex& v = y(row, b * cols + c);
          v = mul_standard(v, plan.twiddle(row, c), tally);
        }
      }
      complex_muls += tally.complex_muls;
      real_muls += tally.real_muls;
    }
    if (counter != nullptr) *counter += OpCounter{complex_muls, real_muls};
  }

  // Row DFTs: each document block meets its own F_{m_i} only.
  ComplexMatrix out(k, grid.cols());
  const std::size_t docs = layout.num_docs();
  const std::ptrdiff_t tasks = static_cast<std::ptrdiff_t>(docs * batches);
  std::uint64_t complex_muls = 0;
  std::uint64_t real_muls = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : complex_muls, real_muls)
  for (std::ptrdiff_t t = 0; t < tasks; ++t) {
    const std::size_t b = static_cast<std::size_t>(t) / docs;
    const std::size_t i = static_cast<std::size_t>(t) % docs;
    const std::size_t m = layout.cols_per_doc[i];
    const std::size_t c0 = b * cols + layout.col_offsets[i];
    OpCounter tally;
    gemm_into_serial(y.block(0, c0, k, m), plan.m2_blocks[i].view(),
                     out.block(0, c0, k, m), mode, &tally);
    complex_muls += tally.complex_muls;
    real_muls += tally.real_muls;
  }
  if (counter != nullptr) *counter += OpCounter{complex_muls, real_muls};
  return out;
}

std::vector<Complex> forward(const RubiConvPlan& plan,
                             std::span<const Complex> x, GemmMode mode,
                             OpCounter* counter) {
  if (x.size() != plan.layout.total_padded) {
    throw std::invalid_argument("forward: input length " +
                                std::to_string(x.size()) + " != padded length " +
                                std::to_string(plan.layout.total_padded));
  }
  ComplexMatrix grid(plan.layout.k, plan.layout.total_cols,
                     gather<Complex>(plan.p1, x));
  const ComplexMatrix spectrum = forward_grid(plan, grid, mode, counter);
  return gather<Complex>(plan.p2_padded, spectrum.data());
}

std::vector<Complex> inverse(const RubiConvPlan& plan,
                             std::span<const Complex> spectrum, GemmMode mode,
                             OpCounter* counter) {
  std::vector<Complex> y = forward(plan, conj(spectrum), mode, counter);
  const PackedLayout& layout = plan.layout;
  for (std::size_t i = 0; i < layout.num_docs(); ++i) {
    const double scale = 1.0 / static_cast<double>(layout.padded_lengths[i]);
    for (std::size_t t = 0; t < layout.padded_lengths[i]; ++t) {
      Complex& v = y[layout.padded_offsets[i] + t];
      v = std::conj(v) * scale;
    }
  }
  return y;
}

std::vector<double> pad_to_layout(const PackedLayout& layout,
                                  const PackedSignal& x) {
  if (x.length != layout.total_valid) {
    throw std::invalid_argument("pad_to_layout: signal length mismatch");
  }
  const std::size_t channels = x.channels;
  std::vector<double> out(layout.total_padded * channels, 0.0);
  for (std::size_t i = 0; i < layout.num_docs(); ++i) {
    std::copy_n(x.values.begin() + static_cast<std::ptrdiff_t>(
                                       layout.valid_offsets[i] * channels),
                layout.doc_lengths[i] * channels,
                out.begin() + static_cast<std::ptrdiff_t>(
                                  layout.padded_offsets[i] * channels));
  }
  return out;
}

std::vector<double> filter_grid_embed(const RubiConvPlan& plan,
                                      const FilterBank& f) {
  const PackedLayout& layout = plan.layout;
  const std::size_t channels = f.channels;
  std::vector<double> out(layout.total_padded * channels, 0.0);
  for (std::size_t i = 0; i < layout.num_docs(); ++i) {
    // Taps at or beyond L_i cannot reach a valid output position, and inside
    // an L_i'-point circular transform they would wrap onto the document's
    // head.
    const std::size_t taps = std::min(f.taps, layout.doc_lengths[i]);
    std::copy_n(f.values.begin(), taps * channels,
                out.begin() + static_cast<std::ptrdiff_t>(
                                  layout.padded_offsets[i] * channels));
  }
  return out;
}

DualSpectra recover_dual_real(const RubiConvPlan& plan,
                              const ComplexMatrix& z_spectrum) {
  const std::size_t batches = batch_count(plan, z_spectrum);
  const PackedLayout& layout = plan.layout;
  const std::size_t k = layout.k;
  const std::size_t cols = layout.total_cols;
  DualSpectra out{ComplexMatrix(k, z_spectrum.cols()),
                  ComplexMatrix(k, z_spectrum.cols())};
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const std::size_t m = static_cast<std::size_t>(r);
    // Frequency f = c*k + m of a block with C columns pairs with L' - f,
    // found at row (-m) mod k and column (-c - [m > 0]) mod C.
    const std::size_t m_rev = (k - m) % k;
    const std::size_t carry = m > 0 ? 1 : 0;
    for (std::size_t b = 0; b < batches; ++b) {
      for (std::size_t i = 0; i < layout.num_docs(); ++i) {
        const std::size_t width = layout.cols_per_doc[i];
        const std::size_t c0 = b * cols + layout.col_offsets[i];
        for (std::size_t c = 0; c < width; ++c) {
          const std::size_t c_rev = (2 * width - c - carry) % width;
          const Complex z = z_spectrum(m, c0 + c);
          const Complex z_rev = std::conj(z_spectrum(m_rev, c0 + c_rev));
          out.batch(m, c0 + c) = 0.5 * (z + z_rev);
          // -(i/2) * (z - z_rev)
          const Complex diff = z - z_rev;
          out.filter(m, c0 + c) = {0.5 * diff.imag(), -0.5 * diff.real()};
        }
      }
    }
  }
  return out;
}

PackedSignal convolve(const RubiConvPlan& plan, const PackedSignal& x,
                      const FilterBank& f, ConvOptions options,
                      OpCounter* counter) {
  check_signal(plan, x, f);
  const std::size_t channels = x.channels;
  const std::vector<double> batch = pad_to_layout(plan.layout, x);
  const std::vector<double> taps = filter_grid_embed(plan, f);

  ComplexMatrix ready;
  if (options.path == ConvPath::kFused) {
    const ComplexMatrix z = to_grid(plan, batch, taps, channels);
    const DualSpectra spectra =
        recover_dual_real(plan, forward_grid(plan, z, options.gemm, counter));
    ready = product_for_inverse(plan, spectra.batch, spectra.filter, counter);
  } else {
    const ComplexMatrix b_spec = forward_grid(
        plan, to_grid(plan, batch, {}, channels), options.gemm, counter);
    const ComplexMatrix f_spec = forward_grid(
        plan, to_grid(plan, taps, {}, channels), options.gemm, counter);
    ready = product_for_inverse(plan, b_spec, f_spec, counter);
  }
  const ComplexMatrix y = forward_grid(plan, ready, options.gemm, counter);
  return finish_inverse(plan, y, channels);
}

std::uint64_t forward_complex_muls(const PackedLayout& layout) {
  std::uint64_t blockwise = 0;
  for (const std::size_t m : layout.cols_per_doc) blockwise += m * m;
  const std::uint64_t k = layout.k;
  const std::uint64_t cols = layout.total_cols;
  return k * k * cols + k * blockwise + k * cols;
}

std::uint64_t convolve_complex_muls(const PackedLayout& layout,
                                    std::size_t channels, ConvPath path) {
  const std::uint64_t passes = path == ConvPath::kFused ? 2 : 3;
  return channels * (passes * forward_complex_muls(layout) +
                     static_cast<std::uint64_t>(layout.total_padded));
}

}  // namespace rubiconv
