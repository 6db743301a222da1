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

#include <cmath>

#include "doctest.h"
#include "rubiconv/direct.hpp"
#include "rubiconv/rubiconv.hpp"
#include "test_util.hpp"

using namespace rubiconv;
using rubiconv::testing::rel_err;

namespace {

using Sizes = std::vector<std::size_t>;

// Padded random input with zero tails.
std::vector<Complex> random_padded(const PackedLayout& l, std::mt19937_64& rng) {
  std::vector<Complex> x(l.total_padded);
  for (std::size_t i = 0; i < l.num_docs(); ++i) {
    const auto doc = testing::random_complex(l.doc_lengths[i], rng);
    std::copy(doc.begin(), doc.end(), x.begin() + l.padded_offsets[i]);
  }
  return x;
}

std::span<const Complex> doc_span(const PackedLayout& l,
                                  std::span<const Complex> v, std::size_t i) {
  return v.subspan(l.padded_offsets[i], l.padded_lengths[i]);
}

double worst_doc_error(const RubiConvPlan& plan, std::span<const Complex> x,
                       std::span<const Complex> y) {
  double worst = 0.0;
  for (std::size_t i = 0; i < plan.layout.num_docs(); ++i) {
    const auto expect = naive_dft(doc_span(plan.layout, x, i));
    worst = std::max(worst, rel_err(doc_span(plan.layout, y, i), expect));
  }
  return worst;
}

PackedSignal oracle(const RubiConvPlan& plan, const PackedSignal& x,
                    const FilterBank& f) {
  return oracle_convolve(plan.layout.doc_lengths, x, f);
}

// Spectrum of a real packed channel set laid out as the grid convolve uses:
// channel d occupies grid columns [d * m_total, (d + 1) * m_total).
ComplexMatrix real_spectrum(const RubiConvPlan& plan,
                            std::span<const double> padded, std::size_t channels) {
  const PackedLayout& l = plan.layout;
  ComplexMatrix grid(l.k, l.total_cols * channels);
  for (std::size_t j = 0; j < l.k * l.total_cols; ++j) {
    const std::size_t src = plan.p1.source_index(j);
    const std::size_t r = j / l.total_cols;
    const std::size_t c = j % l.total_cols;
    for (std::size_t d = 0; d < channels; ++d) {
      grid(r, d * l.total_cols + c) = padded[src * channels + d];
    }
  }
  return forward_grid(plan, grid, GemmMode::kStandard);
}

}  // namespace

TEST_CASE("build_plan examples") {
  const RubiConvPlan plan = build_plan(Sizes{4, 8}, 64, 4);
  CHECK(plan.twiddle.rows() == 4);
  CHECK(plan.twiddle.cols() == 6);
  REQUIRE(plan.m2_blocks.size() == 2);
  CHECK(plan.m2_blocks[0] == dft_matrix(2));
  CHECK(plan.m2_blocks[1] == dft_matrix(4));
  CHECK(plan.m1 == dft_matrix(4));
  CHECK(plan.inv_scale == std::vector<double>{1.0 / 8, 1.0 / 8, 1.0 / 16,
                                              1.0 / 16, 1.0 / 16, 1.0 / 16});
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      CHECK(plan.twiddle(a, 2 + b) == root_of_unity(16, a * b));
    }
  }

  const RubiConvPlan single = build_plan(Sizes{8}, 1, 8);
  REQUIRE(single.m2_blocks.size() == 1);
  CHECK(single.m2_blocks[0] == ComplexMatrix(1, 1, {1.0}));
  for (std::size_t a = 0; a < 8; ++a) {
    CHECK(single.twiddle(a, 0) == dft_matrix(8)(a, 0));
  }
}

TEST_CASE("build_plan is deterministic") {
  const Sizes docs{17, 3, 250, 64};
  CHECK(build_plan(docs, 32, 16) == build_plan(docs, 32, 16));
  CHECK_THROWS_AS(build_plan(Sizes{3, 0}, 2, 4), std::invalid_argument);
}

TEST_CASE("forward on a single one-column document is F_k x") {
  std::mt19937_64 rng(4);
  const RubiConvPlan plan = build_plan(Sizes{8}, 1, 8);
  const auto x = testing::random_complex(8, rng);
  const auto y = forward(plan, x);
  ComplexMatrix col(8, 1, x);
  CHECK(rel_err(y, gemm(dft_matrix(8), col).data()) <= 1e-14);
}

TEST_CASE("forward matches the per-document DFT") {
  std::mt19937_64 rng(12);
  const RubiConvPlan plan = build_plan(Sizes{5, 9, 2}, 4, 4);
  const auto x = random_padded(plan.layout, rng);
  CHECK(worst_doc_error(plan, x, forward(plan, x)) <= 1e-10);
  CHECK(worst_doc_error(plan, x, forward(plan, x, GemmMode::kStandard)) <= 1e-10);
  CHECK_THROWS_AS(forward(plan, std::vector<Complex>(x.size() + 1)),
                  std::invalid_argument);
}

TEST_CASE("forward matches the per-document DFT on random packings") {
  std::mt19937_64 rng(77);
  const std::size_t ks[] = {1, 4, 16, 256};
  for (int trial = 0; trial < 40; ++trial) {
    const Sizes docs = testing::random_lengths(1, 32, 512, rng);
    const std::size_t k = ks[trial % 4];
    const std::size_t taps = std::uniform_int_distribution<std::size_t>(1, 512)(rng);
    const RubiConvPlan plan = build_plan(docs, taps, k);
    const auto x = random_padded(plan.layout, rng);
    CHECK(worst_doc_error(plan, x, forward(plan, x)) <= 1e-10);
  }
}

TEST_CASE("forward keeps documents isolated bit for bit") {
  std::mt19937_64 rng(8);
  const RubiConvPlan plan = build_plan(Sizes{40, 33, 71}, 16, 8);
  const PackedLayout& l = plan.layout;
  auto x = random_padded(l, rng);
  const auto before = forward(plan, x);
  for (std::size_t t = 0; t < l.doc_lengths[1]; ++t) {
    x[l.padded_offsets[1] + t] += Complex(3.0, -1.0);
  }
  const auto after = forward(plan, x);
  for (const std::size_t i : {0, 2}) {
    CHECK(testing::same_values(doc_span(l, before, i), doc_span(l, after, i)));
  }
  CHECK_FALSE(testing::same_values(doc_span(l, before, 1), doc_span(l, after, 1)));
}

TEST_CASE("forward counts the closed-form number of multiplications") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Sizes docs = testing::random_lengths(1, 12, 300, rng);
    const RubiConvPlan plan = build_plan(docs, 64, 16);
    const PackedLayout& l = plan.layout;
    std::uint64_t blocks = 0;
    for (const std::size_t m : l.cols_per_doc) blocks += m * m;
    const std::uint64_t expect =
        l.k * l.k * l.total_cols + l.k * blocks + l.k * l.total_cols;
    CHECK(forward_complex_muls(l) == expect);

    OpCounter counter;
    forward(plan, random_padded(l, rng), GemmMode::kKaratsuba, &counter);
    CHECK(counter.complex_muls == expect);
    // GEMM products use 3 real multiplications; twiddles use 4.
    CHECK(counter.real_muls ==
          3 * (expect - l.k * l.total_cols) + 4 * l.k * l.total_cols);

    OpCounter conv;
    const std::size_t channels = 3;
    convolve(plan, testing::random_signal(l.total_valid, channels, rng),
             testing::random_filter(64, channels, rng), {}, &conv);
    CHECK(conv.complex_muls == convolve_complex_muls(l, channels));
    OpCounter unfused;
    convolve(plan, testing::random_signal(l.total_valid, channels, rng),
             testing::random_filter(64, channels, rng),
             {ConvPath::kUnfused, GemmMode::kKaratsuba}, &unfused);
    CHECK(unfused.complex_muls ==
          convolve_complex_muls(l, channels, ConvPath::kUnfused));
  }
}

TEST_CASE("inverse undoes forward") {
  std::mt19937_64 rng(91);
  const RubiConvPlan plan = build_plan(Sizes{13, 1, 100, 7}, 9, 8);
  const auto x = random_padded(plan.layout, rng);
  CHECK(rel_err(inverse(plan, forward(plan, x)), x) <= 1e-12);
}

TEST_CASE("convolve hand example") {
  const RubiConvPlan plan = build_plan(Sizes{3}, 2, 4);
  const PackedSignal x(3, 1, {1.0, 2.0, 3.0});
  const FilterBank f(2, 1, {1.0, 1.0});
  const PackedSignal y = convolve(plan, x, f);
  const std::vector<double> expect{1.0, 3.0, 5.0};
  CHECK(rel_err(y.values, expect) <= 1e-12);
}

TEST_CASE("convolve with a delta filter returns the input") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const Sizes docs = testing::random_lengths(1, 10, 150, rng);
    const RubiConvPlan plan = build_plan(docs, 1, 16);
    const PackedSignal x = testing::random_signal(plan.layout.total_valid, 2, rng);
    const FilterBank delta(1, 2, {1.0, 1.0});
    const PackedSignal y = convolve(plan, x, delta);
    double worst = 0.0;
    for (std::size_t j = 0; j < y.values.size(); ++j) {
      worst = std::max(worst, std::abs(y.values[j] - x.values[j]));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("convolve matches the direct oracle") {
  std::mt19937_64 rng(2718);
  Sizes docs(8);
  std::uniform_int_distribution<std::size_t> len(1, 200);
  for (std::size_t& d : docs) d = len(rng);
  docs[0] = 1;
  docs[1] = 200;
  const RubiConvPlan plan = build_plan(docs, 64, 16);
  const PackedSignal x = testing::random_signal(plan.layout.total_valid, 4, rng);
  const FilterBank f = testing::random_filter(64, 4, rng);
  const PackedSignal expect = oracle(plan, x, f);
  CHECK(rel_err(convolve(plan, x, f).values, expect.values) <= 1e-8);
  CHECK(rel_err(convolve(plan, x, f, {ConvPath::kUnfused, GemmMode::kStandard})
                    .values,
                expect.values) <= 1e-8);
}

TEST_CASE("convolve matches the oracle on random packings") {
  std::mt19937_64 rng(4242);
  const std::size_t ks[] = {1, 4, 16, 256};
  for (int trial = 0; trial < 24; ++trial) {
    const Sizes docs = testing::random_lengths(1, 32, 512, rng);
    const std::size_t taps = std::uniform_int_distribution<std::size_t>(1, 600)(rng);
    const RubiConvPlan plan = build_plan(docs, taps, ks[trial % 4]);
    const PackedSignal x = testing::random_signal(plan.layout.total_valid, 2, rng);
    const FilterBank f = testing::random_filter(taps, 2, rng);
    CHECK(rel_err(convolve(plan, x, f).values, oracle(plan, x, f).values) <= 1e-8);
  }
}

TEST_CASE("convolve rejects inconsistent shapes") {
  std::mt19937_64 rng(1);
  const RubiConvPlan plan = build_plan(Sizes{5, 6}, 3, 4);
  const PackedSignal x = testing::random_signal(11, 2, rng);
  CHECK_THROWS_AS(convolve(plan, x, testing::random_filter(3, 3, rng)),
                  std::invalid_argument);
  CHECK_THROWS_AS(convolve(plan, testing::random_signal(12, 2, rng),
                           testing::random_filter(3, 2, rng)),
                  std::invalid_argument);
  CHECK_THROWS_AS(convolve(plan, x, testing::random_filter(4, 2, rng)),
                  std::invalid_argument);
}

TEST_CASE("filter_grid_embed pads each document's copy of the taps") {
  // L = 2, L_F = 2, k = 4: L' = 4, segment [f0, f1, 0, 0].
  const FilterBank two(2, 1, {5.0, 6.0});
  CHECK(filter_grid_embed(build_plan(Sizes{2}, 2, 4), two) ==
        std::vector<double>{5.0, 6.0, 0.0, 0.0});

  // L = 3, L_F = 8, k = 4: L' = 8; only the first 3 taps can reach an output.
  const FilterBank eight(8, 1, {1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(filter_grid_embed(build_plan(Sizes{3}, 8, 4), eight) ==
        std::vector<double>{1, 2, 3, 0, 0, 0, 0, 0});

  // Two documents with different L' get independent copies.
  const RubiConvPlan plan = build_plan(Sizes{2, 9}, 2, 4);  // L' = [4, 12]
  const auto both = filter_grid_embed(plan, two);
  CHECK(both.size() == 16);
  CHECK(both == std::vector<double>{5, 6, 0, 0, 5, 6, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
}

TEST_CASE("dual-real recovery matches separate transforms") {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 10; ++trial) {
    const Sizes docs = testing::random_lengths(1, 16, 300, rng);
    const std::size_t k = trial % 2 == 0 ? 4 : 16;
    const RubiConvPlan plan = build_plan(docs, 32, k);
    const PackedLayout& l = plan.layout;
    const std::size_t channels = 3;
    const auto b = testing::random_real(l.total_padded * channels, rng);
    const auto f = testing::random_real(l.total_padded * channels, rng);

    ComplexMatrix z(l.k, l.total_cols * channels);
    const ComplexMatrix sb = real_spectrum(plan, b, channels);
    const ComplexMatrix sf = real_spectrum(plan, f, channels);
    for (std::size_t j = 0; j < z.size(); ++j) {
      z.data()[j] = sb.data()[j] + Complex(0.0, 1.0) * sf.data()[j];
    }
    const DualSpectra split = recover_dual_real(plan, z);
    CHECK(rel_err(split.batch, sb) <= 1e-10);
    CHECK(rel_err(split.filter, sf) <= 1e-10);
  }
}

TEST_CASE("fused and unfused paths agree") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 8; ++trial) {
    const Sizes docs = testing::random_lengths(1, 20, 400, rng);
    const RubiConvPlan plan = build_plan(docs, 100, 16);
    const PackedSignal x = testing::random_signal(plan.layout.total_valid, 3, rng);
    const FilterBank f = testing::random_filter(100, 3, rng);
    const auto fused = convolve(plan, x, f).values;
    const auto unfused =
        convolve(plan, x, f, {ConvPath::kUnfused, GemmMode::kKaratsuba}).values;
    const auto standard =
        convolve(plan, x, f, {ConvPath::kFused, GemmMode::kStandard}).values;
    CHECK(rel_err(fused, unfused) <= 1e-10);
    CHECK(rel_err(fused, standard) <= 1e-10);
  }
}

TEST_CASE("convolution is causal within each document") {
  std::mt19937_64 rng(33);
  const Sizes docs{50, 80, 20};
  const RubiConvPlan plan = build_plan(docs, 30, 8);
  const PackedLayout& l = plan.layout;
  const FilterBank f = testing::random_filter(30, 2, rng);
  PackedSignal x = testing::random_signal(l.total_valid, 2, rng);
  const PackedSignal before = convolve(plan, x, f);
  const std::size_t cut = l.valid_offsets[1] + 40;
  for (std::size_t t = cut; t < l.valid_offsets[2]; ++t) {
    x.at(t, 0) += 10.0;
    x.at(t, 1) -= 7.0;
  }
  const PackedSignal after = convolve(plan, x, f);
  const double scale = *std::max_element(before.values.begin(), before.values.end());
  for (std::size_t t = 0; t < cut; ++t) {
    for (std::size_t d = 0; d < 2; ++d) {
      CHECK(std::abs(after.at(t, d) - before.at(t, d)) <= 1e-12 * scale);
    }
  }
  CHECK(std::abs(after.at(cut, 0) - before.at(cut, 0)) > 1.0);
}

TEST_CASE("perturbing one document leaves the others bit-identical") {
  std::mt19937_64 rng(44);
  const Sizes docs{31, 64, 5, 120};
  const RubiConvPlan plan = build_plan(docs, 16, 16);
  const PackedLayout& l = plan.layout;
  const FilterBank f = testing::random_filter(16, 3, rng);
  PackedSignal x = testing::random_signal(l.total_valid, 3, rng);
  const PackedSignal before = convolve(plan, x, f);
  for (std::size_t t = 0; t < docs[2]; ++t) x.at(l.valid_offsets[2] + t, 1) += 2.5;
  const PackedSignal after = convolve(plan, x, f);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::size_t from = l.valid_offsets[i] * 3;
    const std::size_t to = from + docs[i] * 3;
    const bool same = std::equal(before.values.begin() + from,
                                 before.values.begin() + to,
                                 after.values.begin() + from);
    CHECK(same == (i != 2));
  }
}

TEST_CASE("results do not depend on the thread count") {
  std::mt19937_64 rng(2);
  const Sizes docs = testing::random_lengths(20, 30, 900, rng);
  const RubiConvPlan plan = build_plan(docs, 64, 32);
  const PackedSignal x = testing::random_signal(plan.layout.total_valid, 4, rng);
  const FilterBank f = testing::random_filter(64, 4, rng);
  PackedSignal one;
  {
    testing::ThreadCount t(1);
    one = convolve(plan, x, f);
  }
  testing::ThreadCount t(4);
  CHECK(convolve(plan, x, f).values == one.values);
}

TEST_CASE("plan construction stays within the preprocessing budget") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = std::size_t{1} << (trial % 9);
    const Sizes docs = testing::random_lengths(1, 64, std::min<std::size_t>(2000, 64 * k), rng);
    const RubiConvPlan plan = build_plan(docs, 2000, k);
    const double l = static_cast<double>(testing::total(docs));
    const double n = static_cast<double>(docs.size());
    const double kk = static_cast<double>(k);
    const double budget = l + kk * n + (l / kk) * (l / kk) + n * n + l * n / kk;
    CHECK(static_cast<double>(plan.construction_entries) <= 16.0 * budget);
  }
}
