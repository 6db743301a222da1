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

#ifndef RUBICONV_PACKING_HPP_
#define RUBICONV_PACKING_HPP_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rubiconv {

inline constexpr std::size_t kDefaultK = 256;

// Geometry of one packed batch laid out on a k-row grid.
//
// Document i is extended by min(L_i, L_F) - 1 causal zeros and rounded up to
// a multiple of k, giving L_i' = k * ceil((L_i + min(L_i, L_F) - 1) / k) and
// m_i = L_i' / k grid columns. Documents occupy disjoint column ranges
// [col_offsets[i], col_offsets[i] + m_i), so no grid column ever holds
// positions from two documents.
struct PackedLayout {
  std::vector<std::size_t> doc_lengths;     // L_i
  std::size_t filter_len = 0;               // L_F
  std::size_t k = 0;                        // grid rows
  std::vector<std::size_t> padded_lengths;  // L_i'
  std::vector<std::size_t> cols_per_doc;    // m_i
  std::vector<std::size_t> col_offsets;     // first grid column of doc i
  std::vector<std::size_t> padded_offsets;  // start of doc i in the padded 1D sequence
  std::vector<std::size_t> valid_offsets;   // start of doc i in the unpadded sequence
  std::size_t total_cols = 0;               // m_total
  std::size_t total_padded = 0;             // sum of L_i'
  std::size_t total_valid = 0;              // sum of L_i

  std::size_t num_docs() const { return doc_lengths.size(); }

  friend bool operator==(const PackedLayout&, const PackedLayout&) = default;
};

// Throws std::invalid_argument for an empty document list, any zero-length
// document, L_F == 0 or k == 0.
PackedLayout build_layout(std::span<const std::size_t> doc_lengths,
                          std::size_t filter_len, std::size_t k = kDefaultK);

// Gather map between two row-major 2D buffers. Destination entry j (flat,
// row-major over dst_rows x dst_cols) is read from source coordinate
// (src_row[j], src_col[j]). A 1D sequence is a 1 x N buffer.
struct IndexMap {
  std::size_t src_rows = 0;
  std::size_t src_cols = 0;
  std::size_t dst_rows = 0;
  std::size_t dst_cols = 0;
  std::vector<std::size_t> src_row;
  std::vector<std::size_t> src_col;

  std::size_t size() const { return src_row.size(); }
  std::size_t source_index(std::size_t j) const {
    return src_row[j] * src_cols + src_col[j];
  }

  friend bool operator==(const IndexMap&, const IndexMap&) = default;
};

// Padded packed sequence (1 x total_padded) -> k x total_cols grid, where
// grid(r, col_offsets[i] + c) = x_i[r * m_i + c].
IndexMap build_p1(const PackedLayout& layout);

enum class P2Extent {
  kDocument,  // keep the first L_i positions of each document
  kPadded,    // keep all L_i' positions
};

// k x total_cols grid -> 1D output: each document block flattened in
// column-major order, truncated per `extent`, concatenated in packing order.
IndexMap build_p2(const PackedLayout& layout,
                  P2Extent extent = P2Extent::kDocument);

// Grid -> grid. Within each document block the forward transform leaves
// frequency f = v*k + u at (u, v) (column-major); this map moves it to the
// row-major position (f / m_i, f % m_i) expected by the next forward pass.
IndexMap build_pre_ifft_map(const PackedLayout& layout);

// Document index of every position of the padded sequence.
std::vector<std::size_t> segment_ids(const PackedLayout& layout);

// Document index of every grid column.
std::vector<std::size_t> column_documents(const PackedLayout& layout);

// Inverse of a bijective map. Throws std::invalid_argument if `map` is not a
// bijection between equally sized buffers.
IndexMap invert(const IndexMap& map);

template <typename T>
void gather_into(const IndexMap& map, std::span<const T> src,
                 std::span<T> dst) {
  if (src.size() != map.src_rows * map.src_cols ||
      dst.size() != map.dst_rows * map.dst_cols ||
      dst.size() != map.size()) {
    throw std::invalid_argument("gather: buffer sizes do not match the map");
  }
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = src[map.source_index(j)];
}

template <typename T>
std::vector<T> gather(const IndexMap& map, std::span<const T> src) {
  std::vector<T> dst(map.dst_rows * map.dst_cols);
  gather_into<T>(map, src, dst);
  return dst;
}

}  // namespace rubiconv

#endif  // RUBICONV_PACKING_HPP_
