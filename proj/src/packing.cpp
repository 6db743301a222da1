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

#include "rubiconv/packing.hpp"

#include <algorithm>

namespace rubiconv {

PackedLayout build_layout(std::span<const std::size_t> doc_lengths,
                          std::size_t filter_len, std::size_t k) {
  if (doc_lengths.empty()) {
    throw std::invalid_argument("build_layout: no documents");
  }
  if (filter_len == 0) {
    throw std::invalid_argument("build_layout: filter length must be >= 1");
  }
  if (k == 0) throw std::invalid_argument("build_layout: k must be >= 1");

  PackedLayout layout;
  layout.doc_lengths.assign(doc_lengths.begin(), doc_lengths.end());
  layout.filter_len = filter_len;
  layout.k = k;
  const std::size_t n = doc_lengths.size();
  layout.padded_lengths.reserve(n);
  layout.cols_per_doc.reserve(n);
  layout.col_offsets.reserve(n);
  layout.padded_offsets.reserve(n);
  layout.valid_offsets.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = doc_lengths[i];
    if (len == 0) {
      throw std::invalid_argument("build_layout: document " +
                                  std::to_string(i) + " has length 0");
    }
    const std::size_t causal = len + std::min(len, filter_len) - 1;
    const std::size_t cols = (causal + k - 1) / k;
    layout.padded_lengths.push_back(cols * k);
    layout.cols_per_doc.push_back(cols);
    layout.col_offsets.push_back(layout.total_cols);
    layout.padded_offsets.push_back(layout.total_padded);
    layout.valid_offsets.push_back(layout.total_valid);
    layout.total_cols += cols;
    layout.total_padded += cols * k;
    layout.total_valid += len;
  }
  return layout;
}

IndexMap build_p1(const PackedLayout& layout) {
  IndexMap map;
  map.src_rows = 1;
  map.src_cols = layout.total_padded;
  map.dst_rows = layout.k;
  map.dst_cols = layout.total_cols;
  map.src_row.assign(layout.total_padded, 0);
  map.src_col.resize(layout.total_padded);
  for (std::size_t i = 0; i < layout.num_docs(); ++i) {
    const std::size_t m = layout.cols_per_doc[i];
    for (std::size_t r = 0; r < layout.k; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        const std::size_t dst = r * layout.total_cols + layout.col_offsets[i] + c;
        map.src_col[dst] = layout.padded_offsets[i] + r * m + c;
      }
    }
  }
  return map;
}

IndexMap build_p2(const PackedLayout& layout, P2Extent extent) {
  const bool padded = extent == P2Extent::kPadded;
  IndexMap map;
  map.src_rows = layout.k;
  map.src_cols = layout.total_cols;
  map.dst_rows = 1;
  map.dst_cols = padded ? layout.total_padded : layout.total_valid;
  map.src_row.reserve(map.dst_cols);
  map.src_col.reserve(map.dst_cols);
  for (std::size_t i = 0; i < layout.num_docs(); ++i) {
    const std::size_t keep =
        padded ? layout.padded_lengths[i] : layout.doc_lengths[i];
    for (std::size_t t = 0; t < keep; ++t) {
      map.src_row.push_back(t % layout.k);
      map.src_col.push_back(layout.col_offsets[i] + t / layout.k);
    }
  }
  return map;
}

IndexMap build_pre_ifft_map(const PackedLayout& layout) {
  IndexMap map;
  map.src_rows = map.dst_rows = layout.k;
  map.src_cols = map.dst_cols = layout.total_cols;
  map.src_row.resize(layout.k * layout.total_cols);
  map.src_col.resize(layout.k * layout.total_cols);
  for (std::size_t i = 0; i < layout.num_docs(); ++i) {
    const std::size_t m = layout.cols_per_doc[i];
    const std::size_t c0 = layout.col_offsets[i];
    // Destination (u', v') holds frequency f = u' * m + v', which the forward
    // pass left at (f mod k, f / k).
    for (std::size_t u_dst = 0; u_dst < layout.k; ++u_dst) {
      for (std::size_t v_dst = 0; v_dst < m; ++v_dst) {
        const std::size_t f = u_dst * m + v_dst;
        const std::size_t j = u_dst * layout.total_cols + c0 + v_dst;
        map.src_row[j] = f % layout.k;
        map.src_col[j] = c0 + f / layout.k;
      }
    }
  }
  return map;
}

std::vector<std::size_t> segment_ids(const PackedLayout& layout) {
  std::vector<std::size_t> ids;
  ids.reserve(layout.total_padded);
  for (std::size_t i = 0; i < layout.num_docs(); ++i) {
    ids.insert(ids.end(), layout.padded_lengths[i], i);
  }
  return ids;
}

std::vector<std::size_t> column_documents(const PackedLayout& layout) {
  std::vector<std::size_t> docs;
  docs.reserve(layout.total_cols);
  for (std::size_t i = 0; i < layout.num_docs(); ++i) {
    docs.insert(docs.end(), layout.cols_per_doc[i], i);
  }
  return docs;
}

IndexMap invert(const IndexMap& map) {
  const std::size_t n = map.size();
  if (n != map.src_rows * map.src_cols || n != map.dst_rows * map.dst_cols) {
    throw std::invalid_argument("invert: map is not size-preserving");
  }
  IndexMap inv;
  inv.src_rows = map.dst_rows;
  inv.src_cols = map.dst_cols;
  inv.dst_rows = map.src_rows;
  inv.dst_cols = map.src_cols;
  inv.src_row.assign(n, 0);
  inv.src_col.assign(n, 0);
  std::vector<bool> seen(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t s = map.source_index(j);
    if (s >= n || seen[s]) {
      throw std::invalid_argument("invert: map is not a bijection");
    }
    seen[s] = true;
    inv.src_row[s] = j / map.dst_cols;
    inv.src_col[s] = j % map.dst_cols;
  }
  return inv;
}

}  // namespace rubiconv
