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

#ifndef RUBICONV_SIGNAL_HPP_
#define RUBICONV_SIGNAL_HPP_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rubiconv {

// Real packed sequence of `length` positions and `channels` features, stored
// row-major (position-major). Documents are concatenated without padding.
struct PackedSignal {
  std::size_t length = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  PackedSignal() = default;
  PackedSignal(std::size_t length, std::size_t channels)
      : length(length), channels(channels), values(length * channels) {}
  PackedSignal(std::size_t length, std::size_t channels,
               std::vector<double> data)
      : length(length), channels(channels), values(std::move(data)) {
    if (values.size() != length * channels) {
      throw std::invalid_argument("PackedSignal: data length mismatch");
    }
  }

  double& at(std::size_t t, std::size_t d) { return values[t * channels + d]; }
  double at(std::size_t t, std::size_t d) const {
    return values[t * channels + d];
  }

  std::vector<double> channel(std::size_t d) const {
    std::vector<double> out(length);
    for (std::size_t t = 0; t < length; ++t) out[t] = at(t, d);
    return out;
  }
  void set_channel(std::size_t d, std::span<const double> v) {
    for (std::size_t t = 0; t < length; ++t) at(t, d) = v[t];
  }
};

// Depthwise filter taps, L_F x D row-major.
struct FilterBank {
  std::size_t taps = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  FilterBank() = default;
  FilterBank(std::size_t taps, std::size_t channels, std::vector<double> data)
      : taps(taps), channels(channels), values(std::move(data)) {
    if (taps == 0) throw std::invalid_argument("FilterBank: L_F must be >= 1");
    if (values.size() != taps * channels) {
      throw std::invalid_argument("FilterBank: data length mismatch");
    }
  }

  double at(std::size_t tau, std::size_t d) const {
    return values[tau * channels + d];
  }
  std::vector<double> channel(std::size_t d) const {
    std::vector<double> out(taps);
    for (std::size_t t = 0; t < taps; ++t) out[t] = at(t, d);
    return out;
  }
};

}  // namespace rubiconv

#endif  // RUBICONV_SIGNAL_HPP_
