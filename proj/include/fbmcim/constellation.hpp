// SPDX-License-Identifier: Apache-2.0
//
// Copyright (C) 2026 The fbmcim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fbmcim/errors.hpp"

namespace fbmcim {

using cplx = std::complex<double>;

// Gray-labelled BPSK or square QAM with unit average power.
//
// A label is the integer formed by the symbol's bits, MSB first. For square
// QAM the upper half of the label selects the in-phase level and the lower
// half the quadrature level, each Gray coded.
class Constellation {
 public:
  explicit Constellation(std::size_t order) : order_(order) {
    if (order < 2 || !std::has_single_bit(order))
      throw parameter_error("constellation order must be a power of two");
    bits_ = static_cast<unsigned>(std::countr_zero(order));
    if (order == 2) {
      levels_ = 2;
      scale_ = 1.0;
    } else if (bits_ % 2 == 0) {
      levels_ = std::size_t{1} << (bits_ / 2);
      scale_ = 1.0 / std::sqrt(2.0 * static_cast<double>(order - 1) / 3.0);
    } else {
      throw parameter_error("only BPSK and square QAM are supported");
    }
    points_.reserve(order);
    for (std::size_t label = 0; label < order; ++label)
      points_.push_back(point_of(static_cast<std::uint32_t>(label)));
  }

  std::size_t order() const { return order_; }
  unsigned bits_per_symbol() const { return bits_; }
  bool is_real() const { return order_ == 2; }

  // Points indexed by label.
  std::span<const cplx> points() const { return points_; }
  cplx point(std::uint32_t label) const { return points_.at(label); }

  // Nearest point (minimum Euclidean distance), returned as a label.
  std::uint32_t slice(cplx x) const {
    if (is_real()) return x.real() >= 0.0 ? 1u : 0u;
    const unsigned half = bits_ / 2;
    return (gray(level_of(x.real())) << half) | gray(level_of(x.imag()));
  }

  std::uint32_t label_from_bits(std::span<const std::uint8_t> bits) const {
    std::uint32_t label = 0;
    for (unsigned b = 0; b < bits_; ++b) label = (label << 1) | (bits[b] & 1u);
    return label;
  }

  void label_to_bits(std::uint32_t label, std::span<std::uint8_t> out) const {
    for (unsigned b = 0; b < bits_; ++b)
      out[b] = static_cast<std::uint8_t>((label >> (bits_ - 1 - b)) & 1u);
  }

 private:
  static std::uint32_t gray(std::uint32_t v) { return v ^ (v >> 1); }
  static std::uint32_t gray_inverse(std::uint32_t g) {
    std::uint32_t v = g;
    for (std::uint32_t shift = 1; shift < 32; shift <<= 1) v ^= v >> shift;
    return v;
  }

  double amplitude(std::uint32_t level) const {
    return scale_ * (2.0 * static_cast<double>(level) -
                     static_cast<double>(levels_ - 1));
  }

  std::uint32_t level_of(double x) const {
    const double idx = std::round((x / scale_ + static_cast<double>(levels_ - 1)) / 2.0);
    return static_cast<std::uint32_t>(
        std::clamp(idx, 0.0, static_cast<double>(levels_ - 1)));
  }

  cplx point_of(std::uint32_t label) const {
    if (is_real()) return {amplitude(label & 1u), 0.0};
    const unsigned half = bits_ / 2;
    const std::uint32_t mask = (1u << half) - 1u;
    return {amplitude(gray_inverse(label >> half)),
            amplitude(gray_inverse(label & mask))};
  }

  std::size_t order_;
  unsigned bits_ = 0;
  std::size_t levels_ = 0;
  double scale_ = 1.0;
  std::vector<cplx> points_;
};

}  // namespace fbmcim
