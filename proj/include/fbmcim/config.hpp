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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>

#include "fbmcim/errors.hpp"

namespace fbmcim {

enum class EqualizerMode { kZeroForcing, kMmse };

inline const char* to_string(EqualizerMode mode) {
  return mode == EqualizerMode::kZeroForcing ? "zf" : "mmse";
}

// System geometry shared by every block of the transceiver.
//
// A frame carries n_symbols FBMC symbols of n_subcarriers each. Subcarriers
// are split into contiguous groups of group_size, of which active_per_group
// carry mod_order-ary symbols. active_per_group == group_size is plain
// FBMC/QAM.
struct ImConfig {
  std::size_t n_subcarriers = 64;  // N
  std::size_t n_symbols = 10;      // M
  std::size_t group_size = 4;      // n
  std::size_t active_per_group = 3;  // k
  std::size_t mod_order = 4;       // constellation size
  std::size_t overlap_factor = 4;  // K
  EqualizerMode equalizer = EqualizerMode::kZeroForcing;
  // Power of inactive subcarriers is moved onto the active ones. Switching
  // this off (energy-saving mode) is not supported.
  bool power_reallocation = true;

  std::size_t n_groups() const { return n_subcarriers / group_size; }
  std::size_t bits_per_symbol() const {
    return static_cast<std::size_t>(std::countr_zero(mod_order));
  }
  bool conventional() const { return active_per_group == group_size; }

  // nu of the one-tap equalizer: 0 for ZF, 1 for MMSE.
  double equalizer_nu() const {
    return equalizer == EqualizerMode::kZeroForcing ? 0.0 : 1.0;
  }

  // Fraction of active subcarriers, k/n.
  double activity() const {
    return static_cast<double>(active_per_group) /
           static_cast<double>(group_size);
  }

  // Power of an active symbol, delta^2 = n/k.
  double active_power() const { return 1.0 / activity(); }

  void validate() const {
    if (n_subcarriers == 0 || n_symbols == 0)
      throw parameter_error("N and M must be positive");
    if (group_size == 0 || group_size > 32)
      throw parameter_error("group size n must be in [1, 32]");
    if (active_per_group == 0 || active_per_group > group_size)
      throw parameter_error("active count k must satisfy 1 <= k <= n");
    if (n_subcarriers % group_size != 0)
      throw parameter_error("group size n must divide N");
    if (mod_order < 2 || !std::has_single_bit(mod_order))
      throw parameter_error("modulation order must be a power of two >= 2");
    if (overlap_factor == 0)
      throw parameter_error("overlap factor K must be positive");
    if (!power_reallocation)
      throw parameter_error("energy-saving mode is not implemented");
  }
};

}  // namespace fbmcim
