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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fbmcim/config.hpp"
#include "fbmcim/constellation.hpp"
#include "fbmcim/errors.hpp"
#include "fbmcim/lookup_table.hpp"

namespace fbmcim {

using ActivityMask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// One index-modulated block: column m is FBMC symbol s_m, row n subcarrier n.
struct FbmcFrame {
  Eigen::MatrixXcd symbols;  // N x M
  ActivityMask activity;     // N x M, 1 where the subcarrier is active
  double active_power = 1.0;  // delta^2

  std::size_t n_subcarriers() const { return static_cast<std::size_t>(symbols.rows()); }
  std::size_t n_symbols() const { return static_cast<std::size_t>(symbols.cols()); }
};

// Information bits of one block. Bits are laid out symbol-major, then group
// by group, each group as p1 index bits followed by k constellation labels.
struct BitPayload {
  std::vector<std::uint8_t> bits;
};

// Detector output for one subblock.
struct GroupDecision {
  IndexSet active;            // sorted, 0-based within the group
  std::vector<cplx> symbols;  // equalized values on the active positions
};

inline std::size_t bits_per_group(const ImConfig& cfg) {
  return index_bits(cfg.group_size, cfg.active_per_group) +
         cfg.active_per_group * cfg.bits_per_symbol();
}

inline std::size_t bits_per_frame(const ImConfig& cfg) {
  return bits_per_group(cfg) * cfg.n_groups() * cfg.n_symbols;
}

// Bits / s / Hz of the index-modulated scheme.
inline double spectral_efficiency(const ImConfig& cfg) {
  return static_cast<double>(bits_per_group(cfg)) /
         static_cast<double>(cfg.group_size);
}

// Spectral efficiency relative to plain FBMC/QAM with the same alphabet.
inline double se_gain(const ImConfig& cfg) {
  const double n = static_cast<double>(cfg.group_size);
  const double bps = static_cast<double>(cfg.bits_per_symbol());
  return static_cast<double>(index_bits(cfg.group_size, cfg.active_per_group)) /
             (n * bps) +
         static_cast<double>(cfg.active_per_group) / n;
}

// Maps payload bits to frames and decisions back to bits.
class ImCodec {
 public:
  explicit ImCodec(const ImConfig& cfg)
      : ImCodec(cfg, ImLookupTable(cfg.group_size, cfg.active_per_group)) {}

  ImCodec(const ImConfig& cfg, ImLookupTable table)
      : cfg_(cfg), table_(std::move(table)), constellation_(cfg.mod_order) {
    cfg_.validate();
    if (table_.group_size() != cfg_.group_size ||
        table_.active() != cfg_.active_per_group)
      throw parameter_error("lookup table does not match (n, k)");
    amplitude_ = std::sqrt(cfg_.active_power());
  }

  const ImConfig& config() const { return cfg_; }
  const ImLookupTable& table() const { return table_; }
  const Constellation& constellation() const { return constellation_; }
  double amplitude() const { return amplitude_; }
  std::size_t group_bits() const { return bits_per_group(cfg_); }
  std::size_t frame_bits() const { return bits_per_frame(cfg_); }

  // Writes one subblock of n values for `bits` (group_bits() long).
  void encode_group(std::span<const std::uint8_t> bits, std::span<cplx> out,
                    std::span<std::uint8_t> mask) const {
    const unsigned p1 = table_.p1();
    std::uint64_t pattern = 0;
    for (unsigned b = 0; b < p1; ++b) pattern = (pattern << 1) | (bits[b] & 1u);
    const IndexSet active = table_.entry(pattern);
    std::fill(out.begin(), out.end(), cplx{});
    std::fill(mask.begin(), mask.end(), std::uint8_t{0});
    const unsigned bps = constellation_.bits_per_symbol();
    for (std::size_t j = 0; j < active.size(); ++j) {
      const auto label = constellation_.label_from_bits(bits.subspan(p1 + j * bps, bps));
      out[active[j]] = amplitude_ * constellation_.point(label);
      mask[active[j]] = 1;
    }
  }

  FbmcFrame encode(const BitPayload& payload) const {
    if (payload.bits.size() != frame_bits())
      throw payload_error("payload has " + std::to_string(payload.bits.size()) +
                          " bits, frame needs " + std::to_string(frame_bits()));
    const std::size_t N = cfg_.n_subcarriers, M = cfg_.n_symbols, n = cfg_.group_size;
    FbmcFrame frame;
    frame.symbols = Eigen::MatrixXcd::Zero(N, M);
    frame.activity = ActivityMask::Zero(N, M);
    frame.active_power = cfg_.active_power();
    std::vector<cplx> block(n);
    std::vector<std::uint8_t> mask(n);
    std::span<const std::uint8_t> bits(payload.bits);
    std::size_t pos = 0;
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t g = 0; g < cfg_.n_groups(); ++g) {
        encode_group(bits.subspan(pos, group_bits()), block, mask);
        pos += group_bits();
        for (std::size_t j = 0; j < n; ++j) {
          frame.symbols(g * n + j, m) = block[j];
          frame.activity(g * n + j, m) = mask[j];
        }
      }
    }
    return frame;
  }

  // Appends the group's p1 + p2 bits to `out`.
  void decode_group(const GroupDecision& d, std::vector<std::uint8_t>& out) const {
    if (d.symbols.size() != d.active.size())
      throw dimension_error("one symbol per active index expected");
    const std::uint64_t pattern = table_.index_of(d.active);
    for (unsigned b = table_.p1(); b-- > 0;)
      out.push_back(static_cast<std::uint8_t>((pattern >> b) & 1u));
    std::vector<std::uint8_t> sym(constellation_.bits_per_symbol());
    for (const cplx& v : d.symbols) {
      constellation_.label_to_bits(constellation_.slice(v / amplitude_), sym);
      out.insert(out.end(), sym.begin(), sym.end());
    }
  }

  BitPayload decode(std::span<const GroupDecision> decisions) const {
    if (decisions.size() != cfg_.n_groups() * cfg_.n_symbols)
      throw dimension_error("need one decision per group and symbol");
    BitPayload p;
    p.bits.reserve(frame_bits());
    for (const auto& d : decisions) decode_group(d, p.bits);
    return p;
  }

  // Splits a noiseless frame into its per-group decisions.
  std::vector<GroupDecision> decisions_of(const FbmcFrame& frame) const {
    std::vector<GroupDecision> out;
    const std::size_t n = cfg_.group_size;
    for (std::size_t m = 0; m < cfg_.n_symbols; ++m) {
      for (std::size_t g = 0; g < cfg_.n_groups(); ++g) {
        GroupDecision d;
        for (std::size_t j = 0; j < n; ++j) {
          if (frame.activity(g * n + j, m)) {
            d.active.push_back(static_cast<std::uint8_t>(j));
            d.symbols.push_back(frame.symbols(g * n + j, m));
          }
        }
        out.push_back(std::move(d));
      }
    }
    return out;
  }

 private:
  ImConfig cfg_;
  ImLookupTable table_;
  Constellation constellation_;
  double amplitude_ = 1.0;
};

inline FbmcFrame encode_frame(const BitPayload& payload, const ImConfig& cfg) {
  return ImCodec(cfg).encode(payload);
}

inline BitPayload decode_frame(std::span<const GroupDecision> decisions,
                               const ImConfig& cfg) {
  return ImCodec(cfg).decode(decisions);
}

}  // namespace fbmcim
