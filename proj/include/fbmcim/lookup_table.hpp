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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fbmcim/errors.hpp"

namespace fbmcim {

using IndexSet = std::vector<std::uint8_t>;  // sorted, 0-based subcarrier offsets

inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// floor(log2 C(n, k)): number of bits carried by the active-index pattern.
inline unsigned index_bits(std::size_t n, std::size_t k) {
  return static_cast<unsigned>(std::bit_width(binomial(n, k)) - 1);
}

// Bijection between p1-bit patterns and k-subsets of a group of n
// subcarriers. Entry i is the i-th k-subset in lexicographic order, so the
// table is never materialized; ranking uses the combinatorial number system.
class ImLookupTable {
 public:
  ImLookupTable(std::size_t n, std::size_t k) : n_(n), k_(k) {
    if (k < 1 || k > n || n > 32)
      throw parameter_error("lookup table needs 1 <= k <= n <= 32");
    p1_ = index_bits(n, k);
  }

  // Test hook: a table with explicit entries and no consistency checks
  // beyond shape. Used to inject faults into the codec self-test.
  static ImLookupTable unchecked(std::size_t n, std::size_t k,
                                 std::vector<IndexSet> entries) {
    ImLookupTable t(n, k);
    if (entries.size() != t.size())
      throw parameter_error("explicit table must have 2^p1 entries");
    t.explicit_ = std::move(entries);
    return t;
  }

  std::size_t group_size() const { return n_; }
  std::size_t active() const { return k_; }
  unsigned p1() const { return p1_; }
  std::uint64_t size() const { return std::uint64_t{1} << p1_; }

  IndexSet entry(std::uint64_t index) const {
    if (index >= size()) throw lookup_error("lookup table index out of range");
    if (!explicit_.empty()) return explicit_[index];
    IndexSet set;
    set.reserve(k_);
    std::size_t next = 0;
    std::uint64_t rem = index;
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t c = next;; ++c) {
        const std::uint64_t block = binomial(n_ - 1 - c, k_ - 1 - i);
        if (rem < block) {
          set.push_back(static_cast<std::uint8_t>(c));
          next = c + 1;
          break;
        }
        rem -= block;
      }
    }
    return set;
  }

  // Lexicographic rank among all C(n, k) subsets; no table-membership check.
  std::uint64_t rank(std::span<const std::uint8_t> set) const {
    check_shape(set);
    std::uint64_t r = 0;
    std::size_t prev = 0;
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t c = prev; c < set[i]; ++c)
        r += binomial(n_ - 1 - c, k_ - 1 - i);
      prev = set[i] + 1u;
    }
    return r;
  }

  std::optional<std::uint64_t> find(std::span<const std::uint8_t> set) const {
    if (!explicit_.empty()) {
      for (std::uint64_t i = 0; i < explicit_.size(); ++i)
        if (std::equal(set.begin(), set.end(), explicit_[i].begin(),
                       explicit_[i].end()))
          return i;
      return std::nullopt;
    }
    const std::uint64_t r = rank(set);
    if (r >= size()) return std::nullopt;
    return r;
  }

  std::uint64_t index_of(std::span<const std::uint8_t> set) const {
    if (auto i = find(set)) return *i;
    throw lookup_error("index set is not in the lookup table");
  }

  // Legal entry with the smallest symmetric difference to `set`; ties go to
  // the lowest table index.
  std::uint64_t nearest(std::span<const std::uint8_t> set) const {
    std::uint32_t want = 0;
    for (auto c : set) want |= 1u << c;
    std::uint64_t best = 0;
    int best_d = 1 << 30;
    for (std::uint64_t i = 0; i < size(); ++i) {
      std::uint32_t have = 0;
      for (auto c : entry(i)) have |= 1u << c;
      const int d = std::popcount(want ^ have);
      if (d < best_d) {
        best_d = d;
        best = i;
        if (d == 0) break;
      }
    }
    return best;
  }

  std::vector<IndexSet> entries() const {
    std::vector<IndexSet> out;
    out.reserve(size());
    for (std::uint64_t i = 0; i < size(); ++i) out.push_back(entry(i));
    return out;
  }

 private:
  void check_shape(std::span<const std::uint8_t> set) const {
    if (set.size() != k_) throw lookup_error("index set must have k entries");
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (set[i] >= n_ || (i > 0 && set[i] <= set[i - 1]))
        throw lookup_error("index set must be sorted and inside the group");
    }
  }

  std::size_t n_;
  std::size_t k_;
  unsigned p1_ = 0;
  std::vector<IndexSet> explicit_;
};

inline ImLookupTable build_lookup_table(std::size_t n, std::size_t k) {
  return ImLookupTable(n, k);
}

}  // namespace fbmcim
