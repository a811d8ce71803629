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
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fbmcim/im_codec.hpp"

namespace fbmcim {

enum class Detector { kMl, kLlr };

inline const char* to_string(Detector d) { return d == Detector::kMl ? "ml" : "llr"; }

// Operation counts, for checking the complexity of each detector.
struct DetectorCounters {
  std::uint64_t distance_evals = 0;  // candidate distances (ML)
  std::uint64_t exp_evals = 0;       // exponentials (LLR)
};

struct SubblockEstimate {
  IndexSet active;
  std::vector<std::uint32_t> labels;  // constellation label per active index
  std::vector<std::uint8_t> bits;     // p1 index bits, then p2 symbol bits
  bool remapped = false;              // top-k set was not a table entry
};

// All legal subblocks: 2^p1 index patterns times M^k symbol choices.
// Candidate c = pattern * M^k + (labels read as base-M digits, first active
// index most significant).
class CandidateSet {
 public:
  explicit CandidateSet(const ImCodec& codec)
      : group_bits_(codec.group_bits()), table_(codec.table()) {
    const auto& table = codec.table();
    const auto& cons = codec.constellation();
    const std::size_t n = table.group_size(), k = table.active(), order = cons.order();
    std::size_t per_pattern = 1;
    for (std::size_t j = 0; j < k; ++j) per_pattern *= order;
    const std::size_t count = static_cast<std::size_t>(table.size()) * per_pattern;
    points_ = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));
    bits_.reserve(count * group_bits_);
    std::vector<std::uint8_t> group(group_bits_);
    for (std::uint64_t pattern = 0; pattern < table.size(); ++pattern) {
      const IndexSet active = table.entry(pattern);
      for (std::size_t s = 0; s < per_pattern; ++s) {
        const std::size_t c = pattern * per_pattern + s;
        std::size_t digits = s;
        std::size_t pos = table.p1() + k * cons.bits_per_symbol();
        for (unsigned b = 0; b < table.p1(); ++b)
          group[b] = static_cast<std::uint8_t>((pattern >> (table.p1() - 1 - b)) & 1u);
        for (std::size_t j = k; j-- > 0;) {
          const auto label = static_cast<std::uint32_t>(digits % order);
          digits /= order;
          points_(active[j], static_cast<Eigen::Index>(c)) = codec.amplitude() * cons.point(label);
          pos -= cons.bits_per_symbol();
          cons.label_to_bits(label, std::span(group).subspan(pos, cons.bits_per_symbol()));
        }
        bits_.insert(bits_.end(), group.begin(), group.end());
      }
    }
    per_pattern_ = per_pattern;
    order_ = order;
    k_ = k;
  }

  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  std::size_t group_size() const { return static_cast<std::size_t>(points_.rows()); }
  auto candidate(std::size_t c) const { return points_.col(static_cast<Eigen::Index>(c)); }
  std::span<const std::uint8_t> bits(std::size_t c) const {
    return std::span(bits_).subspan(c * group_bits_, group_bits_);
  }

  SubblockEstimate estimate(std::size_t c) const {
    SubblockEstimate e;
    e.active = table_.entry(c / per_pattern_);
    std::size_t digits = c % per_pattern_;
    e.labels.assign(k_, 0);
    for (std::size_t j = k_; j-- > 0;) {
      e.labels[j] = static_cast<std::uint32_t>(digits % order_);
      digits /= order_;
    }
    auto b = bits(c);
    e.bits.assign(b.begin(), b.end());
    return e;
  }

 private:
  Eigen::MatrixXcd points_;
  std::vector<std::uint8_t> bits_;
  std::size_t group_bits_;
  ImLookupTable table_;
  std::size_t per_pattern_ = 1, order_ = 2, k_ = 1;
};

// Index of the candidate closest to B; the lowest index wins ties. With
// `weights` the distance is sum_j w_j |B_j - A_j|^2, the Gaussian ML metric
// when subcarrier j has error variance 1 / w_j.
inline std::size_t ml_search(std::span<const cplx> B, const CandidateSet& gamma,
                             std::span<const double> weights, DetectorCounters* counters = nullptr) {
  if (B.size() != gamma.group_size()) throw dimension_error("subblock length must equal n");
  if (!weights.empty() && weights.size() != B.size()) throw dimension_error("one weight per subcarrier expected");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < gamma.size(); ++c) {
    const auto A = gamma.candidate(c);
    double d = 0.0;
    for (std::size_t j = 0; j < B.size(); ++j) {
      const double e = std::norm(B[j] - A(static_cast<Eigen::Index>(j)));
      d += weights.empty() ? e : weights[j] * e;
    }
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (counters) counters->distance_evals += gamma.size();
  return best;
}

inline std::size_t ml_search(std::span<const cplx> B, const CandidateSet& gamma,
                             DetectorCounters* counters = nullptr) {
  return ml_search(B, gamma, {}, counters);
}

inline SubblockEstimate ml_detect(std::span<const cplx> B, const CandidateSet& gamma,
                                  DetectorCounters* counters = nullptr) {
  return gamma.estimate(ml_search(B, gamma, counters));
}

// ML under per-subcarrier error variances gamma_tot.
inline SubblockEstimate ml_detect(std::span<const cplx> B, std::span<const double> gamma_tot,
                                  const CandidateSet& gamma, DetectorCounters* counters = nullptr) {
  if (gamma_tot.size() != B.size()) throw dimension_error("one interference variance per subcarrier expected");
  std::vector<double> w(gamma_tot.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = 1.0 / gamma_tot[j];
  return gamma.estimate(ml_search(B, gamma, w, counters));
}

// Activity log-likelihood ratio of each subcarrier of a subblock:
//   log k - log(n-k) + |s|^2/g + log sum_chi exp(-|s - a_chi|^2 / g)
// with the sum taken by max-subtracted log-sum-exp. `points` are the scaled
// constellation points carried by an active subcarrier.
inline std::vector<double> llr_values(std::span<const cplx> s_hat, std::span<const double> gamma_tot,
                                      std::span<const cplx> points, std::size_t k,
                                      DetectorCounters* counters = nullptr) {
  const std::size_t n = s_hat.size();
  if (gamma_tot.size() != n) throw dimension_error("one interference variance per subcarrier expected");
  if (k == 0 || k >= n) throw detector_error("LLR activity detection needs 0 < k < n");
  const double prior = std::log(static_cast<double>(k)) - std::log(static_cast<double>(n - k));
  std::vector<double> lambda(n);
  std::vector<double> expo(points.size());
  for (std::size_t j = 0; j < n; ++j) {
    const double g = gamma_tot[j];
    if (!(g > 0.0)) throw detector_error("interference variance must be positive");
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < points.size(); ++c) {
      expo[c] = -std::norm(s_hat[j] - points[c]) / g;
      top = std::max(top, expo[c]);
    }
    double acc = 0.0;
    for (double e : expo) acc += std::exp(e - top);
    if (counters) counters->exp_evals += points.size();
    lambda[j] = prior + std::norm(s_hat[j]) / g + top + std::log(acc);
  }
  return lambda;
}

// The k positions with the largest LLR (ties to the lower position), sorted.
inline IndexSet top_k(std::span<const double> lambda, std::size_t k) {
  std::vector<std::uint8_t> order(lambda.size());
  std::iota(order.begin(), order.end(), std::uint8_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint8_t a, std::uint8_t b) { return lambda[a] > lambda[b]; });
  IndexSet set(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(set.begin(), set.end());
  return set;
}

// LLR activity detection followed by per-subcarrier slicing. A top-k set
// outside the table is replaced by the nearest legal entry.
inline SubblockEstimate llr_detect(std::span<const cplx> s_hat, std::span<const double> gamma_tot,
                                   const ImCodec& codec, DetectorCounters* counters = nullptr) {
  const auto& table = codec.table();
  const auto& cons = codec.constellation();
  std::vector<cplx> points(cons.points().begin(), cons.points().end());
  for (auto& p : points) p *= codec.amplitude();
  const auto lambda = llr_values(s_hat, gamma_tot, points, table.active(), counters);

  SubblockEstimate e;
  e.active = top_k(lambda, table.active());
  std::uint64_t pattern = 0;
  if (auto idx = table.find(e.active)) {
    pattern = *idx;
  } else {
    pattern = table.nearest(e.active);
    e.active = table.entry(pattern);
    e.remapped = true;
  }
  for (unsigned b = table.p1(); b-- > 0;) e.bits.push_back(static_cast<std::uint8_t>((pattern >> b) & 1u));
  std::vector<std::uint8_t> sym(cons.bits_per_symbol());
  for (auto j : e.active) {
    const auto label = cons.slice(s_hat[j] / codec.amplitude());
    e.labels.push_back(label);
    cons.label_to_bits(label, sym);
    e.bits.insert(e.bits.end(), sym.begin(), sym.end());
  }
  return e;
}

// Plain per-subcarrier slicing; the only detector when k = n.
inline SubblockEstimate slice_detect(std::span<const cplx> s_hat, const ImCodec& codec) {
  const auto& cons = codec.constellation();
  if (codec.config().active_per_group != s_hat.size())
    throw detector_error("slicing detector needs k = n");
  SubblockEstimate e;
  std::vector<std::uint8_t> sym(cons.bits_per_symbol());
  for (std::size_t j = 0; j < s_hat.size(); ++j) {
    e.active.push_back(static_cast<std::uint8_t>(j));
    const auto label = cons.slice(s_hat[j] / codec.amplitude());
    e.labels.push_back(label);
    cons.label_to_bits(label, sym);
    e.bits.insert(e.bits.end(), sym.begin(), sym.end());
  }
  return e;
}

}  // namespace fbmcim
