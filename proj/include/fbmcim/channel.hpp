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
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbmcim/errors.hpp"
#include "fbmcim/filterbank.hpp"
#include "fbmcim/rng.hpp"

namespace fbmcim {

// Tap powers rho_l^2 of an L-tap channel, normalized to unit total power.
class PowerDelayProfile {
 public:
  PowerDelayProfile() : PowerDelayProfile(std::vector<double>{1.0}) {}

  explicit PowerDelayProfile(std::vector<double> linear) : powers_(std::move(linear)) {
    if (powers_.empty()) throw parameter_error("power delay profile needs at least one tap");
    double sum = 0.0;
    for (double p : powers_) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw parameter_error("tap powers must be finite and nonnegative");
      sum += p;
    }
    if (!(sum > 0.0)) throw parameter_error("tap powers must not all be zero");
    for (double& p : powers_) p /= sum;
  }

  static PowerDelayProfile from_db(const std::vector<double>& db) {
    std::vector<double> lin;
    lin.reserve(db.size());
    for (double d : db) lin.push_back(std::pow(10.0, d / 10.0));
    return PowerDelayProfile(std::move(lin));
  }

  // rho_l^2 proportional to exp(-decay * l).
  static PowerDelayProfile exponential(std::size_t taps, double decay = 1.0) {
    if (taps == 0) throw parameter_error("exponential profile needs at least one tap");
    std::vector<double> lin(taps);
    for (std::size_t l = 0; l < taps; ++l) lin[l] = std::exp(-decay * static_cast<double>(l));
    return PowerDelayProfile(std::move(lin));
  }

  std::size_t taps() const { return powers_.size(); }
  const std::vector<double>& powers() const { return powers_; }
  double power(std::size_t l) const { return powers_.at(l); }

 private:
  std::vector<double> powers_;
};

// Quasi-static channel impulse response h_l = rho_l z_l of one block.
struct ChannelRealization {
  Eigen::VectorXcd cir;

  std::size_t taps() const { return static_cast<std::size_t>(cir.size()); }
};

inline ChannelRealization ideal_channel() {
  return {Eigen::VectorXcd::Ones(1)};
}

inline ChannelRealization draw_channel(const PowerDelayProfile& pdp, Rng& rng) {
  ChannelRealization ch{Eigen::VectorXcd(static_cast<Eigen::Index>(pdp.taps()))};
  for (std::size_t l = 0; l < pdp.taps(); ++l)
    ch.cir(static_cast<Eigen::Index>(l)) = std::sqrt(pdp.power(l)) * rng.complex_normal(1.0);
  return ch;
}

inline ChannelRealization draw_channel(const PowerDelayProfile& pdp, std::uint64_t seed) {
  Rng rng(seed);
  return draw_channel(pdp, rng);
}

// C_n = sum_l h_l exp(-j 2 pi n l / N).
inline Eigen::VectorXcd freq_response(const ChannelRealization& ch, std::size_t N) {
  if (ch.taps() > N) throw dimension_error("channel longer than N taps");
  Eigen::VectorXcd C = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N));
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t l = 0; l < ch.taps(); ++l)
      C(n) += ch.cir(l) * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(n * l % N) /
                                               static_cast<double>(N));
  return C;
}

// Noise variance per sample for an SNR in dB at unit signal power;
// +inf dB means no noise.
inline double noise_variance(double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return std::pow(10.0, -snr_db / 10.0);
}

// Received block split into the parts the interference analysis treats
// separately. r is formed as ((main + fd) + ibi) + noise.
struct RxComposite {
  Eigen::VectorXcd main;   // sum_l h_l P X_l b: what the receiver can undo
  Eigen::VectorXcd fd;     // filter distortion from multipath
  Eigen::VectorXcd ibi;    // previous block leaking through the delay spread
  Eigen::VectorXcd noise;
  Eigen::VectorXcd r;
};

// Linear convolution h * x truncated to x's length.
inline Eigen::VectorXcd convolve_truncated(const Eigen::VectorXcd& x, const Eigen::VectorXcd& h) {
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(x.size());
  for (Eigen::Index l = 0; l < h.size(); ++l)
    for (Eigen::Index t = l; t < x.size(); ++t) y(t) += h(l) * x(t - l);
  return y;
}

// Spill of the previous block into the first L-1 samples of this one.
inline Eigen::VectorXcd inter_block_interference(std::span<const cplx> prev, const Eigen::VectorXcd& h,
                                                 std::size_t length) {
  Eigen::VectorXcd ibi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(length));
  if (prev.empty()) return ibi;
  const auto L = static_cast<std::size_t>(h.size());
  if (L > 1 && prev.size() < L - 1) throw dimension_error("previous block tail shorter than L-1");
  const std::size_t P = prev.size();
  for (std::size_t t = 0; t + 1 < L && t < length; ++t)
    for (std::size_t l = t + 1; l < L; ++l) ibi(static_cast<Eigen::Index>(t)) += h(static_cast<Eigen::Index>(l)) * prev[P - l + t];
  return ibi;
}

inline RxComposite apply_channel(const TimeSignal& tx, const PrototypeFilter& proto,
                                 const ChannelRealization& ch, std::span<const cplx> prev_block,
                                 double noise_var, Rng& noise_rng) {
  const std::size_t N = proto.n_subcarriers, K = proto.overlap;
  const auto M = static_cast<std::size_t>(tx.blocks.cols());
  const std::size_t len = block_length(N, M, K);
  if (static_cast<std::size_t>(tx.samples.size()) != len || static_cast<std::size_t>(tx.blocks.rows()) != N)
    throw dimension_error("transmit block length " + std::to_string(tx.samples.size()) +
                          " does not match (K+M-1)N = " + std::to_string(len));
  const std::size_t L = ch.taps();
  if (L == 0 || L > N) throw dimension_error("channel must have 1..N taps");

  // Circular convolution of every IDFT block with h, i.e. F^H (C o s_m).
  Eigen::MatrixXcd shifted = Eigen::MatrixXcd::Zero(tx.blocks.rows(), tx.blocks.cols());
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t j = 0; j < N; ++j)
        shifted(j, m) += ch.cir(l) * tx.blocks((j + N - l) % N, m);

  RxComposite rx;
  if (L == 1) {
    rx.main = ch.cir(0) * tx.samples;
    rx.fd = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(len));
  } else {
    rx.main = apply_transmit_filter(shifted, proto);
    rx.fd = convolve_truncated(tx.samples, ch.cir) - rx.main;
  }
  rx.ibi = inter_block_interference(prev_block, ch.cir, len);
  rx.noise = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(len));
  if (noise_var > 0.0)
    for (std::size_t t = 0; t < len; ++t) rx.noise(t) = noise_rng.complex_normal(noise_var);
  rx.r = rx.main + rx.fd;
  rx.r += rx.ibi;
  rx.r += rx.noise;
  return rx;
}

inline RxComposite apply_channel(const TimeSignal& tx, const PrototypeFilter& proto,
                                 const ChannelRealization& ch, const Eigen::VectorXcd& prev_block,
                                 double noise_var, Rng& noise_rng) {
  return apply_channel(tx, proto, ch,
                       std::span<const cplx>(prev_block.data(), static_cast<std::size_t>(prev_block.size())),
                       noise_var, noise_rng);
}

inline RxComposite apply_channel(const TimeSignal& tx, const PrototypeFilter& proto,
                                 const ChannelRealization& ch, std::span<const cplx> prev_block,
                                 double snr_db, std::uint64_t noise_seed) {
  Rng rng(noise_seed);
  return apply_channel(tx, proto, ch, prev_block, noise_variance(snr_db), rng);
}

}  // namespace fbmcim
