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
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbmcim/config.hpp"
#include "fbmcim/dft.hpp"
#include "fbmcim/errors.hpp"
#include "fbmcim/im_codec.hpp"

namespace fbmcim {

// Real, even-symmetric prototype pulse of length K*N with unit energy.
struct PrototypeFilter {
  std::vector<double> taps;
  std::size_t overlap = 0;        // K
  std::size_t n_subcarriers = 0;  // N

  double tap(std::ptrdiff_t t) const {
    return (t < 0 || t >= static_cast<std::ptrdiff_t>(taps.size()))
               ? 0.0
               : taps[static_cast<std::size_t>(t)];
  }
};

// Frequency-domain samples H_1..H_{K-1} of the PHYDYAS design (H_0 = 1).
inline std::vector<double> phydyas_coefficients(std::size_t overlap) {
  switch (overlap) {
    case 1: return {};
    case 2: return {std::numbers::sqrt2 / 2.0};
    case 3: return {0.911438, 0.411438};
    case 4: return {0.971960, std::numbers::sqrt2 / 2.0, 0.235147};
    case 6: return {0.99722, 0.94136, std::numbers::sqrt2 / 2.0, 0.33638, 0.08426};
    case 8:
      return {0.99988, 0.98121, 0.92656, std::numbers::sqrt2 / 2.0,
              0.37435, 0.18724, 0.04654};
    default:
      throw parameter_error("unsupported overlap factor K = " + std::to_string(overlap));
  }
}

// PHYDYAS frequency-sampling prototype, sampled at half-integer offsets so
// taps[t] == taps[K*N - 1 - t] exactly. K = 1 is the rectangular window.
inline PrototypeFilter make_prototype(std::size_t n_subcarriers, std::size_t overlap) {
  if (n_subcarriers == 0) throw parameter_error("N must be positive");
  const auto coeffs = phydyas_coefficients(overlap);
  const std::size_t len = overlap * n_subcarriers;
  PrototypeFilter p{std::vector<double>(len, 1.0), overlap, n_subcarriers};
  const double period = static_cast<double>(len);
  for (std::size_t t = 0; t < len; ++t) {
    double v = 1.0;
    for (std::size_t k = 1; k <= coeffs.size(); ++k) {
      const double sign = (k % 2 == 1) ? -1.0 : 1.0;
      v += 2.0 * sign * coeffs[k - 1] *
           std::cos(2.0 * std::numbers::pi * static_cast<double>(k) *
                    (static_cast<double>(t) + 0.5) / period);
    }
    p.taps[t] = v;
  }
  // Mirror so the symmetry holds bit-for-bit, then normalize.
  for (std::size_t t = 0; t < len / 2; ++t) p.taps[len - 1 - t] = p.taps[t];
  double energy = 0.0;
  for (double v : p.taps) energy += v * v;
  const double scale = 1.0 / std::sqrt(energy);
  for (double& v : p.taps) v *= scale;
  return p;
}

inline PrototypeFilter make_prototype(const ImConfig& cfg) {
  return make_prototype(cfg.n_subcarriers, cfg.overlap_factor);
}

// Transmit filter output o = P b together with the IDFT blocks b it came
// from. The channel model needs b to split off the filter-distortion term.
struct TimeSignal {
  Eigen::VectorXcd samples;  // (K + M - 1) N
  Eigen::MatrixXcd blocks;   // N x M, column m is F^H s_m
};

inline std::size_t block_length(std::size_t N, std::size_t M, std::size_t K) {
  return (K + M - 1) * N;
}

// P b: each IDFT block is repeated K times, weighted by sqrt(N) * taps and
// overlap-added at a spacing of N samples.
inline Eigen::VectorXcd apply_transmit_filter(const Eigen::MatrixXcd& blocks,
                                              const PrototypeFilter& proto) {
  const std::size_t N = proto.n_subcarriers, K = proto.overlap;
  if (static_cast<std::size_t>(blocks.rows()) != N)
    throw dimension_error("IDFT block length must equal N");
  const std::size_t M = static_cast<std::size_t>(blocks.cols());
  const double gain = std::sqrt(static_cast<double>(N));
  Eigen::VectorXcd o = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(block_length(N, M, K)));
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t q = 0; q < K; ++q)
      for (std::size_t i = 0; i < N; ++i)
        o((m + q) * N + i) += gain * proto.taps[q * N + i] * blocks(i, m);
  return o;
}

inline Eigen::MatrixXcd idft_blocks(const Eigen::MatrixXcd& symbols, UnitaryDft& dft) {
  Eigen::MatrixXcd b(symbols.rows(), symbols.cols());
  for (Eigen::Index m = 0; m < symbols.cols(); ++m) dft.inverse(symbols.col(m), b.col(m));
  return b;
}

inline TimeSignal synthesize(const Eigen::MatrixXcd& symbols, const PrototypeFilter& proto,
                             UnitaryDft& dft) {
  if (static_cast<std::size_t>(symbols.rows()) != proto.n_subcarriers)
    throw dimension_error("frame has " + std::to_string(symbols.rows()) +
                          " subcarriers, filter expects " +
                          std::to_string(proto.n_subcarriers));
  TimeSignal out;
  out.blocks = idft_blocks(symbols, dft);
  out.samples = apply_transmit_filter(out.blocks, proto);
  return out;
}

inline TimeSignal synthesize(const FbmcFrame& frame, const PrototypeFilter& proto) {
  UnitaryDft dft(proto.n_subcarriers);
  return synthesize(frame.symbols, proto, dft);
}

// Polyphase slice of P for in-symbol sample i: a (K + M - 1) x M banded
// matrix with Q[j, m] = sqrt(N) * taps[i + (j - m) N].
inline Eigen::MatrixXd polyphase_slice(const PrototypeFilter& proto, std::size_t M,
                                       std::size_t i) {
  const std::size_t N = proto.n_subcarriers, K = proto.overlap;
  const double gain = std::sqrt(static_cast<double>(N));
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K + M - 1),
                                            static_cast<Eigen::Index>(M));
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t q = 0; q < K; ++q) Q(m + q, m) = gain * proto.taps[q * N + i];
  return Q;
}

// R = (P^H P)^{-1}. P^H P only couples samples with the same in-symbol
// index, so R is stored as N independent M x M blocks.
class InverseFilterMatrix {
 public:
  static constexpr double kMaxCondition = 1e12;

  InverseFilterMatrix(const PrototypeFilter& proto, std::size_t n_symbols)
      : N_(proto.n_subcarriers), M_(n_symbols), K_(proto.overlap) {
    if (M_ == 0) throw parameter_error("M must be positive");
    inverse_.reserve(N_);
    receive_.reserve(N_);
    zeta_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M_));
    for (std::size_t i = 0; i < N_; ++i) {
      const Eigen::MatrixXd Q = polyphase_slice(proto, M_, i);
      const Eigen::MatrixXd G = Q.transpose() * Q;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
      const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
      const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
      if (!(cond <= kMaxCondition))
        throw numerical_error("P^H P is ill-conditioned (cond = " + std::to_string(cond) + ")");
      condition_ = std::max(condition_, cond);
      Eigen::MatrixXd Ginv = G.llt().solve(Eigen::MatrixXd::Identity(G.rows(), G.cols()));
      Ginv = 0.5 * (Ginv + Ginv.transpose()).eval();
      receive_.push_back(Ginv * Q.transpose());
      zeta_ += Ginv.diagonal();
      inverse_.push_back(std::move(Ginv));
    }
    zeta_ /= static_cast<double>(N_);
  }

  std::size_t n_subcarriers() const { return N_; }
  std::size_t n_symbols() const { return M_; }
  std::size_t overlap() const { return K_; }
  double condition() const { return condition_; }

  // (P^H P)^{-1} restricted to in-symbol sample i.
  const Eigen::MatrixXd& residue_inverse(std::size_t i) const { return inverse_.at(i); }
  // R P^H restricted to in-symbol sample i: M x (K + M - 1).
  const Eigen::MatrixXd& residue_receive(std::size_t i) const { return receive_.at(i); }

  // zeta per symbol; the same for every subcarrier.
  const Eigen::VectorXd& zeta() const { return zeta_; }

 private:
  std::size_t N_, M_, K_;
  std::vector<Eigen::MatrixXd> inverse_;
  std::vector<Eigen::MatrixXd> receive_;
  Eigen::VectorXd zeta_;
  double condition_ = 0.0;
};

inline InverseFilterMatrix build_inverse_filter(const PrototypeFilter& proto,
                                                std::size_t n_symbols) {
  return InverseFilterMatrix(proto, n_symbols);
}

inline InverseFilterMatrix build_inverse_filter(const PrototypeFilter& proto,
                                                const ImConfig& cfg) {
  return InverseFilterMatrix(proto, cfg.n_symbols);
}

// n-th diagonal entry of F R_m P_m^H P_m R_m^H F^H.
inline double enhancement_factor(const InverseFilterMatrix& inv, std::size_t m, std::size_t n) {
  if (m >= inv.n_symbols() || n >= inv.n_subcarriers())
    throw dimension_error("enhancement factor index out of range");
  return inv.zeta()(static_cast<Eigen::Index>(m));
}

// R P^H r, laid out N x M (row i holds in-symbol sample i of every symbol).
inline Eigen::MatrixXcd matched_inverse(const Eigen::VectorXcd& r, const PrototypeFilter& proto,
                                        const InverseFilterMatrix& inv) {
  const std::size_t N = inv.n_subcarriers(), M = inv.n_symbols(), K = inv.overlap();
  const std::size_t J = K + M - 1;
  if (static_cast<std::size_t>(r.size()) != J * N)
    throw dimension_error("received block has " + std::to_string(r.size()) +
                          " samples, expected " + std::to_string(J * N));
  if (proto.n_subcarriers != N || proto.overlap != K)
    throw dimension_error("prototype does not match the inverse filter");
  Eigen::MatrixXcd u(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(M));
  Eigen::VectorXcd slice(static_cast<Eigen::Index>(J));
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < J; ++j) slice(j) = r(j * N + i);
    u.row(i) = (inv.residue_receive(i) * slice).transpose();
  }
  return u;
}

}  // namespace fbmcim
