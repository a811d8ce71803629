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
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fbmcim/channel.hpp"
#include "fbmcim/constellation.hpp"
#include "fbmcim/filterbank.hpp"

// Dense reference implementations. They build the operators of the
// transceiver as explicit matrices and are only meant for small sizes and
// for checking the structured code paths.
namespace fbmcim::oracle {

// Unitary DFT matrix, F[k, t] = exp(-2 pi j k t / N) / sqrt(N).
inline Eigen::MatrixXcd dft_matrix(std::size_t N) {
  const auto n = static_cast<Eigen::Index>(N);
  Eigen::MatrixXcd F(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index t = 0; t < n; ++t)
      F(k, t) = std::polar(scale, -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(N));
  return F;
}

// P with P[(m + q) N + i, m N + i] = sqrt(N) taps[q N + i].
inline Eigen::MatrixXd transmit_matrix(const PrototypeFilter& proto, std::size_t M) {
  const std::size_t N = proto.n_subcarriers, K = proto.overlap;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(block_length(N, M, K)),
                                            static_cast<Eigen::Index>(N * M));
  const double gain = std::sqrt(static_cast<double>(N));
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t q = 0; q < K; ++q)
      for (std::size_t i = 0; i < N; ++i) P((m + q) * N + i, m * N + i) = gain * proto.taps[q * N + i];
  return P;
}

inline Eigen::MatrixXd inverse_filter(const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd G = P.transpose() * P;
  return G.inverse();
}

// Stacked F^H s_m for an N x M symbol matrix.
inline Eigen::VectorXcd stacked_idft(const Eigen::MatrixXcd& S) {
  const Eigen::MatrixXcd Fh = dft_matrix(static_cast<std::size_t>(S.rows())).adjoint();
  Eigen::VectorXcd b(S.size());
  for (Eigen::Index m = 0; m < S.cols(); ++m) b.segment(m * S.rows(), S.rows()) = Fh * S.col(m);
  return b;
}

inline Eigen::VectorXcd synthesize(const Eigen::MatrixXcd& S, const PrototypeFilter& proto) {
  return transmit_matrix(proto, static_cast<std::size_t>(S.cols())).cast<cplx>() * stacked_idft(S);
}

// y_m = F [R P^H r]_m, returned N x M.
inline Eigen::MatrixXcd demodulate(const Eigen::VectorXcd& r, const PrototypeFilter& proto, std::size_t M) {
  const std::size_t N = proto.n_subcarriers;
  const Eigen::MatrixXd P = transmit_matrix(proto, M);
  const Eigen::VectorXcd u = (inverse_filter(P) * P.transpose()).cast<cplx>() * r;
  const Eigen::MatrixXcd F = dft_matrix(N);
  const auto n = static_cast<Eigen::Index>(N);
  Eigen::MatrixXcd y(n, static_cast<Eigen::Index>(M));
  for (Eigen::Index m = 0; m < y.cols(); ++m) y.col(m) = F * u.segment(m * n, n);
  return y;
}

// W_m = rows of R P^H belonging to symbol m.
inline Eigen::MatrixXd receive_rows(const Eigen::MatrixXd& P, std::size_t N, std::size_t m) {
  const Eigen::MatrixXd W = inverse_filter(P) * P.transpose();
  return W.middleRows(static_cast<Eigen::Index>(m * N), static_cast<Eigen::Index>(N));
}

// zeta_{m,n} = [F W_m W_m^H F^H]_{nn}, N x M.
inline Eigen::MatrixXd zeta(const PrototypeFilter& proto, std::size_t M) {
  const std::size_t N = proto.n_subcarriers;
  const Eigen::MatrixXd P = transmit_matrix(proto, M);
  const Eigen::MatrixXd W = inverse_filter(P) * P.transpose();
  const Eigen::MatrixXcd F = dft_matrix(N);
  const auto n = static_cast<Eigen::Index>(N);
  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(M));
  for (Eigen::Index m = 0; m < z.cols(); ++m) {
    const Eigen::MatrixXcd FW = F * W.middleRows(m * n, n).cast<cplx>();
    z.col(m) = FW.rowwise().squaredNorm();
  }
  return z;
}

// Full linear convolution, length x.size() + h.size() - 1.
inline Eigen::VectorXcd linear_convolution(const Eigen::VectorXcd& x, const Eigen::VectorXcd& h) {
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(x.size() + h.size() - 1);
  for (Eigen::Index t = 0; t < x.size(); ++t)
    for (Eigen::Index l = 0; l < h.size(); ++l) y(t + l) += h(l) * x(t);
  return y;
}

// Delta P^{l} = S_l P - P X_l with S_l the l-sample delay (truncated to the
// block) and X_l the circular delay inside every IDFT block.
inline Eigen::MatrixXd filter_distortion_matrix(const PrototypeFilter& proto, std::size_t M, std::size_t l) {
  const std::size_t N = proto.n_subcarriers;
  const Eigen::MatrixXd P = transmit_matrix(proto, M);
  const Eigen::Index rows = P.rows(), cols = P.cols();
  Eigen::MatrixXd SP = Eigen::MatrixXd::Zero(rows, cols);
  SP.bottomRows(rows - static_cast<Eigen::Index>(l)) = P.topRows(rows - static_cast<Eigen::Index>(l));
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(cols, cols);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t i = 0; i < N; ++i) X(m * N + (i + l) % N, m * N + i) = 1.0;
  return SP - P * X;
}

// Per-symbol mean over n of E|[F W_m o]_n|^2 for o = sum_l h_l A_l b with
// independent taps of power pdp(l) and E[b b^H] = power I.
inline Eigen::VectorXd component_variance(const std::vector<Eigen::MatrixXd>& A, const PowerDelayProfile& pdp,
                                          const Eigen::MatrixXd& P, std::size_t N, double power) {
  const Eigen::MatrixXd W = inverse_filter(P) * P.transpose();
  const auto M = static_cast<Eigen::Index>(P.cols() / static_cast<Eigen::Index>(N));
  const auto n = static_cast<Eigen::Index>(N);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(M);
  for (std::size_t l = 0; l < A.size(); ++l) {
    const Eigen::MatrixXd WA = W * A[l];
    // F is unitary, so the mean over n of the diagonal is the trace over N.
    for (Eigen::Index m = 0; m < M; ++m) v(m) += pdp.power(l) * power * WA.middleRows(m * n, n).squaredNorm();
  }
  return v / static_cast<double>(N);
}

inline Eigen::VectorXd fd_variance(const PrototypeFilter& proto, std::size_t M, const PowerDelayProfile& pdp,
                                   double power) {
  std::vector<Eigen::MatrixXd> A;
  for (std::size_t l = 0; l < pdp.taps(); ++l) A.push_back(filter_distortion_matrix(proto, M, l));
  return component_variance(A, pdp, transmit_matrix(proto, M), proto.n_subcarriers, power);
}

// IBI: tap l carries the last l samples of the previous block into the first
// l samples of this one.
inline Eigen::VectorXd ibi_variance(const PrototypeFilter& proto, std::size_t M, const PowerDelayProfile& pdp,
                                    double power) {
  const Eigen::MatrixXd P = transmit_matrix(proto, M);
  const Eigen::Index len = P.rows();
  std::vector<Eigen::MatrixXd> A;
  for (std::size_t l = 0; l < pdp.taps(); ++l) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(len, len);
    for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(l); ++t) B(t, len - static_cast<Eigen::Index>(l) + t) = 1.0;
    A.push_back(B * P);
  }
  return component_variance(A, pdp, P, proto.n_subcarriers, power);
}

// log P(active | s) - log P(inactive | s) by direct enumeration of the
// Gaussian likelihoods with priors k/n (split evenly over the points) and
// (n - k)/n.
inline double bayes_activity_log_odds(cplx s, double gamma, std::span<const cplx> points, std::size_t n,
                                      std::size_t k) {
  const auto likelihood = [gamma](cplx x, cplx mean) {
    return std::exp(-std::norm(x - mean) / gamma) / (std::numbers::pi * gamma);
  };
  double active = 0.0;
  const double prior = static_cast<double>(k) / static_cast<double>(n) / static_cast<double>(points.size());
  for (const cplx& a : points) active += prior * likelihood(s, a);
  const double inactive = static_cast<double>(n - k) / static_cast<double>(n) * likelihood(s, cplx{});
  return std::log(active) - std::log(inactive);
}

}  // namespace fbmcim::oracle
