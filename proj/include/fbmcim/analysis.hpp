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
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbmcim/channel.hpp"
#include "fbmcim/config.hpp"
#include "fbmcim/filterbank.hpp"
#include "fbmcim/receiver.hpp"

namespace fbmcim {

// How the filter-distortion and IBI covariances enter the per-symbol
// variance. kWhite treats E[o o^H] as alpha * I, so every component is
// enhanced by the noise factor zeta. kColored keeps the full covariance and
// yields component-specific enhancement factors.
enum class InterferenceModel { kWhite, kColored };

inline const char* to_string(InterferenceModel m) {
  return m == InterferenceModel::kWhite ? "white" : "colored";
}

namespace detail {

// Rows of Delta P^{l} = S_l P - P X_l for in-symbol sample i, J x M.
inline Eigen::MatrixXd fd_slice(const PrototypeFilter& proto, std::size_t M, std::size_t i,
                                std::size_t l) {
  const std::size_t N = proto.n_subcarriers, K = proto.overlap;
  const std::size_t J = K + M - 1;
  const double gain = std::sqrt(static_cast<double>(N));
  Eigen::MatrixXd D(static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(M));
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t m = 0; m < M; ++m) {
      const auto t = static_cast<std::ptrdiff_t>(i + j * N) - static_cast<std::ptrdiff_t>(m * N);
      D(j, m) = gain * (proto.tap(t - static_cast<std::ptrdiff_t>(l)) - proto.tap(t));
    }
  return D;
}

// Energy of the last l rows of P (one transmitted block's tail).
inline Eigen::VectorXd tail_profile(const PrototypeFilter& proto, std::size_t M) {
  const std::size_t N = proto.n_subcarriers, K = proto.overlap;
  const std::size_t len = block_length(N, M, K);
  // row_energy[s] = sum over columns of P[s, :]^2
  Eigen::VectorXd row_energy = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(len));
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t q = 0; q < K * N; ++q)
      row_energy(m * N + q) += static_cast<double>(N) * proto.taps[q] * proto.taps[q];
  return row_energy;
}

}  // namespace detail

// T^{l} = Tr(Delta P^{l} Delta P^{l H}).
inline double fd_trace(const PrototypeFilter& proto, std::size_t M, std::size_t l) {
  double sum = 0.0;
  for (std::size_t i = 0; i < proto.n_subcarriers; ++i)
    sum += detail::fd_slice(proto, M, i, l).squaredNorm();
  return sum;
}

// P^corr_(l) = Tr(P_(l) P_(l)^H), P_(l) the last l rows of P.
inline double tail_correlation(const PrototypeFilter& proto, std::size_t M, std::size_t l) {
  const Eigen::VectorXd e = detail::tail_profile(proto, M);
  return e.tail(static_cast<Eigen::Index>(std::min<std::size_t>(l, e.size()))).sum();
}

// Per-sample filter-distortion power (k/n) delta^2 sum_l rho_l^2 T^{l} / ((K+M-1)N).
inline double alpha_fd(const PrototypeFilter& proto, const PowerDelayProfile& pdp,
                       const ImConfig& cfg, double active_power) {
  double base = 0.0;
  for (std::size_t l = 0; l < pdp.taps(); ++l) base += pdp.power(l) * fd_trace(proto, cfg.n_symbols, l);
  base = active_power * base /
         static_cast<double>(block_length(cfg.n_subcarriers, cfg.n_symbols, cfg.overlap_factor));
  return cfg.activity() * base;
}

inline double alpha_fd(const PrototypeFilter& proto, const PowerDelayProfile& pdp, const ImConfig& cfg) {
  return alpha_fd(proto, pdp, cfg, cfg.active_power());
}

// Per-sample inter-block interference power (k/n) delta^2 sum_l rho_l^2 P^corr_(l) / ((K+M-1)N).
inline double alpha_ibi(const PrototypeFilter& proto, const PowerDelayProfile& pdp,
                        const ImConfig& cfg, double active_power) {
  double base = 0.0;
  for (std::size_t l = 0; l < pdp.taps(); ++l)
    base += pdp.power(l) * tail_correlation(proto, cfg.n_symbols, l);
  base = active_power * base /
         static_cast<double>(block_length(cfg.n_subcarriers, cfg.n_symbols, cfg.overlap_factor));
  return cfg.activity() * base;
}

inline double alpha_ibi(const PrototypeFilter& proto, const PowerDelayProfile& pdp, const ImConfig& cfg) {
  return alpha_ibi(proto, pdp, cfg, cfg.active_power());
}

// delta^2 D nu^2 sigma^4 / (delta^2 |C_n|^2 + nu sigma^2)^2. D is the
// activity of the entry, or k/n for the activity-averaged budget.
inline double gamma_resd(cplx C_n, const EqualizerConfig& eq, double activity = 1.0) {
  const double nu = eq.nu();
  if (nu == 0.0) return 0.0;
  const double d2 = eq.signal_var, s2 = eq.noise_var;
  const double den = d2 * std::norm(C_n) + nu * s2;
  if (den == 0.0) return d2 * activity;
  return d2 * activity * nu * nu * s2 * s2 / (den * den);
}

inline double gamma_component(double alpha, cplx E_n, double zeta) {
  return alpha * std::norm(E_n) * zeta;
}

// Per-(m, n) variances of the equalized error. Matrices are N x M.
struct InterferenceBudget {
  Eigen::MatrixXd gamma_resd, gamma_fd, gamma_ibi, gamma_noise, gamma_tot;
  Eigen::MatrixXd zeta;      // noise enhancement
  Eigen::MatrixXd zeta_fd;   // enhancement seen by filter distortion
  Eigen::MatrixXd zeta_ibi;  // enhancement seen by IBI
  double alpha_fd = 0.0;
  double alpha_ibi = 0.0;
  double noise_var = 0.0;
  double active_power = 1.0;
  InterferenceModel model = InterferenceModel::kColored;
};

// Everything of the budget that does not depend on the channel draw.
class InterferenceAnalyzer {
 public:
  InterferenceAnalyzer(const ImConfig& cfg, const PrototypeFilter& proto,
                       const InverseFilterMatrix& inv, const PowerDelayProfile& pdp,
                       bool guard_interval = false)
      : cfg_(cfg), guard_interval_(guard_interval) {
    const std::size_t N = cfg.n_subcarriers, M = cfg.n_symbols, L = pdp.taps();
    const std::size_t len = block_length(N, M, cfg.overlap_factor);
    if (inv.n_subcarriers() != N || inv.n_symbols() != M)
      throw dimension_error("inverse filter does not match the configuration");
    if (L > N) throw dimension_error("channel longer than N taps");

    alpha_fd_ = fbmcim::alpha_fd(proto, pdp, cfg);
    alpha_ibi_ = guard_interval ? 0.0 : fbmcim::alpha_ibi(proto, pdp, cfg);
    zeta_ = inv.zeta();

    // Unit-power covariances, shaped per in-symbol sample i.
    const double power = cfg.activity() * cfg.active_power();
    Eigen::VectorXd fd_var = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M));
    Eigen::VectorXd ibi_var = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M));
    const Eigen::VectorXd tail = detail::tail_profile(proto, M);
    for (std::size_t i = 0; i < N; ++i) {
      const Eigen::MatrixXd& W = inv.residue_receive(i);
      for (std::size_t l = 1; l < L; ++l) {
        const Eigen::MatrixXd WD = W * detail::fd_slice(proto, M, i, l);
        fd_var += power * pdp.power(l) * WD.rowwise().squaredNorm();
      }
      if (!guard_interval && i + 1 < L) {
        // Sample i of this block sees taps l > i of the previous block's tail.
        double v = 0.0;
        for (std::size_t l = i + 1; l < L; ++l) v += pdp.power(l) * tail(len - l + i);
        ibi_var += power * v * W.col(0).cwiseAbs2();
      }
    }
    fd_var /= static_cast<double>(N);
    ibi_var /= static_cast<double>(N);
    zeta_fd_ = alpha_fd_ > 0.0 ? Eigen::VectorXd(fd_var / alpha_fd_) : zeta_;
    zeta_ibi_ = alpha_ibi_ > 0.0 ? Eigen::VectorXd(ibi_var / alpha_ibi_) : zeta_;
  }

  const ImConfig& config() const { return cfg_; }
  bool guard_interval() const { return guard_interval_; }
  double alpha_fd() const { return alpha_fd_; }
  double alpha_ibi() const { return alpha_ibi_; }
  const Eigen::VectorXd& zeta() const { return zeta_; }

  const Eigen::VectorXd& zeta_fd(InterferenceModel model) const {
    return model == InterferenceModel::kColored ? zeta_fd_ : zeta_;
  }
  const Eigen::VectorXd& zeta_ibi(InterferenceModel model) const {
    return model == InterferenceModel::kColored ? zeta_ibi_ : zeta_;
  }

  // Variance of each component before the one-tap equalizer, per symbol.
  Eigen::VectorXd pre_equalizer_fd(InterferenceModel model) const { return alpha_fd_ * zeta_fd(model); }
  Eigen::VectorXd pre_equalizer_ibi(InterferenceModel model) const { return alpha_ibi_ * zeta_ibi(model); }
  Eigen::VectorXd pre_equalizer_noise(double noise_var) const { return noise_var * zeta_; }

  InterferenceBudget budget(const Eigen::VectorXcd& C, const EqualizerConfig& eq,
                            InterferenceModel model = InterferenceModel::kColored) const {
    const std::size_t N = cfg_.n_subcarriers, M = cfg_.n_symbols;
    if (static_cast<std::size_t>(C.size()) != N) throw dimension_error("frequency response length must equal N");
    const Eigen::VectorXcd E = equalizer_taps(C, eq);
    InterferenceBudget b;
    b.model = model;
    b.alpha_fd = alpha_fd_;
    b.alpha_ibi = alpha_ibi_;
    b.noise_var = eq.noise_var;
    b.active_power = eq.signal_var;
    const auto rows = static_cast<Eigen::Index>(N), cols = static_cast<Eigen::Index>(M);
    b.gamma_resd.resize(rows, cols);
    b.gamma_fd.resize(rows, cols);
    b.gamma_ibi.resize(rows, cols);
    b.gamma_noise.resize(rows, cols);
    b.zeta.resize(rows, cols);
    b.zeta_fd.resize(rows, cols);
    b.zeta_ibi.resize(rows, cols);
    const Eigen::VectorXd& zfd = zeta_fd(model);
    const Eigen::VectorXd& zibi = zeta_ibi(model);
    for (Eigen::Index n = 0; n < rows; ++n) {
      const double resd = gamma_resd(C(n), eq, cfg_.activity());
      for (Eigen::Index m = 0; m < cols; ++m) {
        b.zeta(n, m) = zeta_(m);
        b.zeta_fd(n, m) = zfd(m);
        b.zeta_ibi(n, m) = zibi(m);
        b.gamma_resd(n, m) = resd;
        b.gamma_fd(n, m) = gamma_component(alpha_fd_, E(n), zfd(m));
        b.gamma_ibi(n, m) = gamma_component(alpha_ibi_, E(n), zibi(m));
        b.gamma_noise(n, m) = gamma_component(eq.noise_var, E(n), zeta_(m));
      }
    }
    b.gamma_tot = b.gamma_resd + b.gamma_fd + b.gamma_ibi + b.gamma_noise;
    return b;
  }

 private:
  ImConfig cfg_;
  bool guard_interval_;
  double alpha_fd_ = 0.0, alpha_ibi_ = 0.0;
  Eigen::VectorXd zeta_, zeta_fd_, zeta_ibi_;
};

struct PredictedMetrics {
  Eigen::MatrixXd mse;   // gamma_tot
  Eigen::MatrixXd sinr;  // delta^2 / gamma_tot
  Eigen::MatrixXd sir;   // delta^2 / (gamma_tot - gamma_noise); +inf if interference-free
};

inline PredictedMetrics predict_metrics(const InterferenceBudget& b) {
  PredictedMetrics p;
  p.mse = b.gamma_tot;
  p.sinr = b.active_power / b.gamma_tot.array();
  const Eigen::MatrixXd interference = b.gamma_resd + b.gamma_fd + b.gamma_ibi;
  p.sir.resize(interference.rows(), interference.cols());
  for (Eigen::Index n = 0; n < interference.rows(); ++n)
    for (Eigen::Index m = 0; m < interference.cols(); ++m)
      p.sir(n, m) = interference(n, m) > 0.0 ? b.active_power / interference(n, m)
                                             : std::numeric_limits<double>::infinity();
  return p;
}

// CSV with columns m,n,component,variance. Scalar rows (alpha_*) use m = n = -1.
inline void write_budget_csv(std::ostream& os, const InterferenceBudget& b,
                             double alpha_fd_unit_power = std::numeric_limits<double>::quiet_NaN(),
                             double alpha_ibi_unit_power = std::numeric_limits<double>::quiet_NaN()) {
  os << "m,n,component,variance\n";
  os.precision(12);
  os << "-1,-1,alpha_fd," << b.alpha_fd << "\n";
  os << "-1,-1,alpha_ibi," << b.alpha_ibi << "\n";
  if (!std::isnan(alpha_fd_unit_power)) os << "-1,-1,alpha_fd_unit_power," << alpha_fd_unit_power << "\n";
  if (!std::isnan(alpha_ibi_unit_power)) os << "-1,-1,alpha_ibi_unit_power," << alpha_ibi_unit_power << "\n";
  const char* names[] = {"resd", "fd", "ibi", "noise", "total"};
  const Eigen::MatrixXd* mats[] = {&b.gamma_resd, &b.gamma_fd, &b.gamma_ibi, &b.gamma_noise, &b.gamma_tot};
  for (Eigen::Index m = 0; m < b.gamma_tot.cols(); ++m)
    for (Eigen::Index n = 0; n < b.gamma_tot.rows(); ++n)
      for (int c = 0; c < 5; ++c) os << m << "," << n << "," << names[c] << "," << (*mats[c])(n, m) << "\n";
}

}  // namespace fbmcim
