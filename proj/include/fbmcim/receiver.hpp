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
#include <string>

#include <Eigen/Dense>

#include "fbmcim/config.hpp"
#include "fbmcim/dft.hpp"
#include "fbmcim/errors.hpp"
#include "fbmcim/filterbank.hpp"

namespace fbmcim {

struct EqualizerConfig {
  EqualizerMode mode = EqualizerMode::kZeroForcing;
  double noise_var = 0.0;   // sigma^2
  double signal_var = 1.0;  // delta^2 of an active symbol

  double nu() const { return mode == EqualizerMode::kZeroForcing ? 0.0 : 1.0; }

  static EqualizerConfig from(const ImConfig& cfg, double noise_var) {
    return {cfg.equalizer, noise_var, cfg.active_power()};
  }
};

struct EqualizedFrame {
  Eigen::MatrixXcd estimates;  // N x M
  Eigen::VectorXcd taps;       // E_n
  Eigen::VectorXd bias;        // beta_n = E_n C_n
};

// y = F R P^H r, one column per FBMC symbol.
inline Eigen::MatrixXcd demodulate(const Eigen::VectorXcd& r, const PrototypeFilter& proto,
                                   const InverseFilterMatrix& inv, UnitaryDft& dft) {
  Eigen::MatrixXcd u = matched_inverse(r, proto, inv);
  Eigen::MatrixXcd y(u.rows(), u.cols());
  for (Eigen::Index m = 0; m < u.cols(); ++m) dft.forward(u.col(m), y.col(m));
  return y;
}

inline Eigen::MatrixXcd demodulate(const Eigen::VectorXcd& r, const PrototypeFilter& proto,
                                   const InverseFilterMatrix& inv) {
  UnitaryDft dft(inv.n_subcarriers());
  return demodulate(r, proto, inv, dft);
}

// One-tap equalizer E_n: 1/C_n for ZF, C_n^* / (|C_n|^2 + nu sigma^2/delta^2) for MMSE.
inline Eigen::VectorXcd equalizer_taps(const Eigen::VectorXcd& C, const EqualizerConfig& eq) {
  Eigen::VectorXcd E(C.size());
  const double reg = eq.nu() * eq.noise_var / eq.signal_var;
  for (Eigen::Index n = 0; n < C.size(); ++n) {
    const double g = std::norm(C(n));
    if (eq.mode == EqualizerMode::kZeroForcing) {
      if (g == 0.0)
        throw singular_channel_error("zero-forcing on a null subcarrier (n = " + std::to_string(n) + ")");
      E(n) = 1.0 / C(n);
    } else {
      if (!(eq.noise_var > 0.0) && g == 0.0)
        throw singular_channel_error("MMSE without noise on a null subcarrier");
      E(n) = std::conj(C(n)) / (g + reg);
    }
  }
  return E;
}

// beta_n = |C_n|^2 / (|C_n|^2 + nu sigma^2 / delta^2); exactly 1 for ZF.
inline double equalizer_bias(cplx C_n, const EqualizerConfig& eq) {
  if (eq.mode == EqualizerMode::kZeroForcing) return 1.0;
  const double g = std::norm(C_n);
  return g / (g + eq.nu() * eq.noise_var / eq.signal_var);
}

inline EqualizedFrame equalize(const Eigen::MatrixXcd& y, const Eigen::VectorXcd& C,
                               const EqualizerConfig& eq) {
  if (C.size() != y.rows()) throw dimension_error("frequency response length must equal N");
  EqualizedFrame out;
  out.taps = equalizer_taps(C, eq);
  out.bias.resize(C.size());
  for (Eigen::Index n = 0; n < C.size(); ++n) out.bias(n) = equalizer_bias(C(n), eq);
  out.estimates = out.taps.asDiagonal() * y;
  return out;
}

}  // namespace fbmcim
