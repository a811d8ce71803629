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
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbmcim/analysis.hpp"
#include "fbmcim/channel.hpp"
#include "fbmcim/detect.hpp"
#include "fbmcim/filterbank.hpp"
#include "fbmcim/im_codec.hpp"
#include "fbmcim/oracles.hpp"
#include "fbmcim/receiver.hpp"
#include "fbmcim/rng.hpp"

namespace fbmcim {

struct SelftestOptions {
  // Replaces the (4,3) lookup table by one with a duplicated entry.
  bool corrupt_lookup_table = false;
  std::uint64_t seed = 7;
};

struct SelftestCase {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline Eigen::MatrixXcd random_symbols(Eigen::Index N, Eigen::Index M, Rng& rng) {
  Eigen::MatrixXcd S(N, M);
  for (Eigen::Index i = 0; i < S.size(); ++i) S.data()[i] = rng.complex_normal();
  return S;
}

inline std::string fmt_err(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", e);
  return buf;
}

// Dense R assembled from the per-residue blocks, (N M) x (N M).
inline Eigen::MatrixXd dense_from_blocks(const InverseFilterMatrix& inv) {
  const std::size_t N = inv.n_subcarriers(), M = inv.n_symbols();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N * M), static_cast<Eigen::Index>(N * M));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t a = 0; a < M; ++a)
      for (std::size_t b = 0; b < M; ++b) R(a * N + i, b * N + i) = inv.residue_inverse(i)(a, b);
  return R;
}

}  // namespace detail

inline SelftestCase check_synthesis(std::size_t N, std::size_t M, std::size_t K, std::uint64_t seed) {
  Rng rng(seed);
  const PrototypeFilter proto = make_prototype(N, K);
  const Eigen::MatrixXcd S = detail::random_symbols(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(M), rng);
  UnitaryDft dft(N);
  const double err = (synthesize(S, proto, dft).samples - oracle::synthesize(S, proto)).cwiseAbs().maxCoeff();
  return {"dense P b vs synthesis (N=" + std::to_string(N) + ", M=" + std::to_string(M) + ", K=" + std::to_string(K) + ")",
          err < 1e-10, "max abs error " + detail::fmt_err(err)};
}

inline SelftestCase check_inverse(std::size_t N, std::size_t M, std::size_t K) {
  const PrototypeFilter proto = make_prototype(N, K);
  const InverseFilterMatrix inv(proto, M);
  const Eigen::MatrixXd P = oracle::transmit_matrix(proto, M);
  const Eigen::MatrixXd RG = detail::dense_from_blocks(inv) * (P.transpose() * P);
  const double err = (RG - Eigen::MatrixXd::Identity(RG.rows(), RG.cols())).cwiseAbs().maxCoeff();
  return {"R (P^H P) = I (N=" + std::to_string(N) + ", M=" + std::to_string(M) + ", K=" + std::to_string(K) + ")",
          err < 1e-8, "max abs error " + detail::fmt_err(err)};
}

inline SelftestCase check_zeta(std::size_t N, std::size_t M, std::size_t K) {
  const PrototypeFilter proto = make_prototype(N, K);
  const InverseFilterMatrix inv(proto, M);
  const Eigen::MatrixXd dense = oracle::zeta(proto, M);
  double err = 0.0;
  for (Eigen::Index m = 0; m < dense.cols(); ++m)
    for (Eigen::Index n = 0; n < dense.rows(); ++n)
      err = std::max(err, std::abs(dense(n, m) - enhancement_factor(inv, static_cast<std::size_t>(m), static_cast<std::size_t>(n))));
  return {"zeta vs dense F W W^H F^H", err < 1e-10, "max abs error " + detail::fmt_err(err)};
}

inline SelftestCase check_demodulation(std::size_t N, std::size_t M, std::size_t K, std::uint64_t seed) {
  Rng rng(seed);
  const PrototypeFilter proto = make_prototype(N, K);
  const InverseFilterMatrix inv(proto, M);
  Eigen::VectorXcd r(static_cast<Eigen::Index>(block_length(N, M, K)));
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = rng.complex_normal();
  const double err = (demodulate(r, proto, inv) - oracle::demodulate(r, proto, M)).cwiseAbs().maxCoeff();
  return {"demodulation vs dense F R P^H", err < 1e-10, "max abs error " + detail::fmt_err(err)};
}

inline SelftestCase check_channel_split(std::uint64_t seed) {
  const std::size_t N = 16, M = 4, K = 4;
  Rng rng(seed);
  const PrototypeFilter proto = make_prototype(N, K);
  const Eigen::MatrixXcd S = detail::random_symbols(N, M, rng);
  UnitaryDft dft(N);
  const TimeSignal tx = synthesize(S, proto, dft);
  const ChannelRealization ch = draw_channel(PowerDelayProfile::exponential(4), rng);
  const RxComposite rx = apply_channel(tx, proto, ch, Eigen::VectorXcd(), 0.0, rng);
  const Eigen::VectorXcd full = oracle::linear_convolution(tx.samples, ch.cir).head(tx.samples.size());
  const Eigen::MatrixXcd CS = freq_response(ch, N).asDiagonal() * S;
  const double e1 = (rx.main + rx.fd - full).cwiseAbs().maxCoeff();
  const double e2 = (rx.main - oracle::synthesize(CS, proto)).cwiseAbs().maxCoeff();
  return {"channel split main + fd = h * o, main = P F^H (C o S)", e1 < 1e-12 && e2 < 1e-10,
          "errors " + detail::fmt_err(e1) + ", " + detail::fmt_err(e2)};
}

inline SelftestCase check_colored_closed_form() {
  const std::size_t N = 16, M = 5, K = 4;
  ImConfig cfg;
  cfg.n_subcarriers = N;
  cfg.n_symbols = M;
  cfg.overlap_factor = K;
  const PrototypeFilter proto = make_prototype(cfg);
  const InverseFilterMatrix inv(proto, M);
  const PowerDelayProfile pdp = PowerDelayProfile::exponential(4);
  const InterferenceAnalyzer an(cfg, proto, inv, pdp);
  const double power = cfg.activity() * cfg.active_power();
  const Eigen::VectorXd fd = oracle::fd_variance(proto, M, pdp, power);
  const Eigen::VectorXd ibi = oracle::ibi_variance(proto, M, pdp, power);
  const double e1 = ((an.pre_equalizer_fd(InterferenceModel::kColored) - fd).array() / fd.array()).abs().maxCoeff();
  const double e2 = ((an.pre_equalizer_ibi(InterferenceModel::kColored) - ibi).array().abs() /
                     ibi.maxCoeff()).maxCoeff();
  return {"fd / IBI covariance vs dense operators", e1 < 1e-9 && e2 < 1e-9,
          "relative errors " + detail::fmt_err(e1) + ", " + detail::fmt_err(e2)};
}

inline SelftestCase check_codec_roundtrip(const ImCodec& codec) {
  const std::size_t gb = codec.group_bits();
  std::size_t failures = 0;
  std::vector<std::uint8_t> bits(gb), out;
  std::vector<cplx> block(codec.config().group_size);
  std::vector<std::uint8_t> mask(codec.config().group_size);
  for (std::uint64_t word = 0; word < (std::uint64_t{1} << gb); ++word) {
    for (std::size_t b = 0; b < gb; ++b) bits[b] = static_cast<std::uint8_t>((word >> (gb - 1 - b)) & 1u);
    codec.encode_group(bits, block, mask);
    GroupDecision d;
    for (std::size_t j = 0; j < block.size(); ++j)
      if (mask[j]) {
        d.active.push_back(static_cast<std::uint8_t>(j));
        d.symbols.push_back(block[j]);
      }
    out.clear();
    try {
      codec.decode_group(d, out);
    } catch (const std::exception&) {
      ++failures;
      continue;
    }
    if (out != bits) ++failures;
  }
  const auto total = std::uint64_t{1} << gb;
  return {"codec roundtrip, all " + std::to_string(total) + " groups", failures == 0,
          std::to_string(failures) + " failures"};
}

inline SelftestCase check_llr_vs_bayes(const ImCodec& codec, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> points(codec.constellation().points().begin(), codec.constellation().points().end());
  for (auto& p : points) p *= codec.amplitude();
  const std::size_t n = codec.config().group_size, k = codec.config().active_per_group;
  const double offset = std::log(static_cast<double>(points.size()));
  double err = 0.0;
  bool argtop_ok = true;
  std::vector<cplx> s(n);
  std::vector<double> g(n);
  for (int trial = 0; trial < 2000; ++trial) {
    const double gamma = std::exp(rng.normal() * 1.5 - 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = rng.complex_normal(2.0);
      g[j] = gamma * std::exp(0.3 * rng.normal());
    }
    const auto lambda = llr_values(s, g, points, k);
    std::vector<double> shifted(lambda);
    for (std::size_t j = 0; j < n; ++j) {
      const double bayes = oracle::bayes_activity_log_odds(s[j], g[j], points, n, k);
      err = std::max(err, std::abs(lambda[j] - offset - bayes) / std::max(1.0, std::abs(bayes)));
      shifted[j] += 17.25;
    }
    argtop_ok = argtop_ok && top_k(lambda, k) == top_k(shifted, k);
  }
  return {"LLR vs Bayes enumeration (offset log M removed)", err < 1e-9 && argtop_ok,
          "max relative error " + detail::fmt_err(err) + (argtop_ok ? ", top-k invariant" : ", top-k changed by shift")};
}

inline SelftestCase check_detectors_noiseless(const ImCodec& codec) {
  const CandidateSet gamma(codec);
  const std::size_t n = codec.config().group_size;
  std::size_t ml_wrong = 0, llr_wrong = 0;
  std::vector<cplx> B(n);
  const std::vector<double> g(n, 1e-3);
  for (std::size_t c = 0; c < gamma.size(); ++c) {
    for (std::size_t j = 0; j < n; ++j) B[j] = gamma.candidate(c)(static_cast<Eigen::Index>(j));
    const auto ml = ml_detect(B, gamma);
    const auto want = gamma.bits(c);
    if (!std::equal(ml.bits.begin(), ml.bits.end(), want.begin(), want.end())) ++ml_wrong;
    const auto llr = llr_detect(B, g, codec);
    if (llr.bits != ml.bits || llr.active != ml.active) ++llr_wrong;
  }
  return {"noiseless ML / LLR over all " + std::to_string(gamma.size()) + " candidates", ml_wrong == 0 && llr_wrong == 0,
          std::to_string(ml_wrong) + " ML misses, " + std::to_string(llr_wrong) + " LLR/ML disagreements"};
}

inline ImCodec selftest_codec(const SelftestOptions& opt) {
  ImConfig cfg;  // (4, 3, QPSK)
  if (!opt.corrupt_lookup_table) return ImCodec(cfg);
  auto entries = ImLookupTable(cfg.group_size, cfg.active_per_group).entries();
  entries[1] = entries[0];
  return ImCodec(cfg, ImLookupTable::unchecked(cfg.group_size, cfg.active_per_group, std::move(entries)));
}

inline std::vector<SelftestCase> run_selftest(const SelftestOptions& opt = {}) {
  const ImCodec codec = selftest_codec(opt);
  std::vector<SelftestCase> out;
  out.push_back(check_synthesis(8, 3, 2, opt.seed));
  out.push_back(check_synthesis(64, 10, 4, opt.seed + 1));
  out.push_back(check_inverse(8, 3, 2));
  out.push_back(check_inverse(64, 10, 4));
  out.push_back(check_zeta(16, 6, 4));
  out.push_back(check_demodulation(16, 6, 4, opt.seed + 2));
  out.push_back(check_channel_split(opt.seed + 3));
  out.push_back(check_colored_closed_form());
  out.push_back(check_codec_roundtrip(codec));
  out.push_back(check_llr_vs_bayes(codec, opt.seed + 4));
  out.push_back(check_detectors_noiseless(codec));
  return out;
}

}  // namespace fbmcim
