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
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "fbmcim/analysis.hpp"
#include "fbmcim/channel.hpp"
#include "fbmcim/config.hpp"
#include "fbmcim/detect.hpp"
#include "fbmcim/errors.hpp"
#include "fbmcim/filterbank.hpp"
#include "fbmcim/im_codec.hpp"
#include "fbmcim/receiver.hpp"
#include "fbmcim/rng.hpp"
#include "fbmcim/stats.hpp"

namespace fbmcim {

struct DetectorSet {
  bool ml = true;
  bool llr = true;

  bool any() const { return ml || llr; }
  bool has(Detector d) const { return d == Detector::kMl ? ml : llr; }
};

inline const char* to_string(const DetectorSet& d) {
  if (d.ml && d.llr) return "both";
  if (d.ml) return "ml";
  if (d.llr) return "llr";
  return "none";
}

struct ExperimentConfig {
  ImConfig im;
  PowerDelayProfile pdp = PowerDelayProfile::exponential(4);
  bool ideal_channel = false;
  bool guard_interval = false;
  std::vector<double> snr_db = {0.0, 10.0, 20.0, 30.0};
  std::size_t trials = 10000;
  DetectorSet detectors;
  std::uint64_t seed = 1;
  InterferenceModel model = InterferenceModel::kColored;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const {
    im.validate();
    if (trials == 0) throw parameter_error("trials must be at least 1");
    if (!ideal_channel && pdp.taps() > im.n_subcarriers)
      throw parameter_error("channel longer than N taps");
  }
};

enum Component : std::size_t { kResd = 0, kFd = 1, kIbi = 2, kNoise = 3 };
inline constexpr std::array<const char*, 4> kComponentNames = {"resd", "fd", "ibi", "noise"};

// Aggregates at one SNR point. Matrices are N x M (subcarrier, symbol).
struct PointMetrics {
  double snr_db = 0.0;
  double noise_var = 0.0;
  MeanGrid error;         // |s_hat - s|^2
  MeanGrid interference;  // error without the noise term
  std::array<MeanGrid, 4> component;      // equalized psi_c
  std::array<MeanGrid, 4> pre_equalizer;  // demodulated term before E (resd unused)
  MeanGrid analytic_resd;
  MeanGrid analytic_total;
  MeanGrid resd_ratio;  // |psi_resd|^2 / gamma_resd of the same channel, 0 where gamma_resd vanishes
  // Regression slopes Re(sum e s*) / sum |s|^2 of an error e on s: `bias` for
  // the equalizer alone (resd + noise terms), `total_bias` for s_hat - s.
  MeanScalar bias;
  MeanScalar total_bias;
  std::array<BitCounter, 2> ber;  // indexed by Detector
  std::uint64_t remapped = 0;     // LLR sets outside the table

  PointMetrics() = default;
  PointMetrics(double snr, Eigen::Index N, Eigen::Index M)
      : snr_db(snr), noise_var(noise_variance(snr)), error(N, M), interference(N, M),
        analytic_resd(N, M), analytic_total(N, M), resd_ratio(N, M) {
    for (auto& g : component) g = MeanGrid(N, M);
    for (auto& g : pre_equalizer) g = MeanGrid(N, M);
  }

  std::uint64_t trials() const { return error.count; }

  void merge(const PointMetrics& o) {
    error.merge(o.error);
    interference.merge(o.interference);
    for (std::size_t c = 0; c < 4; ++c) {
      component[c].merge(o.component[c]);
      pre_equalizer[c].merge(o.pre_equalizer[c]);
    }
    analytic_resd.merge(o.analytic_resd);
    analytic_total.merge(o.analytic_total);
    resd_ratio.merge(o.resd_ratio);
    bias.merge(o.bias);
    total_bias.merge(o.total_bias);
    for (std::size_t d = 0; d < 2; ++d) ber[d].merge(o.ber[d]);
    remapped += o.remapped;
  }
};

struct MetricTable {
  ExperimentConfig config;
  std::vector<PointMetrics> points;
};

struct TrialSeeds {
  std::uint64_t payload = 0, channel = 0, noise = 0, previous = 0;

  // Streams do not depend on the SNR point: every point sees the same
  // payloads, channels and unit-variance noise draws.
  static TrialSeeds of(std::uint64_t base, std::uint64_t trial) {
    return {stream_seed(base, 0, trial, Stream::kPayload), stream_seed(base, 0, trial, Stream::kChannel),
            stream_seed(base, 0, trial, Stream::kNoise), stream_seed(base, 0, trial, Stream::kPreviousBlock)};
  }
};

// SNR-independent part of a trial; the noise fields hold unit-variance draws.
struct TrialState {
  BitPayload payload;
  Eigen::MatrixXcd symbols;
  RxComposite rx;
  Eigen::VectorXcd freq_response;
  std::array<Eigen::MatrixXcd, 4> demodulated;
};

// Outcome of one transmitted block at one SNR.
struct TrialResult {
  Eigen::MatrixXcd symbols;   // s
  Eigen::MatrixXcd estimate;  // s_hat
  std::array<Eigen::MatrixXcd, 4> psi;          // equalized components, sum = s_hat - s
  std::array<Eigen::MatrixXcd, 4> demodulated;  // components before E (resd: demodulated main term)
  Eigen::VectorXcd freq_response;
  InterferenceBudget budget;
  std::array<BitCounter, 2> ber;
  std::uint64_t remapped = 0;
};

// Channel-independent state shared by all trials of a configuration.
class Simulator {
 public:
  explicit Simulator(ExperimentConfig cfg)
      : cfg_((cfg.validate(), std::move(cfg))),
        proto_(make_prototype(cfg_.im)),
        inv_(build_inverse_filter(proto_, cfg_.im)),
        codec_(cfg_.im),
        analyzer_(cfg_.im, proto_, inv_, active_pdp(), cfg_.guard_interval) {
    if (!cfg_.im.conventional() && cfg_.detectors.ml) candidates_.emplace(codec_);
  }

  const ExperimentConfig& config() const { return cfg_; }
  const PrototypeFilter& prototype() const { return proto_; }
  const InverseFilterMatrix& inverse_filter() const { return inv_; }
  const ImCodec& codec() const { return codec_; }
  const InterferenceAnalyzer& analyzer() const { return analyzer_; }

  // The PDP actually in force (a single unit tap for the ideal channel).
  PowerDelayProfile active_pdp() const {
    return cfg_.ideal_channel ? PowerDelayProfile({1.0}) : cfg_.pdp;
  }

  // Conventional frames have a single detector, per-subcarrier slicing,
  // reported under "ml" since it is the ML rule when k = n.
  bool detector_enabled(Detector d) const {
    if (cfg_.im.conventional()) return d == Detector::kMl && cfg_.detectors.any();
    return cfg_.detectors.has(d);
  }

  // Everything of a trial that does not depend on the SNR. Noise is drawn at
  // unit variance and scaled per point.
  TrialState prepare(const TrialSeeds& seeds, UnitaryDft& dft) const {
    TrialState st;
    st.payload = random_payload(seeds.payload);
    const FbmcFrame frame = codec_.encode(st.payload);
    st.symbols = frame.symbols;
    const TimeSignal tx = synthesize(frame.symbols, proto_, dft);

    const ChannelRealization ch = cfg_.ideal_channel ? ideal_channel() : draw_channel(cfg_.pdp, seeds.channel);
    Eigen::VectorXcd prev;
    if (!cfg_.guard_interval && ch.taps() > 1)
      prev = synthesize(codec_.encode(random_payload(seeds.previous)).symbols, proto_, dft).samples;

    Rng noise_rng(seeds.noise);
    st.rx = apply_channel(tx, proto_, ch, prev, 1.0, noise_rng);
    st.freq_response = freq_response(ch, cfg_.im.n_subcarriers);
    st.demodulated[kResd] = demodulate(st.rx.main, proto_, inv_, dft);
    st.demodulated[kFd] = demodulate(st.rx.fd, proto_, inv_, dft);
    st.demodulated[kIbi] = demodulate(st.rx.ibi, proto_, inv_, dft);
    st.demodulated[kNoise] = demodulate(st.rx.noise, proto_, inv_, dft);
    return st;
  }

  TrialResult evaluate(const TrialState& st, double snr_db, UnitaryDft& dft) const {
    const ImConfig& im = cfg_.im;
    const std::size_t M = im.n_symbols, n = im.group_size;
    const double noise_var = noise_variance(snr_db);
    const double sigma = std::sqrt(noise_var);
    TrialResult t;
    t.symbols = st.symbols;
    t.freq_response = st.freq_response;

    const EqualizerConfig eq = EqualizerConfig::from(im, noise_var);
    const Eigen::VectorXcd E = equalizer_taps(t.freq_response, eq);
    t.demodulated = st.demodulated;
    t.demodulated[kNoise] *= sigma;
    for (std::size_t c = 0; c < 4; ++c) t.psi[c] = E.asDiagonal() * t.demodulated[c];
    t.psi[kResd] -= t.symbols;
    const Eigen::VectorXcd r = st.rx.main + st.rx.fd + st.rx.ibi + sigma * st.rx.noise;
    t.estimate = E.asDiagonal() * demodulate(r, proto_, inv_, dft);

    t.budget = analyzer_.budget(t.freq_response, eq, cfg_.model);

    if (!cfg_.detectors.any()) return t;

    // Detection works on unbiased estimates: MMSE outputs are divided by beta_n.
    Eigen::MatrixXcd s_hat = t.estimate;
    Eigen::MatrixXd gamma = t.budget.gamma_tot;
    if (eq.mode == EqualizerMode::kMmse) {
      for (Eigen::Index k = 0; k < s_hat.rows(); ++k) {
        const double beta = equalizer_bias(t.freq_response(k), eq);
        s_hat.row(k) /= beta;
        gamma.row(k) /= beta * beta;
      }
    }
    gamma = gamma.cwiseMax(kGammaFloor);

    const std::size_t gb = codec_.group_bits();
    std::vector<cplx> block(n);
    std::vector<double> g(n);
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t grp = 0; grp < im.n_groups(); ++grp) {
        for (std::size_t j = 0; j < n; ++j) {
          block[j] = s_hat(static_cast<Eigen::Index>(grp * n + j), static_cast<Eigen::Index>(m));
          g[j] = gamma(static_cast<Eigen::Index>(grp * n + j), static_cast<Eigen::Index>(m));
        }
        const std::size_t offset = (m * im.n_groups() + grp) * gb;
        const std::span<const std::uint8_t> truth(st.payload.bits.data() + offset, gb);
        if (im.conventional()) {
          if (detector_enabled(Detector::kMl)) count(slice_detect(block, codec_), truth, t.ber[0]);
          continue;
        }
        if (detector_enabled(Detector::kMl)) count(ml_detect(block, g, *candidates_), truth, t.ber[0]);
        if (detector_enabled(Detector::kLlr)) {
          const SubblockEstimate e = llr_detect(block, g, codec_);
          t.remapped += e.remapped ? 1 : 0;
          count(e, truth, t.ber[1]);
        }
      }
    }
    return t;
  }

  TrialResult run_trial(double snr_db, const TrialSeeds& seeds) const {
    UnitaryDft dft(cfg_.im.n_subcarriers);
    return evaluate(prepare(seeds, dft), snr_db, dft);
  }

  void accumulate(const TrialResult& t, PointMetrics& p) const {
    const Eigen::MatrixXcd interference = t.psi[kResd] + t.psi[kFd] + t.psi[kIbi];
    p.error.add((t.estimate - t.symbols).cwiseAbs2());
    p.interference.add(interference.cwiseAbs2());
    for (std::size_t c = 0; c < 4; ++c) {
      p.component[c].add(t.psi[c].cwiseAbs2());
      p.pre_equalizer[c].add(t.demodulated[c].cwiseAbs2());
    }
    p.analytic_resd.add(t.budget.gamma_resd);
    p.analytic_total.add(t.budget.gamma_tot);
    p.resd_ratio.add((t.budget.gamma_resd.array() > kAnalyticFloor)
                         .select(t.psi[kResd].cwiseAbs2().array() / t.budget.gamma_resd.array(), 0.0)
                         .matrix());
    const Eigen::MatrixXcd estimation = t.psi[kResd] + t.psi[kNoise];
    const Eigen::MatrixXcd total = t.estimate - t.symbols;
    const double power = t.symbols.squaredNorm();
    p.bias.add((estimation.array() * t.symbols.array().conjugate()).real().sum() / power);
    p.total_bias.add((total.array() * t.symbols.array().conjugate()).real().sum() / power);
    for (std::size_t d = 0; d < 2; ++d) p.ber[d].merge(t.ber[d]);
    p.remapped += t.remapped;
  }

  static constexpr double kGammaFloor = 1e-30;
  static constexpr double kAnalyticFloor = 1e-20;
  static constexpr std::size_t kChunk = 64;

 private:
  BitPayload random_payload(std::uint64_t seed) const {
    Rng rng(seed);
    BitPayload p;
    p.bits.resize(codec_.frame_bits());
    for (auto& b : p.bits) b = rng.bit();
    return p;
  }

  static void count(const SubblockEstimate& e, std::span<const std::uint8_t> truth, BitCounter& c) {
    for (std::size_t b = 0; b < truth.size(); ++b) c.errors += (e.bits[b] != truth[b]) ? 1 : 0;
    c.bits += truth.size();
  }

  ExperimentConfig cfg_;
  PrototypeFilter proto_;
  InverseFilterMatrix inv_;
  ImCodec codec_;
  InterferenceAnalyzer analyzer_;
  std::optional<CandidateSet> candidates_;
};

// Runs every SNR point. Trials are split into fixed chunks whose partial sums
// are merged in chunk order, so the result does not depend on the number of
// threads.
inline MetricTable run_sweep(const Simulator& sim) {
  const ExperimentConfig& cfg = sim.config();
  MetricTable table;
  table.config = cfg;
  if (cfg.snr_db.empty()) return table;
  const auto N = static_cast<Eigen::Index>(cfg.im.n_subcarriers);
  const auto M = static_cast<Eigen::Index>(cfg.im.n_symbols);
  const auto fresh = [&] {
    std::vector<PointMetrics> v;
    for (double snr : cfg.snr_db) v.emplace_back(snr, N, M);
    return v;
  };
  table.points = fresh();
  const std::size_t n_chunks = (cfg.trials + Simulator::kChunk - 1) / Simulator::kChunk;
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n_chunks, 1)));

  std::vector<std::vector<PointMetrics>> partial(threads);
  for (std::size_t wave = 0; wave < n_chunks; wave += threads) {
    const std::size_t in_wave = std::min<std::size_t>(threads, n_chunks - wave);
    auto work = [&](std::size_t slot) {
      std::vector<PointMetrics> acc = fresh();
      UnitaryDft dft(cfg.im.n_subcarriers);
      const std::size_t chunk = wave + slot;
      const std::size_t end = std::min(cfg.trials, (chunk + 1) * Simulator::kChunk);
      for (std::size_t trial = chunk * Simulator::kChunk; trial < end; ++trial) {
        const TrialState st = sim.prepare(TrialSeeds::of(cfg.seed, trial), dft);
        for (std::size_t k = 0; k < acc.size(); ++k) sim.accumulate(sim.evaluate(st, cfg.snr_db[k], dft), acc[k]);
      }
      partial[slot] = std::move(acc);
    };
    if (in_wave == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t s = 0; s < in_wave; ++s) pool.emplace_back(work, s);
    }
    for (std::size_t s = 0; s < in_wave; ++s)
      for (std::size_t k = 0; k < table.points.size(); ++k) table.points[k].merge(partial[s][k]);
  }
  return table;
}

inline MetricTable run_sweep(const ExperimentConfig& cfg) { return run_sweep(Simulator(cfg)); }

// Analytic vs Monte Carlo per component and SNR point.
//
// fd, ibi and noise are compared before the one-tap equalizer, where the
// average over Rayleigh channels is finite: MC mean of |[y_c]_{n,m}|^2 against
// alpha_c zeta^c_m. The resd closed form is conditional on C_n; it is checked
// through the per-trial ratio |psi_resd|^2 / gamma_resd, whose mean must be 1.
// Where gamma_resd vanishes (ZF) the MC power itself must vanish.
struct ComponentCheck {
  std::string component;
  double snr_db = 0.0;
  double max_rel_error = 0.0;
  Eigen::Index worst_n = -1, worst_m = -1;
  double mc_at_worst = 0.0, analytic_at_worst = 0.0;
  bool pass = false;
};

struct AnalyticReport {
  double tolerance = 0.05;
  std::vector<ComponentCheck> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const ComponentCheck& c) { return c.pass; });
  }
};

namespace detail {

// Entries whose analytic value is below `floor` must have MC below `floor`
// too; others are compared relatively.
inline ComponentCheck check_grid(const std::string& name, double snr, const Eigen::MatrixXd& mc,
                                 const Eigen::MatrixXd& analytic, double tol, double floor) {
  ComponentCheck c{name, snr};
  c.pass = true;
  for (Eigen::Index m = 0; m < mc.cols(); ++m) {
    for (Eigen::Index n = 0; n < mc.rows(); ++n) {
      const double a = analytic(n, m), x = mc(n, m);
      double err = 0.0;
      if (a <= floor) {
        if (x > floor) err = std::numeric_limits<double>::infinity();
      } else {
        err = std::abs(x - a) / a;
      }
      if (err >= c.max_rel_error && (c.worst_n < 0 || err > c.max_rel_error)) {
        c.max_rel_error = err;
        c.worst_n = n;
        c.worst_m = m;
        c.mc_at_worst = x;
        c.analytic_at_worst = a;
      }
    }
  }
  c.pass = c.max_rel_error <= tol;
  return c;
}

}  // namespace detail

inline AnalyticReport compare_analytic(const MetricTable& table, const InterferenceAnalyzer& analyzer,
                                       double tolerance = 0.05, double floor = Simulator::kAnalyticFloor) {
  const ExperimentConfig& cfg = table.config;
  const ImConfig& a = analyzer.config();
  if (a.n_subcarriers != cfg.im.n_subcarriers || a.n_symbols != cfg.im.n_symbols ||
      a.group_size != cfg.im.group_size || a.active_per_group != cfg.im.active_per_group ||
      a.mod_order != cfg.im.mod_order || a.overlap_factor != cfg.im.overlap_factor ||
      analyzer.guard_interval() != cfg.guard_interval)
    throw config_mismatch_error("analyzer and metric table describe different systems");

  AnalyticReport report;
  report.tolerance = tolerance;
  const auto N = static_cast<Eigen::Index>(cfg.im.n_subcarriers);
  const auto M = static_cast<Eigen::Index>(cfg.im.n_symbols);
  const auto expand = [N](const Eigen::VectorXd& per_symbol) {
    return Eigen::MatrixXd(per_symbol.transpose().replicate(N, 1));
  };
  for (const PointMetrics& p : table.points) {
    if (p.trials() == 0) continue;
    if (p.analytic_resd.mean().maxCoeff() <= floor) {
      report.checks.push_back(detail::check_grid("resd", p.snr_db, p.component[kResd].mean(),
                                                 p.analytic_resd.mean(), tolerance, floor));
    } else {
      report.checks.push_back(detail::check_grid("resd", p.snr_db, p.resd_ratio.mean(),
                                                 Eigen::MatrixXd::Ones(N, M), tolerance, floor));
    }
    report.checks.push_back(detail::check_grid("fd", p.snr_db, p.pre_equalizer[kFd].mean(),
                                               expand(analyzer.pre_equalizer_fd(cfg.model)), tolerance, floor));
    report.checks.push_back(detail::check_grid("ibi", p.snr_db, p.pre_equalizer[kIbi].mean(),
                                               expand(analyzer.pre_equalizer_ibi(cfg.model)), tolerance, floor));
    report.checks.push_back(detail::check_grid("noise", p.snr_db, p.pre_equalizer[kNoise].mean(),
                                               expand(analyzer.pre_equalizer_noise(p.noise_var)), tolerance, floor));
  }
  return report;
}

inline AnalyticReport compare_analytic(const MetricTable& table, const Simulator& sim,
                                       double tolerance = 0.05, double floor = Simulator::kAnalyticFloor) {
  return compare_analytic(table, sim.analyzer(), tolerance, floor);
}

}  // namespace fbmcim
