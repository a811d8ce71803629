#include <gtest/gtest.h>

#include <sstream>

#include "fbmcim/harness.hpp"
#include "fbmcim/report.hpp"

using namespace fbmcim;

namespace {

ExperimentConfig quick(std::size_t trials = 40) {
  ExperimentConfig cfg;
  cfg.im.n_subcarriers = 32;
  cfg.im.n_symbols = 6;
  cfg.trials = trials;
  cfg.snr_db = {0.0, 20.0};
  cfg.seed = 9;
  return cfg;
}

void expect_same(const MetricTable& a, const MetricTable& b) {
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const PointMetrics &p = a.points[i], &q = b.points[i];
    EXPECT_EQ(p.error.sum, q.error.sum);
    EXPECT_EQ(p.error.sumsq, q.error.sumsq);
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_EQ(p.component[c].sum, q.component[c].sum);
      EXPECT_EQ(p.pre_equalizer[c].sum, q.pre_equalizer[c].sum);
    }
    EXPECT_EQ(p.bias.sum, q.bias.sum);
    for (std::size_t d = 0; d < 2; ++d) {
      EXPECT_EQ(p.ber[d].errors, q.ber[d].errors);
      EXPECT_EQ(p.ber[d].bits, q.ber[d].bits);
    }
  }
}

}  // namespace

TEST(Stats, Wilson) {
  const Interval a = wilson_interval(0, 100);
  EXPECT_EQ(a.low, 0.0);
  EXPECT_NEAR(a.high, 0.037, 5e-4);
  const Interval b = wilson_interval(50, 100);
  EXPECT_NEAR(b.low, 0.4038, 1e-4);
  EXPECT_NEAR(b.high, 0.5962, 1e-4);
  EXPECT_TRUE(a.overlaps({0.03, 0.5}));
  EXPECT_FALSE(a.overlaps(b));
}

TEST(Stats, MeanScalar) {
  MeanScalar s, t;
  for (double x : {1.0, 2.0, 3.0}) s.add(x);
  t.add(4.0);
  s.merge(t);
  EXPECT_DOUBLE_EQ(s.mean(), 2.5);
  EXPECT_NEAR(s.stderr_of_mean(), std::sqrt(5.0 / 3.0 / 4.0), 1e-12);
}

TEST(Harness, Reproducible) {
  const auto cfg = quick();
  expect_same(run_sweep(cfg), run_sweep(cfg));
  auto other = cfg;
  other.seed = 10;
  EXPECT_NE(run_sweep(cfg).points[0].error.sum, run_sweep(other).points[0].error.sum);
}

TEST(Harness, ThreadCountDoesNotMatter) {
  auto cfg = quick(150);  // several chunks, last one partial
  cfg.threads = 1;
  const MetricTable serial = run_sweep(cfg);
  for (unsigned t : {2u, 3u, 8u}) {
    cfg.threads = t;
    expect_same(serial, run_sweep(cfg));
  }
}

TEST(Harness, EmptyGrid) {
  auto cfg = quick();
  cfg.snr_db.clear();
  const MetricTable t = run_sweep(cfg);
  EXPECT_TRUE(t.points.empty());
}

TEST(Harness, InvalidConfig) {
  auto cfg = quick();
  cfg.trials = 0;
  EXPECT_THROW(run_sweep(cfg), parameter_error);
  cfg = quick();
  cfg.pdp = PowerDelayProfile::exponential(40);
  EXPECT_THROW(Simulator{cfg}, parameter_error);
}

TEST(Harness, IdealChannelNoiseless) {
  auto cfg = quick(5);
  cfg.ideal_channel = true;
  cfg.snr_db = {std::numeric_limits<double>::infinity()};
  const Simulator sim(cfg);
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const TrialResult r = sim.run_trial(cfg.snr_db[0], TrialSeeds::of(cfg.seed, trial));
    EXPECT_LT(10.0 * std::log10((r.estimate - r.symbols).cwiseAbs2().maxCoeff()), -200.0);
    EXPECT_EQ(r.ber[0].errors, 0u);
    EXPECT_EQ(r.ber[1].errors, 0u);
    EXPECT_EQ(r.ber[0].bits, sim.codec().frame_bits());
  }
}

TEST(Harness, SameSeedsSameTrial) {
  const Simulator sim(quick());
  const auto seeds = TrialSeeds::of(3, 17);
  const TrialResult a = sim.run_trial(10.0, seeds), b = sim.run_trial(10.0, seeds);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.ber[0].errors, b.ber[0].errors);
}

TEST(Harness, ComponentsAddUp) {
  auto cfg = quick();
  for (EqualizerMode mode : {EqualizerMode::kZeroForcing, EqualizerMode::kMmse}) {
    cfg.im.equalizer = mode;
    const Simulator sim(cfg);
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
      const TrialResult r = sim.run_trial(15.0, TrialSeeds::of(cfg.seed, trial));
      const Eigen::MatrixXcd sum = r.psi[kResd] + r.psi[kFd] + r.psi[kIbi] + r.psi[kNoise];
      EXPECT_LT((sum - (r.estimate - r.symbols)).cwiseAbs().maxCoeff(), 1e-10);
      if (mode == EqualizerMode::kZeroForcing) {
        EXPECT_LT(r.psi[kResd].cwiseAbs().maxCoeff(), 1e-9);
      }
    }
  }
}

TEST(Harness, ComponentPowersAddUpUnderZeroForcing) {
  // Uncorrelated components: cross terms vanish on average, not per block.
  // Compared before the one-tap equalizer, since E|1/C_n|^2 is unbounded for
  // Rayleigh fading and equalized averages never settle.
  auto cfg = quick();
  cfg.detectors = {false, false};
  const Simulator sim(cfg);
  UnitaryDft dft(cfg.im.n_subcarriers);
  for (double snr : {0.0, 15.0, 30.0}) {
    double parts = 0.0, total = 0.0;
    for (std::uint64_t trial = 0; trial < 400; ++trial) {
      const TrialResult r = sim.evaluate(sim.prepare(TrialSeeds::of(cfg.seed, trial), dft), snr, dft);
      const Eigen::MatrixXcd interference = r.demodulated[kFd] + r.demodulated[kIbi] + r.demodulated[kNoise];
      for (std::size_t c = kFd; c <= kNoise; ++c) parts += r.demodulated[c].squaredNorm();
      total += interference.squaredNorm();
    }
    EXPECT_NEAR(parts / total, 1.0, 0.05) << snr;
  }
}

TEST(Harness, BerCountsAndIntervals) {
  const auto cfg = quick();
  const Simulator sim(cfg);
  const MetricTable t = run_sweep(sim);
  for (const auto& p : t.points) {
    EXPECT_EQ(p.trials(), cfg.trials);
    for (Detector d : {Detector::kMl, Detector::kLlr}) {
      const BitCounter& c = p.ber[static_cast<std::size_t>(d)];
      EXPECT_EQ(c.bits, cfg.trials * sim.codec().frame_bits());
      EXPECT_GE(c.rate(), 0.0);
      EXPECT_LE(c.rate(), 1.0);
      EXPECT_LE(c.ci95().low, c.rate());
      EXPECT_GE(c.ci95().high, c.rate());
    }
  }
  EXPECT_LT(t.points[1].ber[0].rate(), t.points[0].ber[0].rate());
}

TEST(Harness, ConventionalUsesSlicer) {
  auto cfg = quick();
  cfg.im.active_per_group = 4;
  const Simulator sim(cfg);
  EXPECT_TRUE(sim.detector_enabled(Detector::kMl));
  EXPECT_FALSE(sim.detector_enabled(Detector::kLlr));
  const MetricTable t = run_sweep(sim);
  EXPECT_GT(t.points[0].ber[0].bits, 0u);
  EXPECT_EQ(t.points[0].ber[1].bits, 0u);
}

TEST(Harness, IdealChannelNoiseMatchesAnalytic) {
  auto cfg = quick(2000);
  cfg.ideal_channel = true;
  cfg.detectors = {false, false};
  cfg.snr_db = {5.0};
  const Simulator sim(cfg);
  const MetricTable t = run_sweep(sim);
  const PointMetrics& p = t.points[0];
  const Eigen::VectorXd want = sim.analyzer().pre_equalizer_noise(p.noise_var);
  const Eigen::MatrixXd mc = p.pre_equalizer[kNoise].mean();
  for (Eigen::Index m = 0; m < mc.cols(); ++m) EXPECT_NEAR(mc.col(m).mean() / want(m), 1.0, 0.03) << m;
  // Equalized noise as well: E = 1 on the ideal channel.
  const Eigen::MatrixXd eq = p.component[kNoise].mean();
  for (Eigen::Index m = 0; m < eq.cols(); ++m) EXPECT_NEAR(eq.col(m).mean() / want(m), 1.0, 0.03) << m;
  EXPECT_EQ(p.component[kFd].mean().maxCoeff(), 0.0);
  EXPECT_EQ(p.component[kIbi].mean().maxCoeff(), 0.0);
}

TEST(Harness, CompareAnalyticRejectsMismatch) {
  const auto cfg = quick(8);
  const MetricTable t = run_sweep(cfg);
  auto other = cfg;
  other.im.active_per_group = 2;
  EXPECT_THROW(compare_analytic(t, Simulator(other)), config_mismatch_error);
  const AnalyticReport r = compare_analytic(t, Simulator(cfg));
  EXPECT_EQ(r.checks.size(), 4 * cfg.snr_db.size());
  for (const auto& c : r.checks) {
    if (c.component == "resd") {
      EXPECT_TRUE(c.pass);  // ZF: no residual at all
    }
  }
}

TEST(Report, MetricCsv) {
  const auto cfg = quick(10);
  const Simulator sim(cfg);
  const MetricTable t = run_sweep(sim);
  for (Metric m : {Metric::kMse, Metric::kSinr, Metric::kSir}) {
    std::ostringstream os;
    write_metric_csv(os, t, m);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, kMetricHeader);
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, cfg.snr_db.size() * cfg.im.n_symbols * (cfg.im.n_subcarriers + 1));
  }
  std::ostringstream os;
  write_ber_csv(os, t, sim);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), kBerHeader);
  const MetricValue v = metric_cell(t.points[0], Metric::kSinr, cfg.im.active_power(), 0, 0);
  EXPECT_NEAR(v.value, cfg.im.active_power() / t.points[0].error.mean()(0, 0), 1e-12);
  EXPECT_LE(v.ci.low, v.value);
  EXPECT_GE(v.ci.high, v.value);
}
