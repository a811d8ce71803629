#include <gtest/gtest.h>

#include "fbmcim/detect.hpp"
#include "fbmcim/oracles.hpp"
#include "fbmcim/rng.hpp"
#include "fbmcim/stats.hpp"

using namespace fbmcim;

namespace {

ImCodec codec43() { return ImCodec(ImConfig{}); }

std::vector<cplx> scaled_points(const ImCodec& c) {
  std::vector<cplx> pts(c.constellation().points().begin(), c.constellation().points().end());
  for (auto& p : pts) p *= c.amplitude();
  return pts;
}

std::vector<cplx> column(const CandidateSet& g, std::size_t c) {
  std::vector<cplx> v(g.group_size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = g.candidate(c)(static_cast<Eigen::Index>(j));
  return v;
}

}  // namespace

TEST(CandidateSet, SizeAndConsistency) {
  const ImCodec codec = codec43();
  const CandidateSet g(codec);
  EXPECT_EQ(g.size(), 256u);
  std::vector<cplx> block(4);
  std::vector<std::uint8_t> mask(4);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto bits = g.bits(c);
    codec.encode_group(bits, block, mask);
    EXPECT_EQ(column(g, c), block) << c;
    const SubblockEstimate e = g.estimate(c);
    EXPECT_EQ(e.bits, std::vector<std::uint8_t>(bits.begin(), bits.end()));
    EXPECT_EQ(e.active.size(), 3u);
  }
  ImConfig c8;
  c8.group_size = 8;
  c8.active_per_group = 4;
  c8.mod_order = 2;
  EXPECT_EQ(CandidateSet(ImCodec(c8)).size(), 64u * 16u);
}

TEST(MlDetect, NoiselessAndCounters) {
  const ImCodec codec = codec43();
  const CandidateSet g(codec);
  DetectorCounters counters;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto B = column(g, c);
    EXPECT_EQ(ml_search(B, g, &counters), c);
  }
  EXPECT_EQ(counters.distance_evals, 256u * 256u);
  EXPECT_EQ(counters.exp_evals, 0u);
}

TEST(MlDetect, PerturbationBelowHalfMinimumDistance) {
  const ImCodec codec = codec43();
  const CandidateSet g(codec);
  double dmin = 1e9;
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = a + 1; b < g.size(); ++b) dmin = std::min(dmin, (g.candidate(a) - g.candidate(b)).norm());
  EXPECT_GT(dmin, 0.0);
  Rng rng(3);
  for (std::size_t c = 0; c < g.size(); ++c) {
    auto B = column(g, c);
    Eigen::VectorXcd e(4);
    for (auto& v : e) v = rng.complex_normal();
    e *= 0.49 * dmin / e.norm();
    for (std::size_t j = 0; j < 4; ++j) B[j] += e(static_cast<Eigen::Index>(j));
    EXPECT_EQ(ml_search(B, g), c);
  }
}

TEST(MlDetect, TiesGoToLowestCandidate) {
  const ImCodec codec = codec43();
  const CandidateSet g(codec);
  const std::vector<cplx> zero(4);
  // All-zero input is equidistant from every candidate.
  EXPECT_EQ(ml_search(zero, g), 0u);
  EXPECT_THROW(ml_search(std::vector<cplx>(3), g), dimension_error);
}

TEST(MlDetect, WeightedEqualsUnweightedForFlatVariance) {
  const ImCodec codec = codec43();
  const CandidateSet g(codec);
  Rng rng(12);
  for (int t = 0; t < 500; ++t) {
    std::vector<cplx> B(4);
    for (auto& b : B) b = rng.complex_normal(1.5);
    const std::vector<double> flat(4, 0.37);
    EXPECT_EQ(ml_detect(B, flat, g).bits, ml_detect(B, g).bits);
  }
}

TEST(LlrValues, ZeroInput) {
  const ImCodec codec = codec43();
  const auto pts = scaled_points(codec);
  const std::vector<cplx> s(4);
  const std::vector<double> g(4, 0.3);
  const auto lambda = llr_values(s, g, pts, 3);
  double lse = 0.0;
  for (cplx a : pts) lse += std::exp(-std::norm(a) / 0.3);
  for (double l : lambda) EXPECT_NEAR(l, std::log(3.0) + std::log(lse), 1e-12);
}

TEST(LlrValues, MonotoneBeyondConstellation) {
  const ImCodec codec = codec43();
  const auto pts = scaled_points(codec);
  double radius = 0.0;
  for (cplx a : pts) radius = std::max(radius, std::abs(a));
  const std::vector<double> g(1 + 1, 0.5);
  for (double angle : {0.1, 0.785, 2.0, -1.3}) {
    double last = -1e300;
    for (double r = radius; r < radius + 6.0; r += 0.05) {
      const std::vector<cplx> s = {std::polar(r, angle), cplx{}};
      const double l = llr_values(s, g, pts, 1)[0];
      EXPECT_GT(l, last);
      last = l;
    }
  }
}

TEST(LlrValues, BayesEnumeration) {
  const ImCodec codec = codec43();
  const auto pts = scaled_points(codec);
  Rng rng(44);
  std::vector<cplx> s(4);
  std::vector<double> g(4);
  for (int t = 0; t < 5000; ++t) {
    for (std::size_t j = 0; j < 4; ++j) {
      s[j] = rng.complex_normal(2.0);
      g[j] = std::exp(1.2 * rng.normal() - 1.0);
    }
    const auto lambda = llr_values(s, g, pts, 3);
    for (std::size_t j = 0; j < 4; ++j) {
      const double bayes = oracle::bayes_activity_log_odds(s[j], g[j], pts, 4, 3);
      // Bayes uses the per-point prior (k/n)/M; the LLR omits the 1/M.
      EXPECT_NEAR(lambda[j] - std::log(4.0), bayes, 1e-9 * std::max(1.0, std::abs(bayes)));
    }
    std::vector<double> shifted = lambda;
    for (auto& l : shifted) l -= 3.75;
    EXPECT_EQ(top_k(lambda, 3), top_k(shifted, 3));
  }
}

TEST(LlrValues, HighNoiseLimit) {
  const ImCodec codec = codec43();
  const auto pts = scaled_points(codec);
  const std::vector<cplx> s = {{0.3, 0.1}, {-1.0, 0.2}, {0.0, 0.0}, {2.0, -2.0}};
  const std::vector<double> g(4, 1e12);
  for (double l : llr_values(s, g, pts, 3)) EXPECT_NEAR(l, std::log(3.0) + std::log(4.0), 1e-9);
  const auto e = llr_detect(s, g, codec);
  EXPECT_TRUE(codec.table().find(e.active).has_value());
}

TEST(LlrValues, Errors) {
  const ImCodec codec = codec43();
  const auto pts = scaled_points(codec);
  const std::vector<cplx> s(4);
  EXPECT_THROW(llr_values(s, std::vector<double>(4, 1.0), pts, 4), detector_error);
  EXPECT_THROW(llr_values(s, std::vector<double>(4, 0.0), pts, 3), detector_error);
  EXPECT_THROW(llr_values(s, std::vector<double>(3, 1.0), pts, 3), dimension_error);
  ImConfig conv;
  conv.active_per_group = 4;
  const ImCodec c44(conv);
  EXPECT_THROW(llr_detect(s, std::vector<double>(4, 1.0), c44), detector_error);
  EXPECT_THROW(slice_detect(s, codec), detector_error);
  EXPECT_EQ(slice_detect(s, c44).bits.size(), 8u);
}

TEST(LlrDetect, NoiselessEqualsMlOnAllCandidates) {
  const ImCodec codec = codec43();
  const CandidateSet g(codec);
  const std::vector<double> gamma(4, 1e-2);
  DetectorCounters counters;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto B = column(g, c);
    const auto llr = llr_detect(B, gamma, codec, &counters);
    const auto ml = ml_detect(B, g);
    EXPECT_EQ(llr.bits, ml.bits);
    EXPECT_EQ(llr.active, ml.active);
    EXPECT_EQ(llr.labels, ml.labels);
    EXPECT_FALSE(llr.remapped);
  }
  // M exponentials per subcarrier, n subcarriers per subblock.
  EXPECT_EQ(counters.exp_evals, 256u * 4u * 4u);
  EXPECT_EQ(counters.distance_evals, 0u);
}

TEST(LlrDetect, RemapsIllegalSet) {
  ImConfig cfg;
  cfg.active_per_group = 2;  // 4 of the 6 pairs are legal
  const ImCodec codec(cfg);
  // Energy on positions 2 and 3: top-2 is {2,3}, not in the table.
  const std::vector<cplx> s = {{0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}, {1.0, -1.0}};
  const auto e = llr_detect(s, std::vector<double>(4, 0.1), codec);
  EXPECT_TRUE(e.remapped);
  EXPECT_EQ(e.active, (IndexSet{0, 2}));
  EXPECT_EQ(e.bits.size(), codec.group_bits());
}

TEST(LlrDetect, Deterministic) {
  const ImCodec codec = codec43();
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    std::vector<cplx> s(4);
    for (auto& v : s) v = rng.complex_normal();
    const std::vector<double> g(4, 0.5);
    const auto a = llr_detect(s, g, codec), b = llr_detect(s, g, codec);
    EXPECT_EQ(a.bits, b.bits);
  }
  EXPECT_EQ(top_k(std::vector<double>{1.0, 2.0, 2.0, 2.0}, 2), (IndexSet{1, 2}));
}

TEST(Detectors, MlIsOptimal) {
  // Candidate + Gaussian noise: ML block error rate is never above LLR's.
  const ImCodec codec = codec43();
  const CandidateSet g(codec);
  Rng rng(101);
  for (double var : {0.05, 0.2, 0.5}) {
    BitCounter ml_err, llr_err;
    const std::vector<double> gamma(4, var);
    for (int t = 0; t < 20000; ++t) {
      const std::size_t c = static_cast<std::size_t>(rng.engine()() % g.size());
      auto B = column(g, c);
      for (auto& b : B) b += rng.complex_normal(var);
      ml_err.errors += ml_search(B, g) != c;
      ml_err.bits += 1;
      const auto e = llr_detect(B, gamma, codec);
      const auto want = g.bits(c);
      llr_err.errors += !std::equal(e.bits.begin(), e.bits.end(), want.begin(), want.end());
      llr_err.bits += 1;
    }
    EXPECT_LE(ml_err.ci95().low, llr_err.ci95().high) << var;
  }
}
