#include <gtest/gtest.h>

#include <sstream>

#include "fbmcim/cli.hpp"
#include "fbmcim/selftest.hpp"

using namespace fbmcim;

TEST(ConfigFile, Defaults) {
  const RunSettings s = load_config("default");
  EXPECT_EQ(s.im.n_subcarriers, 64u);
  EXPECT_EQ(s.im.active_per_group, 3u);
  EXPECT_EQ(s.snr_db, (std::vector<double>{0, 5, 10, 15, 20, 25, 30}));
  EXPECT_EQ(s.trials, 10000u);
  EXPECT_EQ(s.pdp().taps(), 4u);
}

TEST(ConfigFile, Parse) {
  std::istringstream in(R"(# comment
im.active_per_group = 4
im.equalizer = mmse   # trailing comment
channel.taps_db = 0, -3, -6
sim.snr_db = 0:10:30
sim.detector = llr

analysis.model = white
)");
  const RunSettings s = parse_config(in);
  EXPECT_EQ(s.im.active_per_group, 4u);
  EXPECT_EQ(s.im.equalizer, EqualizerMode::kMmse);
  EXPECT_EQ(s.pdp().taps(), 3u);
  EXPECT_EQ(s.snr_db, (std::vector<double>{0, 10, 20, 30}));
  EXPECT_FALSE(s.detectors.ml);
  EXPECT_TRUE(s.detectors.llr);
  EXPECT_EQ(s.model, InterferenceModel::kWhite);
}

TEST(ConfigFile, Errors) {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  EXPECT_THROW(parse("im.bogus = 3"), parameter_error);
  EXPECT_THROW(parse("sim.trials = -4"), parameter_error);
  EXPECT_THROW(parse("sim.trials"), parameter_error);
  EXPECT_THROW(parse("im.equalizer = lms"), parameter_error);
  EXPECT_THROW(parse("sim.snr_db = 0:0:10"), parameter_error);
  try {
    parse("\n\nsim.seed = x\n");
    FAIL();
  } catch (const parameter_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(load_config("/nonexistent/fbmcim.cfg"), parameter_error);
  RunSettings s;
  s.im.group_size = 5;
  EXPECT_THROW(s.experiment(), parameter_error);
}

TEST(ConfigFile, SnrGrid) {
  EXPECT_EQ(parse_snr_grid("0:5:30").size(), 7u);
  EXPECT_THROW(parse_snr_grid("30:-10:0"), parameter_error);
  EXPECT_THROW(parse_snr_grid("30:10:0"), parameter_error);
  EXPECT_EQ(parse_snr_grid("3, 7.5"), (std::vector<double>{3, 7.5}));
  EXPECT_EQ(parse_snr_grid("12"), (std::vector<double>{12}));
  EXPECT_EQ(parse_snr_grid("0:0.1:0.3").size(), 4u);
}

TEST(ConfigFile, WriteReadRoundtrip) {
  RunSettings s;
  s.im.equalizer = EqualizerMode::kMmse;
  s.taps_db = {0.0, -2.5};
  s.snr_db = {1.5, 2.0};
  s.seed = 1234567890123ull;
  s.detectors = {true, false};
  std::stringstream io;
  write_config(io, s);
  const RunSettings back = parse_config(io);
  EXPECT_EQ(back.entries(), s.entries());
}

TEST(Cli, OverridesBeatConfig) {
  std::istringstream in("sim.trials = 50\nsim.seed = 4\nim.equalizer = zf\nsim.snr_db = 0\n");
  RunSettings s = parse_config(in);
  CliOverrides o;
  o.trials = 7;
  o.equalizer = "mmse";
  o.snr = "5:5:15";
  o.conventional = true;
  apply_overrides(s, o);
  EXPECT_EQ(s.trials, 7u);
  EXPECT_EQ(s.seed, 4u);  // not overridden
  EXPECT_EQ(s.im.equalizer, EqualizerMode::kMmse);
  EXPECT_EQ(s.snr_db, (std::vector<double>{5, 10, 15}));
  EXPECT_EQ(s.im.active_per_group, s.im.group_size);
}

TEST(Cli, OutDirPrecedence) {
  EXPECT_EQ(resolve_out_dir(std::string("a"), "b"), "a");
  EXPECT_EQ(resolve_out_dir(std::nullopt, "b"), "b");
  EXPECT_EQ(resolve_out_dir(std::nullopt, nullptr), kDefaultOutDir);
  EXPECT_EQ(resolve_out_dir(std::nullopt, ""), kDefaultOutDir);
}

TEST(Selftest, AllPass) {
  for (const auto& c : run_selftest()) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
}

TEST(Selftest, CorruptTableIsCaught) {
  SelftestOptions opt;
  opt.corrupt_lookup_table = true;
  bool roundtrip_failed = false;
  for (const auto& c : run_selftest(opt))
    if (c.name.find("roundtrip") != std::string::npos) roundtrip_failed = !c.pass;
  EXPECT_TRUE(roundtrip_failed);
}
