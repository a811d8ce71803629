// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fbmcim Authors

// fbmcim: run FBMC/QAM-IM Monte Carlo sweeps, print analytic interference
// budgets and run the oracle self-test.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbmcim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fbmcim;

namespace {

std::string iso_time_utc(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json settings_json(const RunSettings& s) {
  json j = json::object();
  for (const auto& [k, v] : s.entries()) j[k] = v;
  return j;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("error writing " + path.string());
}

struct RunArgs {
  std::string config = "default";
  std::optional<std::string> out_dir;
  CliOverrides overrides;
};

int cmd_run(const RunArgs& args, const std::vector<std::string>& argv) {
  RunSettings settings = load_config(args.config);
  apply_overrides(settings, args.overrides);
  const ExperimentConfig cfg = settings.experiment();
  const fs::path dir = resolve_out_dir(args.out_dir, std::getenv(kOutDirEnv));

  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  const Simulator sim(cfg);
  const MetricTable table = run_sweep(sim);
  const AnalyticReport report = compare_analytic(table, sim);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(dir);
  std::vector<std::string> outputs;
  const auto emit = [&](const std::string& name, const std::string& text) {
    write_file(dir / name, text);
    outputs.push_back((dir / name).string());
  };
  for (Metric m : {Metric::kMse, Metric::kSinr, Metric::kSir}) {
    std::ostringstream os;
    write_metric_csv(os, table, m);
    emit(std::string(to_string(m)) + ".csv", os.str());
  }
  {
    std::ostringstream os;
    write_ber_csv(os, table, sim);
    emit("ber.csv", os.str());
  }

  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"component", c.component},
                      {"snr_db", c.snr_db},
                      {"max_rel_error", c.max_rel_error},
                      {"worst_m", c.worst_m},
                      {"worst_n", c.worst_n},
                      {"pass", c.pass}});
  json manifest = {
      {"tool", "fbmcim"},
      {"version", FBMCIM_VERSION},
      {"command", argv},
      {"config_source", args.config},
      {"config", settings_json(settings)},
      {"seeds",
       {{"base", cfg.seed},
        {"derivation", "stream_seed(base, 0, trial, purpose), purpose: payload=1 channel=2 noise=3 previous_block=4"}}},
      {"csv_schema_version", kCsvSchemaVersion},
      {"csv_schema",
       {{"mse.csv", kMetricHeader}, {"sinr.csv", kMetricHeader}, {"sir.csv", kMetricHeader}, {"ber.csv", kBerHeader}}},
      {"outputs", outputs},
      {"started_at", iso_time_utc(started)},
      {"wall_clock_s", wall},
      {"analytic_check", {{"tolerance", report.tolerance}, {"pass", report.pass()}, {"checks", checks}}},
  };
  emit("manifest.json", manifest.dump(2) + "\n");

  std::printf("%-8s %-9s %-14s %-26s %s\n", "snr_db", "detector", "ber", "95% ci", "bits");
  for (const auto& p : table.points)
    for (Detector d : {Detector::kMl, Detector::kLlr}) {
      if (!sim.detector_enabled(d)) continue;
      const auto& c = p.ber[static_cast<std::size_t>(d)];
      std::printf("%-8g %-9s %-14.6e [%.4e, %.4e]   %llu\n", p.snr_db, to_string(d), c.rate(), c.ci95().low,
                  c.ci95().high, static_cast<unsigned long long>(c.bits));
    }
  std::printf("analytic vs Monte Carlo (%.0f%% tolerance): %s\n", 100.0 * report.tolerance,
              report.pass() ? "match" : "mismatch");
  std::printf("wrote %zu files to %s (%.1f s)\n", outputs.size(), dir.string().c_str(), wall);
  return kExitOk;
}

struct BudgetArgs {
  std::string config = "default";
  std::optional<std::string> snr;
  std::optional<std::string> equalizer;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool conventional = false;
  bool unit_channel = false;
};

int cmd_budget(const BudgetArgs& args) {
  RunSettings settings = load_config(args.config);
  CliOverrides o;
  o.snr = args.snr;
  o.equalizer = args.equalizer;
  o.seed = args.seed;
  o.conventional = args.conventional;
  apply_overrides(settings, o);
  const ExperimentConfig cfg = settings.experiment();
  if (cfg.snr_db.empty()) throw parameter_error("budget needs an SNR");
  const double snr = cfg.snr_db.front();

  const Simulator sim(cfg);
  ChannelRealization ch = ideal_channel();
  if (!cfg.ideal_channel && !args.unit_channel)
    ch = draw_channel(cfg.pdp, TrialSeeds::of(cfg.seed, 0).channel);
  const Eigen::VectorXcd C = freq_response(ch, cfg.im.n_subcarriers);
  const EqualizerConfig eq = EqualizerConfig::from(cfg.im, noise_variance(snr));
  const InterferenceBudget b = sim.analyzer().budget(C, eq, cfg.model);
  const PowerDelayProfile pdp = sim.active_pdp();
  const double fd_unit = alpha_fd(sim.prototype(), pdp, cfg.im, 1.0);
  const double ibi_unit = cfg.guard_interval ? 0.0 : alpha_ibi(sim.prototype(), pdp, cfg.im, 1.0);

  std::ostringstream os;
  write_budget_csv(os, b, fd_unit, ibi_unit);
  std::cout << os.str();
  if (args.out_dir || std::getenv(kOutDirEnv)) {
    const fs::path dir = resolve_out_dir(args.out_dir, std::getenv(kOutDirEnv));
    fs::create_directories(dir);
    write_file(dir / "budget.csv", os.str());
    std::cerr << "wrote " << (dir / "budget.csv").string() << "\n";
  }
  return kExitOk;
}

int cmd_selftest(bool inject_fault) {
  SelftestOptions opt;
  opt.corrupt_lookup_table = inject_fault;
  const auto t0 = std::chrono::steady_clock::now();
  const auto cases = run_selftest(opt);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::size_t failed = 0;
  for (const auto& c : cases) {
    std::printf("%s  %s (%s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    failed += c.pass ? 0 : 1;
  }
  std::printf("%zu/%zu passed in %.2f s\n", cases.size() - failed, cases.size(), wall);
  return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FBMC/QAM with index modulation: Monte Carlo sweeps, interference budgets, self-test"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FBMCIM_VERSION);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a Monte Carlo sweep and write CSV files and a manifest");
  run_cmd->add_option("--config", run.config, "Config file, or 'default'");
  run_cmd->add_option("--snr", run.overrides.snr, "SNR grid in dB, start:step:stop or a comma list");
  run_cmd->add_option("--trials", run.overrides.trials, "Blocks per SNR point")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.overrides.seed, "Base seed");
  run_cmd->add_option("--detector", run.overrides.detector, "ml, llr or both")
      ->check(CLI::IsMember({"ml", "llr", "both"}));
  run_cmd->add_option("--equalizer", run.overrides.equalizer, "zf or mmse")->check(CLI::IsMember({"zf", "mmse"}));
  run_cmd->add_option("--threads", run.overrides.threads, "Worker threads, 0 for all cores");
  run_cmd->add_flag("--conventional", run.overrides.conventional, "Plain FBMC/QAM baseline (k = n)");
  run_cmd->add_option("--out-dir", run.out_dir, std::string("Output directory (default $") + kOutDirEnv + " or " +
                                                    kDefaultOutDir + ")");

  BudgetArgs budget;
  auto* budget_cmd = app.add_subcommand("budget", "Print the analytic interference budget as CSV");
  budget_cmd->add_option("--config", budget.config, "Config file, or 'default'");
  budget_cmd->add_option("--snr", budget.snr, "SNR in dB (the first grid point is used)");
  budget_cmd->add_option("--equalizer", budget.equalizer, "zf or mmse")->check(CLI::IsMember({"zf", "mmse"}));
  budget_cmd->add_option("--seed", budget.seed, "Seed of the channel realization");
  budget_cmd->add_flag("--conventional", budget.conventional, "Plain FBMC/QAM baseline (k = n)");
  budget_cmd->add_flag("--unit-channel", budget.unit_channel, "Use C_n = 1 instead of a drawn channel");
  budget_cmd->add_option("--out-dir", budget.out_dir, "Also write budget.csv here");

  bool inject_fault = false;
  auto* selftest_cmd = app.add_subcommand("selftest", "Compare structured code paths against dense oracles");
  selftest_cmd->add_flag("--inject-table-fault", inject_fault, "Corrupt the lookup table (checks the checker)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run, std::vector<std::string>(argv, argv + argc));
    if (*budget_cmd) return cmd_budget(budget);
    if (*selftest_cmd) return cmd_selftest(inject_fault);
  } catch (const parameter_error& e) {
    std::cerr << "fbmcim: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "fbmcim: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
