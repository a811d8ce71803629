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
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fbmcim/analysis.hpp"
#include "fbmcim/config.hpp"
#include "fbmcim/errors.hpp"
#include "fbmcim/harness.hpp"

namespace fbmcim {

namespace detail {

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw parameter_error(key + ": expected a number, got '" + v + "'");
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  if (!v.empty() && std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); })) {
    try {
      return std::stoull(v);
    } catch (const std::exception&) {
    }
  }
  throw parameter_error(key + ": expected a nonnegative integer, got '" + v + "'");
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw parameter_error(key + ": expected true or false, got '" + v + "'");
}

inline std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace detail

// "start:step:stop" (stop included), a comma list, or a single value.
inline std::vector<double> parse_snr_grid(const std::string& text) {
  const std::string t = detail::trim(text);
  if (t.find(':') != std::string::npos) {
    const auto parts = detail::split(t, ':');
    if (parts.size() != 3) throw parameter_error("snr range must be start:step:stop, got '" + t + "'");
    const double start = detail::parse_double("snr", parts[0]);
    const double step = detail::parse_double("snr", parts[1]);
    const double stop = detail::parse_double("snr", parts[2]);
    if (!(step > 0.0)) throw parameter_error("snr step must be positive");
    if (stop < start) throw parameter_error("snr stop must not be below start");
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
    return grid;
  }
  std::vector<double> grid;
  for (const auto& p : detail::split(t, ',')) grid.push_back(detail::parse_double("snr", p));
  if (grid.empty()) throw parameter_error("snr grid is empty");
  return grid;
}

inline DetectorSet parse_detectors(const std::string& v) {
  if (v == "ml") return {true, false};
  if (v == "llr") return {false, true};
  if (v == "both") return {true, true};
  throw parameter_error("detector must be ml, llr or both, got '" + v + "'");
}

inline EqualizerMode parse_equalizer(const std::string& v) {
  if (v == "zf") return EqualizerMode::kZeroForcing;
  if (v == "mmse") return EqualizerMode::kMmse;
  throw parameter_error("equalizer must be zf or mmse, got '" + v + "'");
}

inline InterferenceModel parse_model(const std::string& v) {
  if (v == "colored") return InterferenceModel::kColored;
  if (v == "white") return InterferenceModel::kWhite;
  throw parameter_error("analysis model must be colored or white, got '" + v + "'");
}

// Everything a config file can set. Keys are listed by entries().
struct RunSettings {
  ImConfig im;
  bool ideal_channel = false;
  std::size_t n_taps = 4;
  double decay = 1.0;
  std::vector<double> taps_db;  // overrides n_taps/decay when set
  bool guard_interval = false;
  std::vector<double> snr_db = parse_snr_grid("0:5:30");
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  DetectorSet detectors;
  unsigned threads = 0;
  InterferenceModel model = InterferenceModel::kColored;

  PowerDelayProfile pdp() const {
    return taps_db.empty() ? PowerDelayProfile::exponential(n_taps, decay) : PowerDelayProfile::from_db(taps_db);
  }

  ExperimentConfig experiment() const {
    ExperimentConfig cfg;
    cfg.im = im;
    cfg.pdp = pdp();
    cfg.ideal_channel = ideal_channel;
    cfg.guard_interval = guard_interval;
    cfg.snr_db = snr_db;
    cfg.trials = trials;
    cfg.detectors = detectors;
    cfg.seed = seed;
    cfg.model = model;
    cfg.threads = threads;
    cfg.validate();
    return cfg;
  }

  void set(const std::string& key, const std::string& value) {
    using namespace detail;
    const std::string& v = value;
    if (key == "im.n_subcarriers") im.n_subcarriers = parse_unsigned(key, v);
    else if (key == "im.n_symbols") im.n_symbols = parse_unsigned(key, v);
    else if (key == "im.group_size") im.group_size = parse_unsigned(key, v);
    else if (key == "im.active_per_group") im.active_per_group = parse_unsigned(key, v);
    else if (key == "im.mod_order") im.mod_order = parse_unsigned(key, v);
    else if (key == "im.overlap_factor") im.overlap_factor = parse_unsigned(key, v);
    else if (key == "im.equalizer") im.equalizer = parse_equalizer(v);
    else if (key == "channel.ideal") ideal_channel = parse_bool(key, v);
    else if (key == "channel.n_taps") n_taps = parse_unsigned(key, v);
    else if (key == "channel.decay") decay = parse_double(key, v);
    else if (key == "channel.taps_db") {
      taps_db.clear();
      if (!v.empty())
        for (const auto& p : split(v, ',')) taps_db.push_back(parse_double(key, p));
    }
    else if (key == "channel.guard_interval") guard_interval = parse_bool(key, v);
    else if (key == "sim.snr_db") snr_db = parse_snr_grid(v);
    else if (key == "sim.trials") trials = parse_unsigned(key, v);
    else if (key == "sim.seed") seed = parse_unsigned(key, v);
    else if (key == "sim.detector") detectors = parse_detectors(v);
    else if (key == "sim.threads") threads = static_cast<unsigned>(parse_unsigned(key, v));
    else if (key == "analysis.model") model = parse_model(v);
    else throw parameter_error("unknown config key '" + key + "'");
  }

  // Canonical key/value listing; feeding it back through set() reproduces
  // the settings.
  std::vector<std::pair<std::string, std::string>> entries() const {
    using detail::format_double;
    std::string grid, taps;
    for (std::size_t i = 0; i < snr_db.size(); ++i) grid += (i ? "," : "") + format_double(snr_db[i]);
    for (std::size_t i = 0; i < taps_db.size(); ++i) taps += (i ? "," : "") + format_double(taps_db[i]);
    return {
        {"im.n_subcarriers", std::to_string(im.n_subcarriers)},
        {"im.n_symbols", std::to_string(im.n_symbols)},
        {"im.group_size", std::to_string(im.group_size)},
        {"im.active_per_group", std::to_string(im.active_per_group)},
        {"im.mod_order", std::to_string(im.mod_order)},
        {"im.overlap_factor", std::to_string(im.overlap_factor)},
        {"im.equalizer", to_string(im.equalizer)},
        {"channel.ideal", ideal_channel ? "true" : "false"},
        {"channel.n_taps", std::to_string(n_taps)},
        {"channel.decay", format_double(decay)},
        {"channel.taps_db", taps},
        {"channel.guard_interval", guard_interval ? "true" : "false"},
        {"sim.snr_db", grid},
        {"sim.trials", std::to_string(trials)},
        {"sim.seed", std::to_string(seed)},
        {"sim.detector", to_string(detectors)},
        {"sim.threads", std::to_string(threads)},
        {"analysis.model", to_string(model)},
    };
  }
};

// Applies "key = value" lines to `settings`. '#' starts a comment.
inline void apply_config(std::istream& in, RunSettings& settings) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw parameter_error("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    try {
      settings.set(key, detail::trim(line.substr(eq + 1)));
    } catch (const parameter_error& e) {
      throw parameter_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline RunSettings parse_config(std::istream& in) {
  RunSettings s;
  apply_config(in, s);
  return s;
}

// `path` may be "default" for the built-in settings.
inline RunSettings load_config(const std::string& path) {
  if (path == "default") return RunSettings{};
  std::ifstream in(path);
  if (!in) throw parameter_error("cannot read config file '" + path + "'");
  return parse_config(in);
}

inline void write_config(std::ostream& os, const RunSettings& s) {
  for (const auto& [k, v] : s.entries()) os << k << " = " << v << "\n";
}

}  // namespace fbmcim
