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

#include <cstdint>
#include <optional>
#include <string>

#include "fbmcim/config_file.hpp"

namespace fbmcim {

// Exit codes of the fbmcim tool.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

inline constexpr const char* kOutDirEnv = "FBMCIM_OUT_DIR";
inline constexpr const char* kDefaultOutDir = "fbmcim_out";

// Command-line values that override the config file.
struct CliOverrides {
  std::optional<std::string> snr;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> detector;
  std::optional<std::string> equalizer;
  std::optional<unsigned> threads;
  bool conventional = false;
};

inline void apply_overrides(RunSettings& s, const CliOverrides& o) {
  if (o.snr) s.snr_db = parse_snr_grid(*o.snr);
  if (o.trials) s.trials = *o.trials;
  if (o.seed) s.seed = *o.seed;
  if (o.detector) s.detectors = parse_detectors(*o.detector);
  if (o.equalizer) s.im.equalizer = parse_equalizer(*o.equalizer);
  if (o.threads) s.threads = *o.threads;
  if (o.conventional) s.im.active_per_group = s.im.group_size;
}

// --out-dir, then $FBMCIM_OUT_DIR, then the default.
inline std::string resolve_out_dir(const std::optional<std::string>& flag, const char* env_value) {
  if (flag && !flag->empty()) return *flag;
  if (env_value && *env_value) return env_value;
  return kDefaultOutDir;
}

}  // namespace fbmcim
