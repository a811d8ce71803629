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
#include <cstdint>
#include <random>

namespace fbmcim {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Stream purposes inside one trial.
enum class Stream : std::uint64_t {
  kPayload = 1,
  kChannel = 2,
  kNoise = 3,
  kPreviousBlock = 4,
};

// Seed of stream `purpose` for trial `trial` at sweep point `point`. Only
// depends on its arguments, so trials can run in any order or thread.
constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t point,
                                    std::uint64_t trial, Stream purpose) {
  return mix64(mix64(mix64(base) ^ point) ^ mix64(trial + 0x5bd1e995ull)) ^
         mix64(static_cast<std::uint64_t>(purpose));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

  double normal() { return normal_(engine_); }

  // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance = 1.0) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {s * re, s * im};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace fbmcim
