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
#include <limits>

#include <Eigen/Dense>

namespace fbmcim {

struct Interval {
  double low = 0.0;
  double high = 0.0;

  bool overlaps(const Interval& o) const { return low <= o.high && o.low <= high; }
};

// Wilson score interval for a binomial proportion (z = 1.96 is 95%).
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// Running sums of a matrix-valued sample; merge() is plain addition.
struct MeanGrid {
  Eigen::MatrixXd sum;
  Eigen::MatrixXd sumsq;
  std::uint64_t count = 0;

  MeanGrid() = default;
  MeanGrid(Eigen::Index rows, Eigen::Index cols)
      : sum(Eigen::MatrixXd::Zero(rows, cols)), sumsq(Eigen::MatrixXd::Zero(rows, cols)) {}

  void add(const Eigen::MatrixXd& x) {
    sum += x;
    sumsq += x.cwiseAbs2();
    ++count;
  }

  void merge(const MeanGrid& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    count += o.count;
  }

  Eigen::MatrixXd mean() const { return count ? Eigen::MatrixXd(sum / static_cast<double>(count)) : sum; }

  // Standard error of the mean per entry.
  Eigen::MatrixXd stderr_of_mean() const {
    if (count < 2) return Eigen::MatrixXd::Constant(sum.rows(), sum.cols(), std::numeric_limits<double>::infinity());
    const double n = static_cast<double>(count);
    Eigen::MatrixXd var = (sumsq / n - (sum / n).cwiseAbs2()) * (n / (n - 1.0));
    return var.cwiseMax(0.0).cwiseSqrt() / std::sqrt(n);
  }
};

// Scalar version of MeanGrid.
struct MeanScalar {
  double sum = 0.0, sumsq = 0.0;
  std::uint64_t count = 0;

  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++count;
  }
  void merge(const MeanScalar& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    count += o.count;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
  double stderr_of_mean() const {
    if (count < 2) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(count);
    const double var = std::max(0.0, (sumsq / n - mean() * mean()) * n / (n - 1.0));
    return std::sqrt(var / n);
  }
  Interval ci95() const {
    const double h = 1.96 * stderr_of_mean();
    return {mean() - h, mean() + h};
  }
};

struct BitCounter {
  std::uint64_t errors = 0;
  std::uint64_t bits = 0;

  void merge(const BitCounter& o) {
    errors += o.errors;
    bits += o.bits;
  }
  double rate() const { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
  Interval ci95() const { return wilson_interval(errors, bits); }
};

}  // namespace fbmcim
