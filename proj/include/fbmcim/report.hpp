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
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "fbmcim/harness.hpp"
#include "fbmcim/stats.hpp"

namespace fbmcim {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kMetricHeader = "snr_db,m,n,value,ci_low,ci_high";
inline constexpr const char* kBerHeader = "snr_db,m,n,value,ci_low,ci_high,detector,errors,bits";

enum class Metric { kMse, kSinr, kSir };

inline const char* to_string(Metric m) {
  switch (m) {
    case Metric::kMse: return "mse";
    case Metric::kSinr: return "sinr";
    case Metric::kSir: return "sir";
  }
  return "?";
}

// Mean and 95% interval of a metric cell. SINR and SIR are delta^2 over the
// mean error power, so their interval is the inverted error interval.
struct MetricValue {
  double value = 0.0;
  Interval ci;
};

namespace detail {

inline MetricValue ratio_of(double power, double mean, double half) {
  const double inf = std::numeric_limits<double>::infinity();
  const double lo = mean - half, hi = mean + half;
  return {mean > 0.0 ? power / mean : inf, {hi > 0.0 ? power / hi : inf, lo > 0.0 ? power / lo : inf}};
}

inline MetricValue metric_of(Metric metric, double power, double mean, double se) {
  const double half = 1.96 * se;
  if (metric == Metric::kMse) return {mean, {mean - half, mean + half}};
  return ratio_of(power, mean, half);
}

}  // namespace detail

// Per-(m, n) value of `metric` at one SNR point.
inline MetricValue metric_cell(const PointMetrics& p, Metric metric, double active_power, Eigen::Index n,
                               Eigen::Index m) {
  const MeanGrid& g = metric == Metric::kSir ? p.interference : p.error;
  return detail::metric_of(metric, active_power, g.mean()(n, m), g.stderr_of_mean()(n, m));
}

// Value of `metric` for symbol m with the error power averaged over
// subcarriers. The interval treats the subcarrier mean of a trial as one
// sample only approximately (subcarriers are correlated), so it is based on
// the widest per-cell standard error.
inline MetricValue metric_symbol(const PointMetrics& p, Metric metric, double active_power, Eigen::Index m) {
  const MeanGrid& g = metric == Metric::kSir ? p.interference : p.error;
  const double mean = g.mean().col(m).mean();
  const double se = g.stderr_of_mean().col(m).maxCoeff();
  return detail::metric_of(metric, active_power, mean, se);
}

// One row per (snr, m, n); rows with n = -1 hold the subcarrier average of
// symbol m.
inline void write_metric_csv(std::ostream& os, const MetricTable& table, Metric metric) {
  const double power = table.config.im.active_power();
  os << kMetricHeader << "\n";
  os.precision(10);
  for (const PointMetrics& p : table.points) {
    if (p.trials() == 0) continue;
    const Eigen::Index N = p.error.sum.rows(), M = p.error.sum.cols();
    for (Eigen::Index m = 0; m < M; ++m) {
      for (Eigen::Index n = 0; n < N; ++n) {
        const MetricValue v = metric_cell(p, metric, power, n, m);
        os << p.snr_db << "," << m << "," << n << "," << v.value << "," << v.ci.low << "," << v.ci.high << "\n";
      }
      const MetricValue v = metric_symbol(p, metric, power, m);
      os << p.snr_db << "," << m << ",-1," << v.value << "," << v.ci.low << "," << v.ci.high << "\n";
    }
  }
}

// Block-level BER per detector (m = n = -1) with 95% Wilson intervals.
inline void write_ber_csv(std::ostream& os, const MetricTable& table, const Simulator& sim) {
  os << kBerHeader << "\n";
  os.precision(10);
  for (const PointMetrics& p : table.points) {
    for (Detector d : {Detector::kMl, Detector::kLlr}) {
      if (!sim.detector_enabled(d)) continue;
      const BitCounter& c = p.ber[static_cast<std::size_t>(d)];
      const Interval ci = c.ci95();
      os << p.snr_db << ",-1,-1," << c.rate() << "," << ci.low << "," << ci.high << "," << to_string(d) << ","
         << c.errors << "," << c.bits << "\n";
    }
  }
}

}  // namespace fbmcim
