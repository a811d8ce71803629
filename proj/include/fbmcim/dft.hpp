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
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace fbmcim {

// Power-normalized N-point DFT (F) and its inverse (F^H).
// Not thread-safe: the FFT plan cache is mutable. Use one per worker.
class UnitaryDft {
 public:
  explicit UnitaryDft(std::size_t n) : n_(n), norm_(1.0 / std::sqrt(static_cast<double>(n))) {
    fft_.SetFlag(Eigen::FFT<double>::Unscaled);
    in_.resize(n);
    out_.resize(n);
  }

  std::size_t size() const { return n_; }

  template <typename In, typename Out>
  void forward(const In& x, Out&& y) {
    run(x, y, false);
  }

  template <typename In, typename Out>
  void inverse(const In& x, Out&& y) {
    run(x, y, true);
  }

 private:
  template <typename In, typename Out>
  void run(const In& x, Out& y, bool inv) {
    for (std::size_t i = 0; i < n_; ++i) in_[i] = x(static_cast<Eigen::Index>(i));
    if (inv)
      fft_.inv(out_, in_);
    else
      fft_.fwd(out_, in_);
    for (std::size_t i = 0; i < n_; ++i) y(static_cast<Eigen::Index>(i)) = out_[i] * norm_;
  }

  std::size_t n_;
  double norm_;
  Eigen::FFT<double> fft_;
  std::vector<std::complex<double>> in_;
  std::vector<std::complex<double>> out_;
};

}  // namespace fbmcim
