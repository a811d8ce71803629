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

#include <stdexcept>
#include <string>

namespace fbmcim {

// Invalid system parameters (N, M, n, k, modulation order, overlap factor).
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bit payload does not fit the frame geometry.
class payload_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Matrix/vector sizes disagree with the configuration.
class dimension_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Index set is not a member of the lookup table.
class lookup_error : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Ill-conditioned or singular operator.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Zero-forcing requested on a subcarrier with C_n = 0.
class singular_channel_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

// Detector invoked outside its domain (e.g. LLR with k = n).
class detector_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Simulation table and analytic reference were built from different setups.
class config_mismatch_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fbmcim
