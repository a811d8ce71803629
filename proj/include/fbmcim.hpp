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

#include "fbmcim/analysis.hpp"
#include "fbmcim/channel.hpp"
#include "fbmcim/cli.hpp"
#include "fbmcim/config.hpp"
#include "fbmcim/config_file.hpp"
#include "fbmcim/constellation.hpp"
#include "fbmcim/detect.hpp"
#include "fbmcim/dft.hpp"
#include "fbmcim/errors.hpp"
#include "fbmcim/filterbank.hpp"
#include "fbmcim/harness.hpp"
#include "fbmcim/im_codec.hpp"
#include "fbmcim/lookup_table.hpp"
#include "fbmcim/oracles.hpp"
#include "fbmcim/receiver.hpp"
#include "fbmcim/report.hpp"
#include "fbmcim/rng.hpp"
#include "fbmcim/selftest.hpp"
#include "fbmcim/stats.hpp"
