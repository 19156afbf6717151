// SPDX-License-Identifier: Apache-2.0
//
// hbss - hybrid FSO/MIMO blind source separation simulator
// Copyright (C) 2026 The hbss authors
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

#include "hbss/channel.hpp"

namespace hbss {

struct SwitchPolicy {
  double kappa_hi = 20.0;  // enter FSO at or above this estimate
  double kappa_lo = 8.0;   // return to MIMO below this estimate
  int dwell_up = 3;
  int dwell_down = 3;

  void validate() const;
};

struct ModeState {
  ChannelMode mode = ChannelMode::MIMO;
  int consecutive_above = 0;
  int consecutive_below = 0;
  double last_estimate = kInfinity;
};

struct FrameReport {
  double separability_estimate = 1.0;
  bool fso_clear = true;
};

inline constexpr Eigen::Index kMinEstimatorSamples = 1000;

// sqrt(lambda_max / lambda_min) of the real covariance of x: a blind estimate
// of the 2-norm condition number of the effective mixing. +inf when
// lambda_min <= 1e-12 lambda_max.
double estimate_separability(const Observation& x);

struct StepResult {
  ModeState state;
  ChannelMode mode;
};

// Blocked FSO forces MIMO immediately; otherwise a switch needs dwell_up
// (MIMO -> FSO) or dwell_down (FSO -> MIMO) consecutive qualifying frames.
StepResult step(const ModeState& state, const FrameReport& report, const SwitchPolicy& policy);

}  // namespace hbss
