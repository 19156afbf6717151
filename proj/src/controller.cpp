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

#include "hbss/controller.hpp"

#include "hbss/separation.hpp"

namespace hbss {

void SwitchPolicy::validate() const {
  if (!std::isfinite(kappa_hi) || !std::isfinite(kappa_lo))
    throw Error(ErrorKind::InvalidArgument, "policy thresholds must be finite");
  if (!(kappa_lo < kappa_hi)) throw Error(ErrorKind::InvalidArgument, "policy requires kappa_lo < kappa_hi");
  if (dwell_up < 1 || dwell_down < 1) throw Error(ErrorKind::InvalidArgument, "policy dwell counts must be >= 1");
}

double estimate_separability(const Observation& x) {
  if (x.cols() < kMinEstimatorSamples)
    throw Error(ErrorKind::InsufficientSamples, "separability estimate needs at least " +
                                                    std::to_string(kMinEstimatorSamples) + " samples, got " +
                                                    std::to_string(x.cols()));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig;
  eig.computeDirect(real_covariance(x), Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0), hi = eig.eigenvalues()(1);
  if (!(hi > 0) || lo <= 1e-12 * hi) return kInfinity;
  return std::sqrt(hi / lo);
}

StepResult step(const ModeState& state, const FrameReport& report, const SwitchPolicy& policy) {
  ModeState next = state;
  next.last_estimate = report.separability_estimate;

  auto switch_to = [&next](ChannelMode m) {
    next.mode = m;
    next.consecutive_above = 0;
    next.consecutive_below = 0;
  };

  if (!report.fso_clear) {
    switch_to(ChannelMode::MIMO);
    return {next, next.mode};
  }

  if (state.mode == ChannelMode::MIMO) {
    next.consecutive_below = 0;
    next.consecutive_above = report.separability_estimate >= policy.kappa_hi ? state.consecutive_above + 1 : 0;
    if (next.consecutive_above >= policy.dwell_up) switch_to(ChannelMode::FSO);
  } else {
    next.consecutive_above = 0;
    next.consecutive_below = report.separability_estimate < policy.kappa_lo ? state.consecutive_below + 1 : 0;
    if (next.consecutive_below >= policy.dwell_down) switch_to(ChannelMode::MIMO);
  }
  return {next, next.mode};
}

}  // namespace hbss
