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

#include "hbss/controller.hpp"
#include "hbss/metrics.hpp"
#include "hbss/signals.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hbss {

struct FsoConfig {
  std::string gain_policy = "match_a22";
  std::vector<int> blocked_schedule;  // frame indices with the optical path blocked
};

struct ExperimentConfig {
  Geometry geometry = Geometry::default_layout();
  Modulation modulation = Modulation::QAM64;
  InterferenceKind interference = QamStream{Modulation::QAM16};
  Eigen::Index n_symbols = 4096;  // frame length, pilot included
  Eigen::Index pilot_len = 64;
  double snr_db = 25.0;  // +inf allowed (noiseless)
  FsoConfig fso;
  SwitchPolicy policy;
  double carrier_hz = 8.40e8;  // informational only
  std::uint64_t seed = 1;
  int n_frames = 10;

  // Throws Error(Config) naming the offending field.
  void validate() const;
};

// Parses a JSON config document. Missing fields take their defaults; unknown
// fields and type errors are rejected with the field path in the message.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical JSON (every field, fixed order); input to the report digest.
std::string canonical_json(const ExperimentConfig& config);

enum class ModeSelection { Auto, MIMO, FSO };

ModeSelection mode_selection_from_string(std::string_view name);  // auto | mimo | fso

// Delay search range, in samples, for FSO reference cancellation.
inline constexpr Eigen::Index kFsoMaxDelay = 8;

struct SimulationResult {
  RunReport report;
  ComplexSequence received;   // pilot-aligned x1 payloads, before separation
  ComplexSequence recovered;  // pilot-aligned SOI payloads
  std::vector<int> received_decisions;
  std::vector<int> recovered_decisions;
  int unresolved_frames = 0;  // frames whose pilot correlation stayed below threshold
};

// Runs every frame through mix -> (controller) -> demix or cancellation ->
// pilot alignment -> metrics. Pure function of (config, mode).
SimulationResult run_simulate(const ExperimentConfig& config, ModeSelection mode = ModeSelection::Auto);

// Writes report.json, constellation_before.csv and constellation_after.csv.
void write_simulation_outputs(const SimulationResult& result, const std::filesystem::path& out_dir);

enum class SweepParam { RxSpacingCm, SnrDb, KappaHi };

SweepParam sweep_param_from_string(std::string_view name);  // rx_spacing_cm | snr_db | kappa_hi

struct SweepSpec {
  SweepParam param = SweepParam::RxSpacingCm;
  double from = 0;
  double to = 1;
  int steps = 2;
};

struct SweepRow {
  double param_value = 0;
  double separability_mimo = 0;
  double separability_fso = 0;
  double evm_mimo_percent = 0;
  double evm_fso_percent = 0;
  double ser_mimo = 0;
  double ser_fso = 0;
};

// Applies one sweep value to a copy of base (receiver spacing keeps the
// receiver midpoint and axis fixed).
ExperimentConfig apply_sweep_value(const ExperimentConfig& base, SweepParam param, double value);

// Point i uses seed base.seed + i; points run concurrently, rows stay in order.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const ExperimentConfig& base);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct DemoCell {
  Modulation scheme = Modulation::QPSK;
  ChannelMode mode = ChannelMode::MIMO;
  double evm_percent = 0;
  double ser = 0;
  std::filesystem::path constellation;
};

// {QPSK, QAM16, QAM64} x {MIMO, FSO} on the base geometry: one constellation
// CSV per cell plus summary.csv. Cells that fail to separate are still reported.
std::vector<DemoCell> run_demo(const std::filesystem::path& out_dir, const ExperimentConfig& base = {});

}  // namespace hbss
