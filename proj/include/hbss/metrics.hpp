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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hbss {

// 100 * sqrt(mean |y - ref|^2 / mean |ref|^2), normalized by mean reference
// power (not peak).
double evm_rms(const ComplexSequence& y, const ComplexSequence& reference);

double symbol_error_rate(std::span<const int> decided, std::span<const int> truth);
double bit_error_rate(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> truth);

inline constexpr double kSuppressionCapDb = 120.0;

// 10 log10(before / after), capped at +120 dB.
double suppression_db(double interference_power_before, double interference_power_after);

// CSV with header "index,re,im,decided_index"; numbers carry 17 significant digits.
void export_constellation(const ComplexSequence& y, std::span<const int> decided, const std::filesystem::path& path);

struct RunReport {
  std::vector<ChannelMode> mode_trace;
  double evm_percent = 0;
  double ser = 0;
  double ber = 0;
  double suppression_db = 0;
  double separability_before = 0;
  double separability_after = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
};

// Single JSON document with exactly the RunReport field names. Non-finite
// reals (an infinite separability) are written as null.
std::string to_json(const RunReport& report);

// Shortest round-trip decimal text; "inf" / "-inf" / "nan" for non-finite.
std::string format_decimal(double v);
// Fixed 17-significant-digit scientific text used in CSV output.
std::string format_csv_number(double v);

}  // namespace hbss
