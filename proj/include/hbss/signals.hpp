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

#include "hbss/types.hpp"

#include <array>
#include <span>
#include <string_view>
#include <variant>

namespace hbss {

enum class Modulation { QPSK, QAM16, QAM64 };

constexpr int bits_per_symbol(Modulation m) noexcept {
  switch (m) {
    case Modulation::QPSK: return 2;
    case Modulation::QAM16: return 4;
    case Modulation::QAM64: return 6;
  }
  return 0;
}

constexpr int constellation_size(Modulation m) noexcept { return 1 << bits_per_symbol(m); }

std::string_view to_string(Modulation m) noexcept;
Modulation modulation_from_string(std::string_view name);  // "QPSK", "QAM16", "QAM64"

// Normative constellation table, indexed by the bit group read MSB first.
// The first half of the group selects the in-phase level, the second half the
// quadrature level. Per axis, level index i counts from the most positive
// level downward and carries the reflected Gray code i ^ (i >> 1), so a
// leading 0 bit always means a positive level. Scale factors 1/sqrt(2),
// 1/sqrt(10), 1/sqrt(42) give unit mean power. See docs/constellations.md.
const std::vector<Complex>& constellation(Modulation m);

ComplexSequence modulate(std::span<const std::uint8_t> bits, Modulation m);

// Nearest table point per symbol; equidistant ties go to the lower table index.
std::vector<int> decide_symbols(const ComplexSequence& symbols, Modulation m);
BitStream symbols_to_bits(std::span<const int> indices, Modulation m);
BitStream demodulate(const ComplexSequence& symbols, Modulation m);

BitStream random_bits(std::size_t count, std::uint64_t seed);

struct QamStream {
  Modulation scheme = Modulation::QAM16;
};
struct Tone {
  double normalized_frequency = 0.1;  // cycles per sample
};
struct FilteredNoise {
  double bandwidth_fraction = 0.25;  // two-sided bandwidth / sample rate, in (0, 1]
};
using InterferenceKind = std::variant<QamStream, Tone, FilteredNoise>;

ComplexSequence generate_interference(const InterferenceKind& kind, Eigen::Index n, std::uint64_t seed);

// Circular complex Gaussian noise at snr_db below the measured power of x.
// snr_db = +inf returns x untouched.
ComplexSequence add_awgn(const ComplexSequence& x, double snr_db, std::uint64_t seed);

// Known SOI preamble: QPSK symbols from a fixed seed, shared by every frame.
ComplexSequence pilot_sequence(Eigen::Index length);

struct Frame {
  ComplexSequence pilot;
  ComplexSequence payload;
  Modulation scheme = Modulation::QPSK;
  BitStream payload_bits;

  // Transmission order: pilot, then payload.
  ComplexSequence symbols() const;
};

Frame make_frame(Modulation scheme, Eigen::Index pilot_len, Eigen::Index payload_len, std::uint64_t seed);

}  // namespace hbss
