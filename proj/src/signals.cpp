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

#include "hbss/signals.hpp"

#include "hbss/random.hpp"

#include <cmath>
#include <numbers>

namespace hbss {

namespace {

constexpr std::uint64_t kPilotSeed = 0x70696c6f74ULL;
constexpr int kNoiseFilterTaps = 129;

std::vector<Complex> build_table(Modulation m) {
  const int bits = bits_per_symbol(m);
  const int axis_bits = bits / 2;
  const int levels = 1 << axis_bits;
  const double scale = 1.0 / std::sqrt(2.0 * (levels * levels - 1) / 3.0);

  // gray code -> amplitude, most positive level first
  std::vector<double> axis(levels);
  for (int i = 0; i < levels; ++i) axis[i ^ (i >> 1)] = static_cast<double>(levels - 1 - 2 * i);

  std::vector<Complex> table(std::size_t{1} << bits);
  for (int v = 0; v < static_cast<int>(table.size()); ++v) {
    const int i_bits = v >> axis_bits;
    const int q_bits = v & (levels - 1);
    table[v] = Complex(axis[i_bits] * scale, axis[q_bits] * scale);
  }
  return table;
}

}  // namespace

std::string_view to_string(Modulation m) noexcept {
  switch (m) {
    case Modulation::QPSK: return "QPSK";
    case Modulation::QAM16: return "QAM16";
    case Modulation::QAM64: return "QAM64";
  }
  return "?";
}

Modulation modulation_from_string(std::string_view name) {
  if (name == "QPSK") return Modulation::QPSK;
  if (name == "QAM16") return Modulation::QAM16;
  if (name == "QAM64") return Modulation::QAM64;
  throw Error(ErrorKind::InvalidArgument, "unknown modulation '" + std::string(name) + "' (expected QPSK, QAM16 or QAM64)");
}

const std::vector<Complex>& constellation(Modulation m) {
  static const std::array<std::vector<Complex>, 3> tables = {
      build_table(Modulation::QPSK), build_table(Modulation::QAM16), build_table(Modulation::QAM64)};
  return tables[static_cast<std::size_t>(m)];
}

ComplexSequence modulate(std::span<const std::uint8_t> bits, Modulation m) {
  const auto bps = static_cast<std::size_t>(bits_per_symbol(m));
  if (bits.size() % bps != 0)
    throw Error(ErrorKind::InvalidBitLength, std::to_string(bits.size()) + " bits is not a multiple of " +
                                                 std::to_string(bps) + " for " + std::string(to_string(m)));
  const auto& table = constellation(m);
  ComplexSequence out(static_cast<Eigen::Index>(bits.size() / bps));
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    int v = 0;
    for (std::size_t b = 0; b < bps; ++b) {
      const auto bit = bits[static_cast<std::size_t>(k) * bps + b];
      if (bit > 1) throw Error(ErrorKind::InvalidArgument, "bit values must be 0 or 1");
      v = (v << 1) | bit;
    }
    out[k] = table[static_cast<std::size_t>(v)];
  }
  return out;
}

std::vector<int> decide_symbols(const ComplexSequence& symbols, Modulation m) {
  const auto& table = constellation(m);
  std::vector<int> out(static_cast<std::size_t>(symbols.size()));
  for (Eigen::Index k = 0; k < symbols.size(); ++k) {
    const Complex y = symbols[k];
    int best = 0;
    double best_d = std::norm(y - table[0]);
    for (int i = 1; i < static_cast<int>(table.size()); ++i) {
      const double d = std::norm(y - table[static_cast<std::size_t>(i)]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    out[static_cast<std::size_t>(k)] = best;
  }
  return out;
}

BitStream symbols_to_bits(std::span<const int> indices, Modulation m) {
  const int bps = bits_per_symbol(m);
  BitStream bits;
  bits.reserve(indices.size() * static_cast<std::size_t>(bps));
  for (int v : indices)
    for (int b = bps - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
  return bits;
}

BitStream demodulate(const ComplexSequence& symbols, Modulation m) {
  const auto indices = decide_symbols(symbols, m);
  return symbols_to_bits(indices, m);
}

BitStream random_bits(std::size_t count, std::uint64_t seed) {
  auto rng = make_engine(seed, {0xb175});
  std::uniform_int_distribution<int> coin(0, 1);
  BitStream bits(count);
  for (auto& b : bits) b = static_cast<std::uint8_t>(coin(rng));
  return bits;
}

namespace {

ComplexSequence complex_gaussian(Eigen::Index n, double variance, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
  ComplexSequence out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    out[k] = Complex(re, im);
  }
  return out;
}

// Hamming-windowed sinc low-pass, cutoff = bandwidth / 2 cycles per sample.
Eigen::VectorXd lowpass_taps(double bandwidth_fraction) {
  constexpr int half = kNoiseFilterTaps / 2;
  const double fc = bandwidth_fraction / 2.0;
  Eigen::VectorXd h(kNoiseFilterTaps);
  for (int k = -half; k <= half; ++k) {
    const double sinc = k == 0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * k) / (std::numbers::pi * k);
    const double window = 0.54 + 0.46 * std::cos(std::numbers::pi * k / half);
    h[k + half] = sinc * window;
  }
  return h;
}

}  // namespace

ComplexSequence generate_interference(const InterferenceKind& kind, Eigen::Index n, std::uint64_t seed) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "interference length must be non-negative");
  return std::visit(
      [n, seed](const auto& k) -> ComplexSequence {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, QamStream>) {
          const auto bits = random_bits(static_cast<std::size_t>(n) * bits_per_symbol(k.scheme), seed);
          return modulate(bits, k.scheme);
        } else if constexpr (std::is_same_v<K, Tone>) {
          if (!std::isfinite(k.normalized_frequency))
            throw Error(ErrorKind::InvalidArgument, "tone frequency must be finite");
          auto rng = make_engine(seed, {0x70e});
          const double phase0 = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
          ComplexSequence out(n);
          for (Eigen::Index t = 0; t < n; ++t)
            out[t] = std::polar(1.0, 2.0 * std::numbers::pi * k.normalized_frequency * static_cast<double>(t) + phase0);
          return out;
        } else {
          if (!(k.bandwidth_fraction > 0.0 && k.bandwidth_fraction <= 1.0))
            throw Error(ErrorKind::InvalidArgument, "noise bandwidth fraction must lie in (0, 1]");
          if (n == 0) return ComplexSequence(0);
          auto rng = make_engine(seed, {0x9015e});
          const Eigen::VectorXd h = lowpass_taps(k.bandwidth_fraction);
          const ComplexSequence w = complex_gaussian(n + h.size() - 1, 1.0, rng);
          ComplexSequence out(n);
          for (Eigen::Index t = 0; t < n; ++t) out[t] = (w.segment(t, h.size()).array() * h.reverse().array()).sum();
          // exact unit power regardless of how narrow the band is
          out /= std::sqrt(mean_power(out));
          return out;
        }
      },
      kind);
}

ComplexSequence add_awgn(const ComplexSequence& x, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return x;
  if (std::isnan(snr_db) || std::isinf(snr_db)) throw Error(ErrorKind::InvalidArgument, "snr_db must be finite or +inf");
  if (x.size() == 0) throw Error(ErrorKind::EmptyInput, "cannot measure signal power of an empty sequence");
  const double noise_power = mean_power(x) * std::pow(10.0, -snr_db / 10.0);
  if (noise_power == 0.0) return x;
  auto rng = make_engine(seed, {0xa3611});
  return x + complex_gaussian(x.size(), noise_power, rng);
}

ComplexSequence pilot_sequence(Eigen::Index length) {
  if (length < 0) throw Error(ErrorKind::InvalidPilot, "pilot length must be non-negative");
  return modulate(random_bits(static_cast<std::size_t>(length) * 2, kPilotSeed), Modulation::QPSK);
}

ComplexSequence Frame::symbols() const {
  ComplexSequence out(pilot.size() + payload.size());
  out << pilot, payload;
  return out;
}

Frame make_frame(Modulation scheme, Eigen::Index pilot_len, Eigen::Index payload_len, std::uint64_t seed) {
  if (payload_len < 0) throw Error(ErrorKind::InvalidArgument, "payload length must be non-negative");
  Frame f;
  f.scheme = scheme;
  f.pilot = pilot_sequence(pilot_len);
  f.payload_bits = random_bits(static_cast<std::size_t>(payload_len) * bits_per_symbol(scheme), seed);
  f.payload = modulate(f.payload_bits, scheme);
  return f;
}

}  // namespace hbss
