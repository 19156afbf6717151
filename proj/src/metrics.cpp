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

#include "hbss/metrics.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace hbss {

double evm_rms(const ComplexSequence& y, const ComplexSequence& reference) {
  if (y.size() != reference.size())
    throw Error(ErrorKind::LengthMismatch, "EVM inputs have " + std::to_string(y.size()) + " and " +
                                               std::to_string(reference.size()) + " symbols");
  if (y.size() == 0) throw Error(ErrorKind::EmptyInput, "EVM of zero symbols");
  const double ref_power = reference.squaredNorm();
  if (!(ref_power > 0)) throw Error(ErrorKind::DegenerateReference, "reference symbols have zero power");
  return 100.0 * std::sqrt((y - reference).squaredNorm() / ref_power);
}

namespace {

template <typename T>
double mismatch_rate(std::span<const T> a, std::span<const T> b, const char* what) {
  if (a.size() != b.size())
    throw Error(ErrorKind::LengthMismatch, std::string(what) + " counts differ (" + std::to_string(a.size()) + " vs " +
                                               std::to_string(b.size()) + ")");
  if (a.empty()) throw Error(ErrorKind::EmptyInput, std::string("no ") + what + " to compare");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < a.size(); ++i) errors += a[i] != b[i];
  return static_cast<double>(errors) / static_cast<double>(a.size());
}

}  // namespace

double symbol_error_rate(std::span<const int> decided, std::span<const int> truth) {
  return mismatch_rate(decided, truth, "symbol");
}

double bit_error_rate(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> truth) {
  return mismatch_rate(decided, truth, "bit");
}

double suppression_db(double before, double after) {
  if (!(before > 0) || !std::isfinite(before))
    throw Error(ErrorKind::InvalidPower, "interference power before suppression must be positive");
  if (!(after >= 0) || !std::isfinite(after))
    throw Error(ErrorKind::InvalidPower, "interference power after suppression must be nonnegative");
  if (after == 0) return kSuppressionCapDb;
  return std::min(kSuppressionCapDb, 10.0 * std::log10(before / after));
}

std::string format_decimal(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_csv_number(double v) {
  if (!std::isfinite(v)) return format_decimal(v);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

void export_constellation(const ComplexSequence& y, std::span<const int> decided, const std::filesystem::path& path) {
  if (decided.size() != static_cast<std::size_t>(y.size()))
    throw Error(ErrorKind::LengthMismatch, "constellation export: " + std::to_string(y.size()) + " symbols but " +
                                               std::to_string(decided.size()) + " decisions");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << "index,re,im,decided_index\n";
  for (Eigen::Index k = 0; k < y.size(); ++k)
    out << k << ',' << format_csv_number(y[k].real()) << ',' << format_csv_number(y[k].imag()) << ','
        << decided[static_cast<std::size_t>(k)] << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

std::string to_json(const RunReport& r) {
  auto real = [](double v) -> nlohmann::ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return v;
  };
  nlohmann::ordered_json j;
  auto& trace = j["mode_trace"] = nlohmann::ordered_json::array();
  for (auto m : r.mode_trace) trace.push_back(to_string(m));
  j["evm_percent"] = real(r.evm_percent);
  j["ser"] = real(r.ser);
  j["ber"] = real(r.ber);
  j["suppression_db"] = real(r.suppression_db);
  j["separability_before"] = real(r.separability_before);
  j["separability_after"] = real(r.separability_after);
  j["seed"] = r.seed;
  j["config_digest"] = r.config_digest;
  return j.dump(2) + "\n";
}

}  // namespace hbss
