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

#include "hbss/experiment.hpp"

#include "hbss/random.hpp"
#include "hbss/separation.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <thread>

namespace hbss {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& message) {
  throw Error(ErrorKind::Config, field + ": " + message);
}

// Reads one JSON object, remembering which keys were consumed so that
// anything left over can be rejected as an unknown field.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(path_.empty() ? "config" : path_, "expected a JSON object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void reject_unknown() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) config_error(field(item.key()), "unknown field");
  }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) config_error(field(key), "expected a number");
    return v->get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) config_error(field(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) config_error(field(key), "expected a string");
    return v->get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Point read_point(ObjectReader& r, const std::string& key, Point fallback) {
  const json* v = r.find(key);
  if (!v) return fallback;
  if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
    config_error(r.field(key), "expected [x, y] in cm");
  return {(*v)[0].get<double>(), (*v)[1].get<double>()};
}

Modulation read_modulation(const std::string& field, const std::string& name) {
  try {
    return modulation_from_string(name);
  } catch (const Error&) {
    config_error(field, "unknown modulation '" + name + "' (expected QPSK, QAM16 or QAM64)");
  }
}

double read_snr(ObjectReader& r, double fallback) {
  const json* v = r.find("snr_db");
  if (!v) return fallback;
  if (v->is_string() && v->get<std::string>() == "inf") return kInfinity;
  if (!v->is_number()) config_error("snr_db", "expected a number or \"inf\"");
  return v->get<double>();
}

InterferenceKind read_interference(const json& j, const InterferenceKind& fallback) {
  ObjectReader r(j, "interference");
  const std::string kind = r.text("kind", "");
  InterferenceKind out = fallback;
  if (kind == "qam_stream") {
    out = QamStream{read_modulation(r.field("scheme"), r.text("scheme", "QAM16"))};
  } else if (kind == "tone") {
    out = Tone{r.number("normalized_frequency", Tone{}.normalized_frequency)};
  } else if (kind == "filtered_noise") {
    out = FilteredNoise{r.number("bandwidth_fraction", FilteredNoise{}.bandwidth_fraction)};
  } else {
    config_error(r.field("kind"), "expected one of qam_stream, tone, filtered_noise");
  }
  r.reject_unknown();
  return out;
}

ordered_json point_json(Point p) { return ordered_json::array({p.x, p.y}); }

ordered_json interference_json(const InterferenceKind& kind) {
  return std::visit(
      [](const auto& k) -> ordered_json {
        using K = std::decay_t<decltype(k)>;
        ordered_json j;
        if constexpr (std::is_same_v<K, QamStream>) {
          j["kind"] = "qam_stream";
          j["scheme"] = std::string(to_string(k.scheme));
        } else if constexpr (std::is_same_v<K, Tone>) {
          j["kind"] = "tone";
          j["normalized_frequency"] = k.normalized_frequency;
        } else {
          j["kind"] = "filtered_noise";
          j["bandwidth_fraction"] = k.bandwidth_fraction;
        }
        return j;
      },
      kind);
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::InvalidArgument, "SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    mixing_from_geometry(geometry);
  } catch (const Error& e) {
    config_error("geometry", e.what());
  }
  if (pilot_len < kMinPilotLength) config_error("pilot_len", "must be at least " + std::to_string(kMinPilotLength));
  if (n_symbols < pilot_len + 100)
    config_error("n_symbols", "must be at least pilot_len + 100 = " + std::to_string(pilot_len + 100) + ", got " +
                                  std::to_string(n_symbols));
  if (std::isnan(snr_db) || (std::isinf(snr_db) && snr_db < 0)) config_error("snr_db", "must be finite or +inf");
  if (!(carrier_hz > 0) || !std::isfinite(carrier_hz)) config_error("carrier_hz", "must be positive");
  if (n_frames < 1) config_error("n_frames", "must be at least 1");
  if (fso.gain_policy != "match_a22") config_error("fso.gain_policy", "only \"match_a22\" is supported");
  for (std::size_t i = 0; i < fso.blocked_schedule.size(); ++i) {
    const int k = fso.blocked_schedule[i];
    if (k < 0 || k >= n_frames)
      config_error("fso.blocked_schedule[" + std::to_string(i) + "]",
                   "frame index " + std::to_string(k) + " outside [0, n_frames)");
  }
  if (!std::isfinite(policy.kappa_hi)) config_error("policy.kappa_hi", "must be finite");
  if (!std::isfinite(policy.kappa_lo)) config_error("policy.kappa_lo", "must be finite");
  if (!(policy.kappa_lo < policy.kappa_hi)) config_error("policy.kappa_lo", "must be less than policy.kappa_hi");
  if (policy.dwell_up < 1) config_error("policy.dwell_up", "must be at least 1");
  if (policy.dwell_down < 1) config_error("policy.dwell_down", "must be at least 1");
  std::visit(
      [](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Tone>) {
          if (!std::isfinite(k.normalized_frequency))
            config_error("interference.normalized_frequency", "must be finite");
        } else if constexpr (std::is_same_v<K, FilteredNoise>) {
          if (!(k.bandwidth_fraction > 0 && k.bandwidth_fraction <= 1))
            config_error("interference.bandwidth_fraction", "must lie in (0, 1]");
        }
      },
      interference);
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    config_error("config", std::string("invalid JSON: ") + e.what());
  }

  ExperimentConfig c;
  ObjectReader root(doc, "");
  if (const json* g = root.find("geometry")) {
    ObjectReader r(*g, "geometry");
    c.geometry.tx_soi = read_point(r, "tx_soi", c.geometry.tx_soi);
    c.geometry.tx_int = read_point(r, "tx_int", c.geometry.tx_int);
    c.geometry.rx1 = read_point(r, "rx1", c.geometry.rx1);
    c.geometry.rx2 = read_point(r, "rx2", c.geometry.rx2);
    r.reject_unknown();
  }
  c.modulation = read_modulation("modulation", root.text("modulation", std::string(to_string(c.modulation))));
  if (const json* v = root.find("interference")) c.interference = read_interference(*v, c.interference);
  c.n_symbols = root.integer("n_symbols", c.n_symbols);
  c.pilot_len = root.integer("pilot_len", c.pilot_len);
  c.snr_db = read_snr(root, c.snr_db);
  if (const json* f = root.find("fso")) {
    ObjectReader r(*f, "fso");
    c.fso.gain_policy = r.text("gain_policy", c.fso.gain_policy);
    if (const json* b = r.find("blocked_schedule")) {
      if (!b->is_array()) config_error("fso.blocked_schedule", "expected an array of frame indices");
      c.fso.blocked_schedule.clear();
      for (std::size_t i = 0; i < b->size(); ++i) {
        if (!(*b)[i].is_number_integer())
          config_error("fso.blocked_schedule[" + std::to_string(i) + "]", "expected an integer frame index");
        c.fso.blocked_schedule.push_back((*b)[i].get<int>());
      }
    }
    r.reject_unknown();
  }
  if (const json* p = root.find("policy")) {
    ObjectReader r(*p, "policy");
    c.policy.kappa_hi = r.number("kappa_hi", c.policy.kappa_hi);
    c.policy.kappa_lo = r.number("kappa_lo", c.policy.kappa_lo);
    c.policy.dwell_up = static_cast<int>(r.integer("dwell_up", c.policy.dwell_up));
    c.policy.dwell_down = static_cast<int>(r.integer("dwell_down", c.policy.dwell_down));
    r.reject_unknown();
  }
  c.carrier_hz = root.number("carrier_hz", c.carrier_hz);
  const std::int64_t seed = root.integer("seed", static_cast<std::int64_t>(c.seed));
  if (seed < 0) config_error("seed", "must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  const std::int64_t frames = root.integer("n_frames", c.n_frames);
  if (frames < 1 || frames > 1'000'000) config_error("n_frames", "must lie in [1, 1000000]");
  c.n_frames = static_cast<int>(frames);
  root.reject_unknown();

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string canonical_json(const ExperimentConfig& c) {
  ordered_json j;
  j["geometry"] = {{"tx_soi", point_json(c.geometry.tx_soi)},
                   {"tx_int", point_json(c.geometry.tx_int)},
                   {"rx1", point_json(c.geometry.rx1)},
                   {"rx2", point_json(c.geometry.rx2)}};
  j["modulation"] = std::string(to_string(c.modulation));
  j["interference"] = interference_json(c.interference);
  j["n_symbols"] = c.n_symbols;
  j["pilot_len"] = c.pilot_len;
  if (std::isinf(c.snr_db))
    j["snr_db"] = "inf";
  else
    j["snr_db"] = c.snr_db;
  j["fso"] = {{"gain_policy", c.fso.gain_policy}, {"blocked_schedule", c.fso.blocked_schedule}};
  j["policy"] = {{"kappa_hi", c.policy.kappa_hi},
                 {"kappa_lo", c.policy.kappa_lo},
                 {"dwell_up", c.policy.dwell_up},
                 {"dwell_down", c.policy.dwell_down}};
  j["carrier_hz"] = c.carrier_hz;
  j["seed"] = c.seed;
  j["n_frames"] = c.n_frames;
  return j.dump();
}

ModeSelection mode_selection_from_string(std::string_view name) {
  if (name == "auto") return ModeSelection::Auto;
  if (name == "mimo") return ModeSelection::MIMO;
  if (name == "fso") return ModeSelection::FSO;
  throw Error(ErrorKind::Config, "--mode: expected auto, mimo or fso, got '" + std::string(name) + "'");
}

namespace {

enum StreamTag : std::uint64_t { kSoiStream = 1, kInterferenceStream = 2, kNoiseStream = 3 };

std::uint64_t frame_seed(std::uint64_t seed, int frame, StreamTag tag) {
  return make_engine(seed, {static_cast<std::uint64_t>(frame), tag})();
}

// The exact linear processing applied to one frame, so it can be replayed on
// the noiseless SOI-only and interference-only components.
struct FrameProcessing {
  ChannelMode mode = ChannelMode::MIMO;
  Eigen::Matrix2d demixer = Eigen::Matrix2d::Identity();
  Complex coefficient = 0;
  Eigen::Index delay = 0;
  PilotAlignment alignment;

  ComplexSequence apply(const Observation& x) const {
    Observation outputs;
    if (mode == ChannelMode::MIMO) {
      outputs = demixer.cast<Complex>() * x;
    } else {
      outputs.resize(2, x.cols());
      const ComplexSequence ref = x.row(1).transpose();
      outputs.row(0) = x.row(0) - coefficient * shift(ref, delay).transpose();
      outputs.row(1) = x.row(1);
    }
    return apply_alignment(outputs, alignment);
  }
};

struct Totals {
  double error_power = 0;
  double reference_power = 0;
  std::size_t symbol_errors = 0;
  std::size_t symbols = 0;
  std::size_t bit_errors = 0;
  std::size_t bits = 0;
  double interference_before = 0;
  double soi_before = 0;
  double interference_after = 0;
  double soi_after = 0;
};

}  // namespace

SimulationResult run_simulate(const ExperimentConfig& config, ModeSelection selection) {
  config.validate();
  const MixingMatrix a = mixing_from_geometry(config.geometry);
  const MixingMatrix a_fso = apply_fso_override(a);
  const Eigen::Index n = config.n_symbols;
  const Eigen::Index payload_len = n - config.pilot_len;
  const std::set<int> blocked(config.fso.blocked_schedule.begin(), config.fso.blocked_schedule.end());

  SimulationResult result;
  result.received.resize(payload_len * config.n_frames);
  result.recovered.resize(payload_len * config.n_frames);
  result.received_decisions.reserve(static_cast<std::size_t>(payload_len * config.n_frames));
  result.recovered_decisions.reserve(static_cast<std::size_t>(payload_len * config.n_frames));

  Totals totals;
  ModeState state;
  ChannelMode mode = ChannelMode::MIMO;
  const ComplexSequence zeros = ComplexSequence::Zero(n);

  for (int k = 0; k < config.n_frames; ++k) {
    try {
      const Frame frame =
          make_frame(config.modulation, config.pilot_len, payload_len, frame_seed(config.seed, k, kSoiStream));
      const ComplexSequence s = frame.symbols();
      const ComplexSequence r =
          generate_interference(config.interference, n, frame_seed(config.seed, k, kInterferenceStream));
      const std::uint64_t noise_seed = frame_seed(config.seed, k, kNoiseStream);
      const Observation x_rf = mix(a, s, r, config.snr_db, noise_seed);
      const bool clear = !blocked.count(k);

      switch (selection) {
        case ModeSelection::Auto: {
          // the estimate always describes the RF antenna pair
          const FrameReport report{estimate_separability(x_rf), clear};
          const StepResult next = step(state, report, config.policy);
          state = next.state;
          mode = next.mode;
          break;
        }
        case ModeSelection::MIMO: mode = ChannelMode::MIMO; break;
        case ModeSelection::FSO: mode = clear ? ChannelMode::FSO : ChannelMode::MIMO; break;
      }
      result.report.mode_trace.push_back(mode);

      const MixingMatrix& effective = mode == ChannelMode::FSO ? a_fso : a;
      // Receiver 1 noise depends only on (seed, row), so x1 is shared by both modes.
      const Observation x = mode == ChannelMode::FSO ? mix(a_fso, s, r, config.snr_db, noise_seed) : x_rf;

      FrameProcessing proc;
      proc.mode = mode;
      Observation outputs;
      if (mode == ChannelMode::MIMO) {
        DemixResult d = demix(x);
        proc.demixer = d.w;
        outputs = std::move(d.outputs);
      } else {
        const ComplexSequence x1 = x.row(0).transpose();
        const ComplexSequence ref = x.row(1).transpose();
        const CancellationResult c = cancel_with_reference(x1, ref, kFsoMaxDelay);
        proc.coefficient = c.coefficient;
        proc.delay = c.delay;
        outputs.resize(2, n);
        outputs.row(0) = c.soi_estimate.transpose();
        outputs.row(1) = x.row(1);
      }
      proc.alignment = fit_pilot_alignment(outputs, frame.pilot);
      if (!proc.alignment.resolved()) ++result.unresolved_frames;
      const ComplexSequence y = apply_alignment(outputs, proc.alignment);

      // received x1 on the same pilot-fitted scale, for the "before" constellation
      Observation x1_only(2, n);
      x1_only.row(0) = x.row(0);
      x1_only.row(1).setZero();
      PilotAlignment raw = fit_pilot_alignment(x1_only, frame.pilot);
      raw.channel = 0;
      const ComplexSequence before = apply_alignment(x1_only, raw);

      const ComplexSequence payload_out = y.tail(payload_len);
      const ComplexSequence payload_before = before.tail(payload_len);
      const auto decided = decide_symbols(payload_out, config.modulation);
      const auto decided_before = decide_symbols(payload_before, config.modulation);
      const auto truth = decide_symbols(frame.payload, config.modulation);
      const BitStream bits_out = symbols_to_bits(decided, config.modulation);

      totals.error_power += (payload_out - frame.payload).squaredNorm();
      totals.reference_power += frame.payload.squaredNorm();
      for (std::size_t i = 0; i < decided.size(); ++i) totals.symbol_errors += decided[i] != truth[i];
      totals.symbols += decided.size();
      for (std::size_t i = 0; i < bits_out.size(); ++i) totals.bit_errors += bits_out[i] != frame.payload_bits[i];
      totals.bits += bits_out.size();

      // ground-truth components through the same linear processing
      const Observation soi_part = mix(effective, s, zeros, kInfinity, 0);
      const Observation int_part = mix(effective, zeros, r, kInfinity, 0);
      totals.soi_before += soi_part.row(0).squaredNorm();
      totals.interference_before += int_part.row(0).squaredNorm();
      totals.soi_after += proc.apply(soi_part).squaredNorm();
      totals.interference_after += proc.apply(int_part).squaredNorm();

      result.received.segment(k * payload_len, payload_len) = payload_before;
      result.recovered.segment(k * payload_len, payload_len) = payload_out;
      result.received_decisions.insert(result.received_decisions.end(), decided_before.begin(), decided_before.end());
      result.recovered_decisions.insert(result.recovered_decisions.end(), decided.begin(), decided.end());
    } catch (const Error& e) {
      throw Error(e.kind(), "frame " + std::to_string(k) + ": " + e.what());
    }
  }

  RunReport& rep = result.report;
  rep.evm_percent = 100.0 * std::sqrt(totals.error_power / totals.reference_power);
  rep.ser = static_cast<double>(totals.symbol_errors) / static_cast<double>(totals.symbols);
  rep.ber = static_cast<double>(totals.bit_errors) / static_cast<double>(totals.bits);
  // interference-to-SOI power ratios at x1 and at the output
  const double ratio_before = totals.interference_before / totals.soi_before;
  const double ratio_after = totals.soi_after > 0 ? totals.interference_after / totals.soi_after : kInfinity;
  rep.suppression_db = std::isinf(ratio_after) ? -kSuppressionCapDb
                                               : std::max(-kSuppressionCapDb, suppression_db(ratio_before, ratio_after));
  rep.separability_before = separability_index(a);
  rep.separability_after = separability_index(mode == ChannelMode::FSO ? a_fso : a);
  rep.seed = config.seed;
  std::string digest_input = canonical_json(config);
  digest_input += "|mode=";
  digest_input += selection == ModeSelection::Auto ? "auto" : selection == ModeSelection::MIMO ? "mimo" : "fso";
  rep.config_digest = sha256_hex(digest_input);
  return result;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
}

}  // namespace

void write_simulation_outputs(const SimulationResult& result, const std::filesystem::path& out_dir) {
  ensure_directory(out_dir);
  write_text(out_dir / "report.json", to_json(result.report));
  export_constellation(result.received, result.received_decisions, out_dir / "constellation_before.csv");
  export_constellation(result.recovered, result.recovered_decisions, out_dir / "constellation_after.csv");
}

SweepParam sweep_param_from_string(std::string_view name) {
  if (name == "rx_spacing_cm") return SweepParam::RxSpacingCm;
  if (name == "snr_db") return SweepParam::SnrDb;
  if (name == "kappa_hi") return SweepParam::KappaHi;
  throw Error(ErrorKind::Config, "--param: expected rx_spacing_cm, snr_db or kappa_hi, got '" + std::string(name) + "'");
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, SweepParam param, double value) {
  ExperimentConfig c = base;
  switch (param) {
    case SweepParam::RxSpacingCm: {
      if (!(value > 0)) config_error("--from/--to", "receiver spacing must be positive");
      const Eigen::Vector2d r1(base.geometry.rx1.x, base.geometry.rx1.y);
      const Eigen::Vector2d r2(base.geometry.rx2.x, base.geometry.rx2.y);
      const Eigen::Vector2d mid = 0.5 * (r1 + r2);
      const Eigen::Vector2d axis = (r2 - r1).norm() > 0 ? Eigen::Vector2d((r2 - r1).normalized()) : Eigen::Vector2d::UnitX();
      const Eigen::Vector2d n1 = mid - 0.5 * value * axis, n2 = mid + 0.5 * value * axis;
      c.geometry.rx1 = {n1.x(), n1.y()};
      c.geometry.rx2 = {n2.x(), n2.y()};
      break;
    }
    case SweepParam::SnrDb: c.snr_db = value; break;
    case SweepParam::KappaHi: c.policy.kappa_hi = value; break;
  }
  return c;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const ExperimentConfig& base) {
  if (spec.steps < 2) config_error("--steps", "must be at least 2");
  if (!std::isfinite(spec.from) || !std::isfinite(spec.to)) config_error("--from/--to", "must be finite");
  if (!(spec.from < spec.to)) config_error("--from/--to", "requires from < to");
  base.validate();

  std::vector<ExperimentConfig> points;
  for (int i = 0; i < spec.steps; ++i) {
    const double v = spec.from + (spec.to - spec.from) * i / (spec.steps - 1);
    ExperimentConfig c = apply_sweep_value(base, spec.param, v);
    c.seed = base.seed + static_cast<std::uint64_t>(i);
    c.validate();
    points.push_back(std::move(c));
  }

  auto evaluate = [&](std::size_t i) {
    const ExperimentConfig& c = points[i];
    const MixingMatrix a = mixing_from_geometry(c.geometry);
    const RunReport mimo = run_simulate(c, ModeSelection::MIMO).report;
    const RunReport fso = run_simulate(c, ModeSelection::FSO).report;
    SweepRow row;
    row.param_value = spec.from + (spec.to - spec.from) * static_cast<double>(i) / (spec.steps - 1);
    row.separability_mimo = separability_index(a);
    row.separability_fso = separability_index(apply_fso_override(a));
    row.evm_mimo_percent = mimo.evm_percent;
    row.evm_fso_percent = fso.evm_percent;
    row.ser_mimo = mimo.ser;
    row.ser_fso = fso.ser;
    return row;
  };

  std::vector<SweepRow> rows(points.size());
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < points.size(); start += workers) {
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t i = start; i < std::min(points.size(), start + workers); ++i)
      batch.push_back(std::async(std::launch::async, evaluate, i));
    for (std::size_t i = 0; i < batch.size(); ++i) {
      try {
        rows[start + i] = batch[i].get();
      } catch (const Error& e) {
        throw Error(e.kind(), "sweep point " + std::to_string(start + i) + ": " + e.what());
      }
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "param_value,separability_mimo,separability_fso,evm_mimo_percent,evm_fso_percent,ser_mimo,ser_fso\n";
  for (const auto& r : rows) {
    for (double v : {r.param_value, r.separability_mimo, r.separability_fso, r.evm_mimo_percent, r.evm_fso_percent,
                     r.ser_mimo}) {
      out += format_csv_number(v);
      out += ',';
    }
    out += format_csv_number(r.ser_fso);
    out += '\n';
  }
  return out;
}

std::vector<DemoCell> run_demo(const std::filesystem::path& out_dir, const ExperimentConfig& base) {
  ensure_directory(out_dir);
  std::vector<DemoCell> cells;
  std::string summary = "scheme,mode,evm_percent,ser\n";
  for (Modulation scheme : {Modulation::QPSK, Modulation::QAM16, Modulation::QAM64}) {
    for (ChannelMode mode : {ChannelMode::MIMO, ChannelMode::FSO}) {
      ExperimentConfig c = base;
      c.modulation = scheme;
      const SimulationResult r = run_simulate(c, mode == ChannelMode::MIMO ? ModeSelection::MIMO : ModeSelection::FSO);
      std::string name(to_string(scheme));
      name += '_';
      name += to_string(mode);
      std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
      DemoCell cell{scheme, mode, r.report.evm_percent, r.report.ser, out_dir / (name + ".csv")};
      export_constellation(r.recovered, r.recovered_decisions, cell.constellation);
      summary += std::string(to_string(scheme)) + ',' + to_string(mode) + ',' + format_csv_number(cell.evm_percent) +
                 ',' + format_csv_number(cell.ser) + '\n';
      cells.push_back(std::move(cell));
    }
  }
  write_text(out_dir / "summary.csv", summary);
  return cells;
}

}  // namespace hbss
