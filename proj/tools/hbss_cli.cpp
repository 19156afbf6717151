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
#include "hbss/separation.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

// 0 = success, 1 = config error, 2 = runtime/model error, 3 = I/O error.
int exit_code_for(hbss::ErrorKind kind) {
  switch (kind) {
    case hbss::ErrorKind::Config: return 1;
    case hbss::ErrorKind::Io: return 3;
    default: return 2;
  }
}

hbss::ExperimentConfig config_or_default(const std::string& path) {
  return path.empty() ? hbss::ExperimentConfig{} : hbss::load_config(path);
}

Eigen::Matrix2d parse_matrix(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw hbss::Error(hbss::ErrorKind::Config, "--matrix: '" + item + "' is not a number");
    }
  }
  if (v.size() != 4) throw hbss::Error(hbss::ErrorKind::Config, "--matrix: expected a11,a12,a21,a22");
  return (Eigen::Matrix2d() << v[0], v[1], v[2], v[3]).finished();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid FSO/MIMO blind source separation simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, mode = "auto", param, matrix;
  std::optional<std::uint64_t> seed;
  double from = 0, to = 0;
  int steps = 0;

  auto* simulate = app.add_subcommand("simulate", "Run one experiment and write report.json plus constellation CSVs");
  simulate->add_option("--config", config_path, "Experiment config (JSON)")->required();
  simulate->add_option("--out", out_path, "Output directory")->required();
  simulate->add_option("--seed", seed, "Override the config seed");
  simulate->add_option("--mode", mode, "auto | mimo | fso")->check(CLI::IsMember({"auto", "mimo", "fso"}));

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and write a CSV table");
  sweep->add_option("--param", param, "rx_spacing_cm | snr_db | kappa_hi")
      ->required()
      ->check(CLI::IsMember({"rx_spacing_cm", "snr_db", "kappa_hi"}));
  sweep->add_option("--from", from, "First value")->required();
  sweep->add_option("--to", to, "Last value")->required();
  sweep->add_option("--steps", steps, "Number of points (>= 2)")->required();
  sweep->add_option("--config", config_path, "Base experiment config (JSON)")->required();
  sweep->add_option("--out", out_path, "Output CSV file")->required();

  auto* cond = app.add_subcommand("cond", "Print the 1-norm condition number and separability index of a 2x2 matrix");
  cond->add_option("--matrix", matrix, "a11,a12,a21,a22")->required();

  auto* demo = app.add_subcommand("demo", "QPSK/16QAM/64QAM x MIMO/FSO constellation grid on the default geometry");
  demo->add_option("--out", out_path, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*simulate) {
      auto config = hbss::load_config(config_path);
      if (seed) config.seed = *seed;
      const auto result = hbss::run_simulate(config, hbss::mode_selection_from_string(mode));
      hbss::write_simulation_outputs(result, out_path);
      const auto& r = result.report;
      std::cout << "evm_percent " << hbss::format_decimal(r.evm_percent) << "\n"
                << "ser " << hbss::format_decimal(r.ser) << "\n"
                << "ber " << hbss::format_decimal(r.ber) << "\n"
                << "suppression_db " << hbss::format_decimal(r.suppression_db) << "\n"
                << "separability_before " << hbss::format_decimal(r.separability_before) << "\n"
                << "separability_after " << hbss::format_decimal(r.separability_after) << "\n";
    } else if (*sweep) {
      const auto base = config_or_default(config_path);
      hbss::SweepSpec spec{hbss::sweep_param_from_string(param), from, to, steps};
      const std::string csv = hbss::sweep_csv(hbss::run_sweep(spec, base));
      std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
      if (!out) throw hbss::Error(hbss::ErrorKind::Io, "cannot open '" + out_path + "' for writing");
      out << csv;
      if (!out.flush()) throw hbss::Error(hbss::ErrorKind::Io, "write to '" + out_path + "' failed");
    } else if (*cond) {
      const Eigen::Matrix2d a = parse_matrix(matrix);
      const double kappa = hbss::condition_number(a);
      const double index = hbss::separability_index(a);
      std::cout << "condition_number " << hbss::format_decimal(kappa) << "\n"
                << "separability_index " << hbss::format_decimal(index) << "\n";
    } else if (*demo) {
      const auto cells = hbss::run_demo(out_path);
      std::printf("%-6s %-5s %12s %12s\n", "scheme", "mode", "evm_percent", "ser");
      for (const auto& c : cells)
        std::printf("%-6s %-5s %12s %12s\n", std::string(hbss::to_string(c.scheme)).c_str(), hbss::to_string(c.mode),
                    hbss::format_decimal(c.evm_percent).c_str(), hbss::format_decimal(c.ser).c_str());
    }
  } catch (const hbss::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
