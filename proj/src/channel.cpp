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

#include "hbss/channel.hpp"

#include "hbss/signals.hpp"

namespace hbss {

MixingMatrix::MixingMatrix(const Eigen::Matrix2d& gains) : gains_(gains) {
  if (!all_finite(gains_)) throw Error(ErrorKind::InvalidArgument, "mixing gains must be finite");
  if ((gains_.array() < 0.0).any()) throw Error(ErrorKind::InvalidArgument, "mixing gains must be nonnegative");
  if (!(gains_.maxCoeff() > 0.0)) throw Error(ErrorKind::InvalidArgument, "mixing matrix must have a positive entry");
}

MixingMatrix::MixingMatrix(double a11, double a12, double a21, double a22)
    : MixingMatrix((Eigen::Matrix2d() << a11, a12, a21, a22).finished()) {}

MixingMatrix mixing_from_geometry(const Geometry& g, double reference_distance_cm) {
  if (!(reference_distance_cm > 0)) throw Error(ErrorKind::InvalidArgument, "reference distance must be positive");
  const Point rx[2] = {g.rx1, g.rx2};
  const Point tx[2] = {g.tx_soi, g.tx_int};
  const char* rx_name[2] = {"rx1", "rx2"};
  const char* tx_name[2] = {"tx_soi", "tx_int"};
  Eigen::Matrix2d a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double d = std::hypot(tx[j].x - rx[i].x, tx[j].y - rx[i].y);
      if (!std::isfinite(d)) throw Error(ErrorKind::DegenerateGeometry, "non-finite antenna coordinates");
      if (!(d > 0))
        throw Error(ErrorKind::DegenerateGeometry,
                    std::string(tx_name[j]) + " coincides with " + rx_name[i] + " (zero distance)");
      a(i, j) = reference_distance_cm / d;
    }
  return MixingMatrix(a);
}

Observation mix(const MixingMatrix& a, const ComplexSequence& soi, const ComplexSequence& interference, double snr_db,
                std::uint64_t seed) {
  if (soi.size() != interference.size())
    throw Error(ErrorKind::LengthMismatch, "source lengths differ (" + std::to_string(soi.size()) + " vs " +
                                               std::to_string(interference.size()) + ")");
  Observation sources(2, soi.size());
  sources.row(0) = soi.transpose();
  sources.row(1) = interference.transpose();
  Observation x = a.gains().cast<Complex>() * sources;
  if (std::isinf(snr_db) && snr_db > 0) return x;
  for (Eigen::Index i = 0; i < 2; ++i) {
    const ComplexSequence row = x.row(i).transpose();
    x.row(i) = add_awgn(row, snr_db, seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1))).transpose();
  }
  return x;
}

MixingMatrix apply_fso_override(const MixingMatrix& a) {
  if (!(a(1, 1) > 0)) throw Error(ErrorKind::DegenerateFsoGain, "a22 must be positive to carry the FSO reference");
  Eigen::Matrix2d g = a.gains();
  g(1, 0) = 0.0;
  return MixingMatrix(g);
}

}  // namespace hbss
