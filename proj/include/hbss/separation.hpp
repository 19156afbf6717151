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

#include <array>
#include <optional>

namespace hbss {

// (1/N) Re(sum x x^H): the 2x2 real covariance used for whitening and for the
// blind separability estimate.
Eigen::Matrix2d real_covariance(const Observation& x);

struct Whitened {
  Observation z;
  Eigen::Matrix2d transform;  // T = Lambda^-1/2 E^T, z = T x
};

// T with T C T^T = I for a symmetric positive definite C.
Eigen::Matrix2d whitening_transform(const Eigen::Matrix2d& covariance);

Whitened whiten(const Observation& x);

// Fourth-order cumulant E|y|^4 - 2 (E|y|^2)^2 - |E y^2|. Zero for circular
// Gaussians, -1 for unit-power QPSK or a unit-modulus tone.
template <typename Derived>
double complex_kurtosis(const Eigen::MatrixBase<Derived>& y) {
  const Eigen::Index n = y.size();
  if (n < kMinStatisticSamples)
    throw Error(ErrorKind::InsufficientSamples,
                "kurtosis needs at least " + std::to_string(kMinStatisticSamples) + " samples, got " + std::to_string(n));
  double p2 = 0, p4 = 0;
  Complex q = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex v = y(k);
    const double a = std::norm(v);
    p2 += a;
    p4 += a * a;
    q += v * v;
  }
  const double inv = 1.0 / static_cast<double>(n);
  p2 *= inv;
  p4 *= inv;
  q *= inv;
  return p4 - 2.0 * p2 * p2 - std::norm(q);
}

// G(theta) = [[c, s], [-s, c]]; y = G z.
inline Eigen::Matrix2d givens(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return (Eigen::Matrix2d() << c, s, -s, c).finished();
}

// J(theta) = |kurt(y1)| + |kurt(y2)| for y = G(theta) z, evaluated in O(1)
// per angle from sample moments of z gathered once.
class RotationContrast {
 public:
  explicit RotationContrast(const Observation& z);

  double operator()(double theta) const;
  double kurtosis_of_first(double theta) const;

 private:
  double kurtosis(double c, double s) const;

  double ea_ = 0, eb_ = 0, em_ = 0;
  Complex q11_ = 0, q22_ = 0, q12_ = 0;
  double eaa_ = 0, ebb_ = 0, emm_ = 0, eab_ = 0, eam_ = 0, ebm_ = 0;
};

inline constexpr int kRotationGridPoints = 1024;
inline constexpr double kRotationTolerance = 1e-6;
inline constexpr double kLowConfidenceSpread = 0.01;

struct RotationEstimate {
  double angle = 0;     // in [0, pi/2)
  double contrast = 0;  // J(angle)
  bool low_confidence = false;
  double grid_angle = 0;
  double grid_contrast = 0;
};

// Grid search over [0, pi/2) then golden-section refinement around the best
// grid point. The refined angle is kept only if it does not lower J.
RotationEstimate find_rotation(const Observation& z);

struct DemixResult {
  Eigen::Matrix2d w;
  Observation outputs;
  double contrast = 0;
  bool low_confidence = false;
  std::optional<Eigen::Matrix2d> gain_matrix;  // W A, when the true A is known
};

DemixResult demix(const Observation& x, const std::optional<MixingMatrix>& truth = std::nullopt);

// Off-diagonal leakage of a gain matrix after picking the better permutation:
// 20 log10 max_i |off_i| / |diag_i|.
double gain_leakage_db(const Eigen::Matrix2d& g);

// out[k] = x[k - delay], zero outside the input support.
ComplexSequence shift(const ComplexSequence& x, Eigen::Index delay);

struct CancellationResult {
  ComplexSequence soi_estimate;
  Complex coefficient;
  Eigen::Index delay = 0;
};

// Integer-delay search plus complex least-squares gain; soi = x1 - c ref_d.
// Samples outside the overlap of x1 and ref_d are passed through unchanged.
CancellationResult cancel_with_reference(const ComplexSequence& x1, const ComplexSequence& reference,
                                         Eigen::Index max_delay);

inline constexpr Eigen::Index kMinPilotLength = 16;
inline constexpr double kPilotCorrelationThreshold = 0.5;

struct PilotAlignment {
  int channel = 0;
  Complex gain;
  std::array<double, 2> correlation{};
  bool resolved() const { return correlation[static_cast<std::size_t>(channel)] >= kPilotCorrelationThreshold; }
};

// Picks the output best correlated with the pilot over the pilot window and
// the least-squares gain g minimizing |g y - pilot|^2 there. Never throws on
// weak correlation; see resolve_ambiguity for the strict form.
PilotAlignment fit_pilot_alignment(const Observation& outputs, const ComplexSequence& pilot);

ComplexSequence apply_alignment(const Observation& outputs, const PilotAlignment& alignment);

ComplexSequence resolve_ambiguity(const Observation& outputs, const ComplexSequence& pilot);

}  // namespace hbss
