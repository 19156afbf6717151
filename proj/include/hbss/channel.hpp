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

#include <cmath>
#include <optional>
#include <string>

namespace hbss {

struct Point {
  double x = 0;  // cm
  double y = 0;  // cm
};

struct Geometry {
  Point tx_soi;
  Point tx_int;
  Point rx1;
  Point rx2;

  // Two receivers 2 cm apart, SOI transmitter on their bisector at 111 cm,
  // interferer at (36, 48): 60 cm from the receiver midpoint, off-axis.
  static Geometry default_layout() { return {{0, 111}, {36, 48}, {-1, 0}, {1, 0}}; }
};

// Nonnegative real 2x2 channel gains. Row i = receiver i, column 0 = SOI,
// column 1 = interference.
class MixingMatrix {
 public:
  explicit MixingMatrix(const Eigen::Matrix2d& gains);
  MixingMatrix(double a11, double a12, double a21, double a22);

  const Eigen::Matrix2d& gains() const noexcept { return gains_; }
  double operator()(Eigen::Index row, Eigen::Index col) const { return gains_(row, col); }

 private:
  Eigen::Matrix2d gains_;
};

enum class ChannelMode { MIMO, FSO };

inline const char* to_string(ChannelMode m) noexcept { return m == ChannelMode::MIMO ? "MIMO" : "FSO"; }

// Inverse-distance amplitude law a_ij = d0 / |tx_j - rx_i|.
MixingMatrix mixing_from_geometry(const Geometry& geometry, double reference_distance_cm = 1.0);

// x = A s followed by independent AWGN on each receiver at snr_db relative to
// that receiver's own signal power. Receiver i's noise depends only on
// (seed, i), so two matrices sharing a row produce identical rows.
Observation mix(const MixingMatrix& a, const ComplexSequence& soi, const ComplexSequence& interference, double snr_db,
                std::uint64_t seed);

// FSO link replaces receiver 2: a21 -> 0, a22 kept.
MixingMatrix apply_fso_override(const MixingMatrix& a);

// Induced 1-norm: maximum absolute column sum.
template <typename Derived>
typename Derived::Scalar matrix_one_norm(const Eigen::MatrixBase<Derived>& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

template <typename Derived>
std::optional<Eigen::Matrix<typename Derived::Scalar, 2, 2>> try_invert_2x2(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  static_assert(Derived::RowsAtCompileTime == 2 && Derived::ColsAtCompileTime == 2, "2x2 matrix expected");
  const Scalar det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const Scalar norm = matrix_one_norm(a);
  if (!(std::abs(det) > Scalar(1e-12) * norm * norm)) return std::nullopt;
  Eigen::Matrix<Scalar, 2, 2> inv;
  inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  return inv / det;
}

// Adjugate inverse; throws Singular when |det| <= 1e-12 * ||A||_1^2.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 2, 2> invert_2x2(const Eigen::MatrixBase<Derived>& a) {
  auto inv = try_invert_2x2(a);
  if (!inv) throw Error(ErrorKind::Singular, "matrix is singular to working precision (condition number is infinite)");
  return *inv;
}

// ||A||_1 * ||A^-1||_1, +inf when A is singular.
template <typename Derived>
typename Derived::Scalar condition_number(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const auto inv = try_invert_2x2(a);
  if (!inv) return std::numeric_limits<Scalar>::infinity();
  return matrix_one_norm(a) * matrix_one_norm(*inv);
}

// Each row scaled so its largest-magnitude entry is 1 (receiver AGC).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 2, 2> row_normalized(const Eigen::MatrixBase<Derived>& a) {
  Eigen::Matrix<typename Derived::Scalar, 2, 2> out = a;
  for (Eigen::Index i = 0; i < 2; ++i) {
    const auto peak = out.row(i).cwiseAbs().maxCoeff();
    if (!(peak > 0)) throw Error(ErrorKind::DegenerateRow, "row " + std::to_string(i + 1) + " has no positive entry");
    out.row(i) /= peak;
  }
  return out;
}

// Condition number after row normalization; the controller's switching statistic.
template <typename Derived>
typename Derived::Scalar separability_index(const Eigen::MatrixBase<Derived>& a) {
  return condition_number(row_normalized(a));
}

inline double condition_number(const MixingMatrix& a) { return condition_number(a.gains()); }
inline double separability_index(const MixingMatrix& a) { return separability_index(a.gains()); }

}  // namespace hbss
