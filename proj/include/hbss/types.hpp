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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbss {

// One complex baseband stream, one sample per symbol.
template <typename Scalar = double>
using Sequence = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

// Receiver observation: row 0 is x1, row 1 is x2. Equal lengths by construction.
template <typename Scalar = double>
using ObservationOf = Eigen::Matrix<std::complex<Scalar>, 2, Eigen::Dynamic, Eigen::RowMajor>;

using Complex = std::complex<double>;
using ComplexSequence = Sequence<double>;
using Observation = ObservationOf<double>;
using BitStream = std::vector<std::uint8_t>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class ErrorKind {
  InvalidArgument,
  InvalidBitLength,
  EmptyInput,
  LengthMismatch,
  DegenerateGeometry,
  DegenerateFsoGain,
  DegenerateRow,
  DegenerateInput,
  DegenerateReference,
  Singular,
  InsufficientSamples,
  AmbiguityUnresolved,
  InvalidPilot,
  InvalidPower,
  Config,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

// All library failures are reported through this type; kind() tells callers
// (and the CLI exit-code mapping) which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Minimum sample count for every second/fourth-order statistic.
inline constexpr Eigen::Index kMinStatisticSamples = 100;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const auto v = x(i, j);
      if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
      } else {
        if (!std::isfinite(v)) return false;
      }
    }
  return true;
}

template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real mean_power(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() == 0) return 0;
  return x.squaredNorm() / static_cast<typename Eigen::NumTraits<typename Derived::Scalar>::Real>(x.size());
}

}  // namespace hbss
