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

#include "hbss/types.hpp"

namespace hbss {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidBitLength: return "InvalidBitLength";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::DegenerateFsoGain: return "DegenerateFsoGain";
    case ErrorKind::DegenerateRow: return "DegenerateRow";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::DegenerateReference: return "DegenerateReference";
    case ErrorKind::Singular: return "SingularError";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::AmbiguityUnresolved: return "AmbiguityUnresolved";
    case ErrorKind::InvalidPilot: return "InvalidPilot";
    case ErrorKind::InvalidPower: return "InvalidPower";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace hbss
