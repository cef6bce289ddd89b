// Copyright 2026 The alri Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "alri/geometry.hpp"
#include "alri/horizontal.hpp"
#include "alri/vertical.hpp"

namespace alri {

/// Geometric model of one laser.
struct BeamIntrinsics {
  double phi = 0.0;        // rad
  double oy = 0.0;         // m
  double ox = 0.0;         // m
  double theta_off = 0.0;  // rad
  long H = 0;              // samples per revolution; 0 marks an invalid beam
  VerticalOrigin vertical_origin = VerticalOrigin::wls;
  HorizontalOrigin horizontal_origin = HorizontalOrigin::search;
  /// Points assigned to the beam during estimation (0 when not estimated).
  std::size_t points = 0;

  bool valid() const { return H > 0; }
};

/// Full sensor model, beams in ascending elevation.
struct SensorIntrinsics {
  std::vector<BeamIntrinsics> beams;
  double epsilon = kMinEpsilon;

  std::size_t size() const { return beams.size(); }

  /// Least common multiple of the valid H values. Throws ConfigError when
  /// there is no valid beam or the result exceeds `limit`.
  std::uint64_t width(std::uint64_t limit = 1u << 26) const;

  /// Throws ConfigError when the record violates its invariants.
  void validate() const;
};

/// Per-beam table plus L, width and epsilon.
std::string intrinsics_summary(const SensorIntrinsics& s);

}  // namespace alri
