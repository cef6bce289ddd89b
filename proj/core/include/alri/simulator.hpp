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
#include <functional>
#include <string>
#include <vector>

#include "alri/geometry.hpp"
#include "alri/intrinsics.hpp"

namespace alri {

/// Deterministic range for (beam, sample, elevation, nominal azimuth, retry).
using RangeSampler = std::function<double(std::size_t beam, long sample, double phi, double theta, int attempt)>;

/// Uniform ranges in [min, max], counter-based so the order of calls does
/// not matter.
RangeSampler scene_uniform(double min, double max, std::uint64_t seed);

struct TerrainParams {
  double range_min = 3.0;
  double range_max = 80.0;
  double sensor_height = 1.73;
  /// Log-amplitude of the azimuthal modulation.
  double amplitude = 0.6;
  int harmonics = 8;
  /// Upright occluders (walls, vehicles, poles) spread over the azimuth.
  int objects = 48;
  /// Standard deviation of the Gaussian range noise along each ray (m).
  double range_noise = 0.02;
};

/// Ground-plane ranges for downward beams, a far backdrop for the rest,
/// modulated by a smooth random Fourier series in azimuth, with upright
/// occluders in front.
RangeSampler scene_terrain(const TerrainParams& params, std::uint64_t seed);

enum class SceneKind { uniform, terrain };

const char* to_string(SceneKind k);

struct SparseBeam {
  std::size_t beam = 0;
  std::size_t points = 0;
};

struct SensorSpec {
  std::vector<BeamIntrinsics> beams;
  double quantization_step = 0.0;  // m, 0 = none
  double range_min = 3.0;
  double range_max = 80.0;
  double dropout = 0.0;
  std::uint64_t seed = 1;
  SceneKind scene = SceneKind::uniform;
  bool shuffle = false;
  /// Beams that keep exactly `points` samples regardless of dropout.
  std::vector<SparseBeam> sparse_beams;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;

  /// Ground-truth intrinsics (epsilon set from the quantization step).
  SensorIntrinsics intrinsics() const;
};

struct PointLabel {
  std::size_t beam = 0;
  long sample = 0;
  double range = 0.0;
};

struct LabeledCloud {
  PointCloud cloud;
  std::vector<PointLabel> labels;
  std::size_t dropped_samples = 0;
};

/// Forward sensor model over every (beam, sample) pair that survives dropout.
LabeledCloud synthesize(const SensorSpec& spec);
LabeledCloud synthesize(const SensorSpec& spec, const RangeSampler& scene);

/// 64 beams, H = 4000, elevations spread over [-24.9, 2.0] deg, oy in
/// [100, 210] mm, ox in [-26, 26] mm, 1 mm quantization.
SensorSpec kitti_like(std::uint64_t seed, double dropout = 0.0);

/// 128 beams, H = 2048, elevations over [-22.5, 22.5] deg, oy in [25, 40] mm,
/// ox in [-1, 1] mm, 1 mm quantization.
SensorSpec durlar_like(std::uint64_t seed, double dropout = 0.0);

/// SplitMix64 finalizer, exposed for seeding derived streams.
std::uint64_t mix64(std::uint64_t x);

/// Uniform double in [0, 1) from a 64-bit key.
double unit_from(std::uint64_t key);

}  // namespace alri
