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
#include <vector>

#include "alri/geometry.hpp"
#include "alri/intrinsics.hpp"

namespace alri {

/// Row-major grid of ranges in meters; 0.0 marks an empty pixel. Row 0
/// holds the beam with the highest elevation.
struct RangeImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> ranges;

  RangeImage() = default;
  RangeImage(std::size_t w, std::size_t h) : width(w), height(h), ranges(w * h, 0.0) {}

  double& at(std::size_t u, std::size_t v) { return ranges[v * width + u]; }
  double at(std::size_t u, std::size_t v) const { return ranges[v * width + u]; }
  std::size_t occupied() const;
};

struct ProjectionReport {
  std::size_t projected = 0;
  std::size_t collisions = 0;
  std::size_t out_of_bounds = 0;
  double occupancy = 0.0;
};

struct ProjectionResult {
  RangeImage image;
  ProjectionReport report;
  /// Pixel index (v * width + u) that each input point landed on, or -1.
  std::vector<std::int64_t> pixel_of;
};

/// Lossless projection with the given sensor model.
ProjectionResult project(const PointCloud& cloud, const SensorIntrinsics& s);

/// Inverse of project; points come out in row-major pixel order.
/// Throws ConfigError when the image does not match the intrinsics.
PointCloud unproject(const RangeImage& image, const SensorIntrinsics& s);

/// Beam whose elevation curve is closest to (r, phi), ignoring invalid
/// beams; ties go to the lower index. Returns -1 when no beam applies.
long assign_beam(const SensorIntrinsics& s, double r, double phi);

/// Uniform-elevation baseline projector over [phi_min, phi_max].
ProjectionResult project_pbea(const PointCloud& cloud, std::size_t width, std::size_t height, double phi_min, double phi_max);

/// Inverse of project_pbea using bin-centre elevations.
PointCloud unproject_pbea(const RangeImage& image, double phi_min, double phi_max);

}  // namespace alri
