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
#include <numbers>
#include <vector>

namespace alri {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Floor applied to the inferred per-axis coordinate error.
inline constexpr double kMinEpsilon = 1e-6;

/// Cartesian point in meters.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Spherical coordinates of a point as seen from the sensor origin.
///
/// `phi` is the elevation above the XY plane in [-pi/2, pi/2], `theta` the
/// azimuth in [0, 2pi) and `rho` the distance within the XY plane.
struct SphericalPoint {
  double r = 0.0;
  double phi = 0.0;
  double theta = 0.0;
  double rho = 0.0;
};

/// Ordered point set with optional per-point reflectance.
struct PointCloud {
  std::vector<Point3> points;
  /// Empty, or exactly one value per point.
  std::vector<float> intensities;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_intensities() const { return !intensities.empty(); }

  /// Throws ConfigError when the intensity channel length is inconsistent.
  void validate() const;
};

/// Per-axis coordinate error half-bound.
struct ErrorModel {
  double epsilon = kMinEpsilon;
};

/// Throws DegeneratePointError for the origin or non-finite input.
SphericalPoint to_spherical(const Point3& p);

/// Ideal forward model: range, elevation and azimuth back to Cartesian.
Point3 from_spherical(double r, double phi, double theta);

/// Wraps an angle into [0, 2pi).
double wrap_two_pi(double angle);

/// Wraps an angle into [0, period).
double wrap_period(double value, double period);

/// Infers the coordinate quantization half-step from the minimum nonzero
/// spacing of each axis. Requires at least two points and at least one axis
/// with two distinct values; throws QuantizationError otherwise.
ErrorModel infer_quantization(const PointCloud& cloud);

/// Worst-case elevation error of a point whose coordinates are each off by
/// at most `epsilon`:
///
///   eps * (rho + sqrt(2) |z|) / (rho^2 - sqrt(2) eps rho)
///
/// Throws GeometryError when rho <= sqrt(2) * epsilon.
double vertical_angle_bound(double rho, double z, double epsilon);

/// Returns true when every coordinate is finite and the point is not the
/// origin.
bool is_usable(const Point3& p);

}  // namespace alri
