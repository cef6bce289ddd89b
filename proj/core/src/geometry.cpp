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

#include "alri/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "alri/errors.hpp"

namespace alri {

void PointCloud::validate() const {
  if (!intensities.empty() && intensities.size() != points.size()) {
    throw ConfigError("intensity channel has " + std::to_string(intensities.size()) +
                      " values for " + std::to_string(points.size()) + " points");
  }
}

bool is_usable(const Point3& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) return false;
  return p.x != 0.0 || p.y != 0.0 || p.z != 0.0;
}

double wrap_two_pi(double angle) { return wrap_period(angle, kTwoPi); }

double wrap_period(double value, double period) {
  double w = std::fmod(value, period);
  if (w < 0.0) w += period;
  // fmod of a tiny negative value can round back up to exactly `period`.
  if (w >= period) w = 0.0;
  return w;
}

SphericalPoint to_spherical(const Point3& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
    throw DegeneratePointError("non-finite point");
  }
  const double rho = std::hypot(p.x, p.y);
  const double r = std::hypot(rho, p.z);
  if (r == 0.0) throw DegeneratePointError("point at the sensor origin");
  SphericalPoint s;
  s.r = r;
  s.rho = rho;
  s.phi = std::asin(std::clamp(p.z / r, -1.0, 1.0));
  s.theta = wrap_two_pi(std::atan2(p.y, p.x));
  return s;
}

Point3 from_spherical(double r, double phi, double theta) {
  const double c = std::cos(phi);
  return {r * c * std::cos(theta), r * c * std::sin(theta), r * std::sin(phi)};
}

namespace {

double min_nonzero_spacing(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    if (d > 0.0 && d < best) best = d;
  }
  return best;
}

}  // namespace

ErrorModel infer_quantization(const PointCloud& cloud) {
  if (cloud.size() < 2) throw QuantizationError("quantization inference needs at least two points");
  std::vector<double> axis(cloud.size());
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point3& p = cloud.points[i];
      axis[i] = a == 0 ? p.x : (a == 1 ? p.y : p.z);
    }
    best = std::min(best, min_nonzero_spacing(axis));
  }
  if (!std::isfinite(best)) throw QuantizationError("all coordinates are identical on every axis");
  return ErrorModel{std::max(best / 2.0, kMinEpsilon)};
}

double vertical_angle_bound(double rho, double z, double epsilon) {
  constexpr double kSqrt2 = std::numbers::sqrt2;
  const double denom = rho * rho - kSqrt2 * epsilon * rho;
  if (!(rho > kSqrt2 * epsilon) || !(denom > 0.0)) {
    throw GeometryError("point too close to the sensor axis for an elevation bound");
  }
  return epsilon * (rho + kSqrt2 * std::abs(z)) / denom;
}

}  // namespace alri
