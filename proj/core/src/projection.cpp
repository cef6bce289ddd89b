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

#include "alri/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "alri/errors.hpp"

namespace alri {

std::size_t RangeImage::occupied() const {
  return static_cast<std::size_t>(std::count_if(ranges.begin(), ranges.end(), [](double r) { return r != 0.0; }));
}

namespace {

// Valid beams sorted by elevation, with the largest |oy| for pruning.
struct BeamTable {
  std::vector<std::size_t> ids;
  std::vector<double> phi;
  double max_abs_oy = 0.0;

  explicit BeamTable(const SensorIntrinsics& s) {
    for (std::size_t l = 0; l < s.beams.size(); ++l) {
      if (s.beams[l].valid()) ids.push_back(l);
    }
    std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return s.beams[a].phi < s.beams[b].phi; });
    for (std::size_t l : ids) {
      phi.push_back(s.beams[l].phi);
      max_abs_oy = std::max(max_abs_oy, std::abs(s.beams[l].oy));
    }
  }
};

long assign_with(const SensorIntrinsics& s, const BeamTable& t, double r, double phi_i) {
  long best = -1;
  double best_err = std::numeric_limits<double>::infinity();
  auto consider = [&](std::size_t l) {
    const BeamIntrinsics& b = s.beams[l];
    if (!(std::abs(b.oy) < r)) return;
    const double e = std::abs(phi_i - b.phi - std::asin(b.oy / r));
    if (e < best_err || (e == best_err && static_cast<long>(l) < best)) {
      best_err = e;
      best = static_cast<long>(l);
    }
  };
  if (t.ids.empty()) return -1;
  if (!(t.max_abs_oy < r)) {
    for (std::size_t l : t.ids) consider(l);
    return best;
  }
  // |phi_i - phi_l - asin(oy_l / r)| >= |phi_i - phi_l| - asin(max|oy| / r)
  const double reach = std::asin(t.max_abs_oy / r);
  const auto n = static_cast<long>(t.ids.size());
  const long mid = static_cast<long>(std::lower_bound(t.phi.begin(), t.phi.end(), phi_i) - t.phi.begin());
  long up = mid;
  long down = mid - 1;
  while (up < n || down >= 0) {
    const double gap_up = up < n ? t.phi[static_cast<std::size_t>(up)] - phi_i - reach : std::numeric_limits<double>::infinity();
    const double gap_down = down >= 0 ? phi_i - t.phi[static_cast<std::size_t>(down)] - reach : std::numeric_limits<double>::infinity();
    const bool take_up = gap_up <= gap_down;
    const double gap = take_up ? gap_up : gap_down;
    if (gap > best_err + 1e-15) break;
    if (take_up) {
      consider(t.ids[static_cast<std::size_t>(up++)]);
    } else {
      consider(t.ids[static_cast<std::size_t>(down--)]);
    }
  }
  return best;
}

inline std::size_t wrap_index(double x, std::size_t width) {
  const double k = std::floor(x + 0.5);
  const auto w = static_cast<long long>(width);
  long long u = static_cast<long long>(k) % w;
  if (u < 0) u += w;
  return static_cast<std::size_t>(u);
}

void place(ProjectionResult& out, std::size_t point, std::size_t pixel, double r) {
  double& cell = out.image.ranges[pixel];
  out.pixel_of[point] = static_cast<std::int64_t>(pixel);
  if (cell == 0.0) {
    cell = r;
    ++out.report.projected;
    return;
  }
  ++out.report.collisions;
  if (r < cell) cell = r;
}

void finish(ProjectionResult& out) {
  const double pixels = static_cast<double>(out.image.width * out.image.height);
  out.report.occupancy = pixels > 0 ? static_cast<double>(out.report.projected) / pixels : 0.0;
}

}  // namespace

long assign_beam(const SensorIntrinsics& s, double r, double phi) {
  return assign_with(s, BeamTable(s), r, phi);
}

ProjectionResult project(const PointCloud& cloud, const SensorIntrinsics& s) {
  s.validate();
  const std::size_t width = static_cast<std::size_t>(s.width());
  const std::size_t height = s.size();
  ProjectionResult out;
  out.image = RangeImage(width, height);
  out.pixel_of.assign(cloud.size(), -1);
  const BeamTable table(s);
  const double scale = static_cast<double>(width) / kTwoPi;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    if (!is_usable(p)) {
      ++out.report.out_of_bounds;
      continue;
    }
    const SphericalPoint sp = to_spherical(p);
    const long l = assign_with(s, table, sp.r, sp.phi);
    if (l < 0) {
      ++out.report.out_of_bounds;
      continue;
    }
    const BeamIntrinsics& b = s.beams[static_cast<std::size_t>(l)];
    const double rho = sp.r * std::cos(sp.phi);
    if (!(std::abs(b.ox) < rho)) {
      ++out.report.out_of_bounds;
      continue;
    }
    const double corrected = sp.theta - std::asin(b.ox / rho) - b.theta_off;
    const std::size_t u = wrap_index(corrected * scale, width);
    const std::size_t v = height - static_cast<std::size_t>(l) - 1;
    place(out, i, v * width + u, sp.r);
  }
  finish(out);
  return out;
}

PointCloud unproject(const RangeImage& image, const SensorIntrinsics& s) {
  s.validate();
  const std::size_t width = static_cast<std::size_t>(s.width());
  if (image.width != width || image.height != s.size() || image.ranges.size() != image.width * image.height)
    throw ConfigError("range image dimensions do not match the intrinsics");
  PointCloud out;
  out.points.reserve(image.occupied());
  const double step = kTwoPi / static_cast<double>(width);
  for (std::size_t v = 0; v < image.height; ++v) {
    const BeamIntrinsics& b = s.beams[image.height - v - 1];
    for (std::size_t u = 0; u < image.width; ++u) {
      const double r = image.ranges[v * width + u];
      if (r == 0.0) continue;
      const double phi = b.phi + std::asin(std::clamp(b.oy / r, -1.0, 1.0));
      const double rho = r * std::cos(phi);
      const double theta = step * static_cast<double>(u) + b.theta_off + std::asin(std::clamp(b.ox / rho, -1.0, 1.0));
      out.points.push_back(from_spherical(r, phi, theta));
    }
  }
  return out;
}

ProjectionResult project_pbea(const PointCloud& cloud, std::size_t width, std::size_t height, double phi_min, double phi_max) {
  if (width == 0 || height == 0) throw ConfigError("pbea: image dimensions must be positive");
  if (!(phi_min < phi_max)) throw ConfigError("pbea: empty elevation range");
  ProjectionResult out;
  out.image = RangeImage(width, height);
  out.pixel_of.assign(cloud.size(), -1);
  const double rows = static_cast<double>(height - 1);
  const double scale = static_cast<double>(width) / kTwoPi;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    if (!is_usable(p)) {
      ++out.report.out_of_bounds;
      continue;
    }
    const SphericalPoint sp = to_spherical(p);
    const double t = std::clamp((sp.phi - phi_min) / (phi_max - phi_min), 0.0, 1.0);
    const auto bin = static_cast<std::size_t>(std::floor(t * rows + 0.5));
    const std::size_t v = height - 1 - bin;
    const std::size_t u = wrap_index(sp.theta * scale, width);
    place(out, i, v * width + u, sp.r);
  }
  finish(out);
  return out;
}

PointCloud unproject_pbea(const RangeImage& image, double phi_min, double phi_max) {
  if (!(phi_min < phi_max)) throw ConfigError("pbea: empty elevation range");
  PointCloud out;
  const double rows = static_cast<double>(image.height > 1 ? image.height - 1 : 1);
  const double step = kTwoPi / static_cast<double>(image.width);
  for (std::size_t v = 0; v < image.height; ++v) {
    const double bin = static_cast<double>(image.height - 1 - v);
    const double phi = image.height > 1 ? phi_min + bin / rows * (phi_max - phi_min) : 0.5 * (phi_min + phi_max);
    for (std::size_t u = 0; u < image.width; ++u) {
      const double r = image.ranges[v * image.width + u];
      if (r == 0.0) continue;
      out.points.push_back(from_spherical(r, phi, step * static_cast<double>(u)));
    }
  }
  return out;
}

}  // namespace alri
