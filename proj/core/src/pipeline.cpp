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

#include "alri/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include <spdlog/spdlog.h>

#include "alri/errors.hpp"
#include "alri/log.hpp"

namespace alri {

PointCloud drop_unusable(const PointCloud& cloud, std::size_t* dropped) {
  cloud.validate();
  PointCloud out;
  out.points.reserve(cloud.size());
  if (cloud.has_intensities()) out.intensities.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!is_usable(cloud.points[i])) continue;
    out.points.push_back(cloud.points[i]);
    if (cloud.has_intensities()) out.intensities.push_back(cloud.intensities[i]);
  }
  if (dropped != nullptr) *dropped = cloud.size() - out.size();
  return out;
}

SensorIntrinsics estimate_intrinsics(const PointCloud& input, const FeatureToggles& toggles, const EstimationOptions& options,
                                     EstimationDetails* details) {
  std::size_t dropped = 0;
  const PointCloud cloud = drop_unusable(input, &dropped);
  if (dropped > 0) logger().info("dropped {} zero-norm or non-finite points", dropped);
  if (cloud.empty()) throw EstimationError("point cloud is empty after dropping unusable points");
  if (cloud.size() < 2) throw EstimationError("point cloud needs at least two points");

  ErrorModel em;
  try {
    em = infer_quantization(cloud);
  } catch (const QuantizationError& e) {
    throw EstimationError(std::string("quantization inference failed: ") + e.what());
  }
  logger().debug("inferred epsilon {} m", em.epsilon);

  VerticalResult vr = detect_scanlines(cloud, em.epsilon, toggles, options.vertical);

  SensorIntrinsics s;
  s.epsilon = em.epsilon;
  s.beams.resize(vr.scanlines.size());
  std::vector<std::vector<AzimuthObservation>> azimuths(vr.scanlines.size());
  for (std::size_t l = 0; l < vr.scanlines.size(); ++l) {
    const ScanlineFit& f = vr.scanlines[l];
    BeamIntrinsics& b = s.beams[l];
    b.phi = f.phi;
    b.oy = f.oy;
    b.vertical_origin = f.origin;
    b.points = f.members.size();
    for (std::size_t m : f.members) {
      const Point3& p = cloud.points[m];
      if (p.x == 0.0 && p.y == 0.0) continue;
      azimuths[l].push_back(make_azimuth_observation(m, p));
    }
  }

  std::vector<std::size_t> order(s.beams.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return azimuths[a].size() > azimuths[b].size(); });

  std::vector<ResolutionOffset> pool;
  std::vector<std::size_t> deferred;
  for (std::size_t l : order) {
    BeamIntrinsics& b = s.beams[l];
    const auto& obs = azimuths[l];
    const bool dense = obs.size() >= options.dense_threshold;
    if (!dense && toggles.horizontal_heuristics) {
      deferred.push_back(l);
      continue;
    }
    try {
      const ScanlineHorizontal h = estimate_horizontal(obs, options.horizontal);
      b.H = h.H;
      b.ox = h.ox;
      b.theta_off = h.theta_off;
      b.horizontal_origin = HorizontalOrigin::search;
      pool.push_back({h.H, h.ox});
    } catch (const EstimationError& e) {
      logger().debug("beam {}: horizontal search failed: {}", l, e.what());
      if (toggles.horizontal_heuristics) {
        deferred.push_back(l);
      } else {
        b.H = 0;
        b.horizontal_origin = HorizontalOrigin::invalid;
      }
    }
  }
  for (std::size_t l : deferred) {
    BeamIntrinsics& b = s.beams[l];
    const auto& obs = azimuths[l];
    if (pool.empty() || obs.empty()) {
      b.H = 0;
      b.horizontal_origin = HorizontalOrigin::invalid;
      continue;
    }
    const ScanlineHorizontal h = heuristic_horizontal(obs, pool);
    b.H = h.H;
    b.ox = h.ox;
    b.theta_off = h.theta_off;
    b.horizontal_origin = HorizontalOrigin::heuristic;
  }

  // Scanlines come out of the vertical stage sorted; equal elevations can
  // only appear when conflict checks are off.
  for (std::size_t l = 1; l < s.beams.size(); ++l) {
    if (!(s.beams[l - 1].phi < s.beams[l].phi)) logger().warn("beams {} and {} share an elevation", l - 1, l);
  }

  if (details != nullptr) {
    details->input_points = input.size();
    details->dropped_points = dropped;
    details->vertical = std::move(vr);
  }
  return s;
}

}  // namespace alri
