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

#include "alri/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "alri/errors.hpp"

namespace alri {

namespace {

constexpr std::size_t kLeafSize = 8;

inline double coord(const Point3& p, int axis) {
  return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
}

inline double dist2(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

KdTree::KdTree(std::span<const Point3> points) : points_(points.begin(), points.end()), ids_(points.size()) {
  std::iota(ids_.begin(), ids_.end(), std::size_t{0});
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, points_.size());
  }
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end, -1, 0.0, 0, 0});
  if (end - begin <= kLeafSize) return id;
  double lo[3] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double hi[3] = {-lo[0], -lo[1], -lo[2]};
  for (std::size_t i = begin; i < end; ++i) {
    const Point3& p = points_[ids_[i]];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], coord(p, a));
      hi[a] = std::max(hi[a], coord(p, a));
    }
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }
  if (!(hi[axis] > lo[axis])) return id;  // all points coincide
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(ids_.begin() + static_cast<std::ptrdiff_t>(begin), ids_.begin() + static_cast<std::ptrdiff_t>(mid),
                   ids_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return coord(points_[a], axis) < coord(points_[b], axis); });
  const double split = coord(points_[ids_[mid]], axis);
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  Node& n = nodes_[id];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return id;
}

void KdTree::search(std::size_t node, const Point3& q, std::size_t& best, double& best_d2) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (std::size_t i = n.begin; i < n.end; ++i) {
      const std::size_t id = ids_[i];
      const double d2 = dist2(points_[id], q);
      if (d2 < best_d2 || (d2 == best_d2 && id < best)) {
        best_d2 = d2;
        best = id;
      }
    }
    return;
  }
  // Left holds coordinates <= split, right holds coordinates >= split.
  const double diff = coord(q, n.axis) - n.split;
  const std::size_t near = diff < 0.0 ? n.left : n.right;
  const std::size_t far = diff < 0.0 ? n.right : n.left;
  search(near, q, best, best_d2);
  if (diff * diff <= best_d2) search(far, q, best, best_d2);
}

std::pair<std::size_t, double> KdTree::nearest(const Point3& q) const {
  if (points_.empty()) throw MetricDomainError("nearest neighbour query on an empty set");
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  search(0, q, best, best_d2);
  return {best, best_d2};
}

namespace {

void require_nonempty(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw MetricDomainError("metric needs two non-empty clouds");
}

}  // namespace

double mean_nearest_distance(const PointCloud& a, const PointCloud& b) {
  require_nonempty(a, b);
  const KdTree tree(b.points);
  double acc = 0.0;
  for (const Point3& p : a.points) acc += std::sqrt(tree.nearest(p).second);
  return acc / static_cast<double>(a.size());
}

double mean_squared_nearest_distance(const PointCloud& a, const PointCloud& b) {
  require_nonempty(a, b);
  const KdTree tree(b.points);
  double acc = 0.0;
  for (const Point3& p : a.points) acc += tree.nearest(p).second;
  return acc / static_cast<double>(a.size());
}

double chamfer(const PointCloud& p, const PointCloud& q) {
  require_nonempty(p, q);
  return 0.5 * (mean_nearest_distance(p, q) + mean_nearest_distance(q, p));
}

double psnr(const PointCloud& p, const PointCloud& q, double max_range) {
  if (!(max_range > 0.0)) throw MetricDomainError("psnr needs a positive maximum range");
  const double mse = mean_squared_nearest_distance(p, q);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_range * max_range / mse);
}

double sampling_error(const PointCloud& p, const PointCloud& q) {
  if (p.empty()) throw MetricDomainError("sampling error needs a non-empty reference cloud");
  const double a = static_cast<double>(p.size());
  const double b = static_cast<double>(q.size());
  return std::abs(a - b) / a;
}

MetricReport compare_clouds(const PointCloud& p, const PointCloud& q, double max_range) {
  MetricReport r;
  r.se = sampling_error(p, q);
  if (q.empty()) {
    r.cd = std::numeric_limits<double>::quiet_NaN();
    r.psnr = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.cd = chamfer(p, q);
  r.psnr = psnr(p, q, max_range);
  return r;
}

}  // namespace alri
