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
#include <span>
#include <utility>
#include <vector>

#include "alri/geometry.hpp"

namespace alri {

inline constexpr double kKittiMaxRange = 120.0;
inline constexpr double kDurlarMaxRange = 170.0;

/// Exact nearest-neighbour index over a fixed point set.
class KdTree {
 public:
  explicit KdTree(std::span<const Point3> points);

  /// (index, squared distance) of the closest point. Throws
  /// MetricDomainError on an empty tree.
  /// Index of the nearest point and its squared distance.
  std::pair<std::size_t, double> nearest(const Point3& q) const;

  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
  };

  std::size_t build(std::size_t begin, std::size_t end);
  void search(std::size_t node, const Point3& q, std::size_t& best, double& best_d2) const;

  std::vector<Point3> points_;
  std::vector<std::size_t> ids_;
  std::vector<Node> nodes_;
};

/// Mean Euclidean distance from each point of `a` to its nearest point in `b`.
double mean_nearest_distance(const PointCloud& a, const PointCloud& b);

/// Mean squared nearest-neighbour distance from `a` to `b`.
double mean_squared_nearest_distance(const PointCloud& a, const PointCloud& b);

/// (MAE(P, Q) + MAE(Q, P)) / 2. Throws MetricDomainError on empty input.
double chamfer(const PointCloud& p, const PointCloud& q);

/// 10 log10(max_range^2 / MSE(P -> Q)); +infinity when MSE is zero.
double psnr(const PointCloud& p, const PointCloud& q, double max_range);

/// ||P| - |Q|| / |P|. Throws MetricDomainError when P is empty.
double sampling_error(const PointCloud& p, const PointCloud& q);

struct MetricReport {
  double cd = 0.0;
  double psnr = 0.0;  // may be +infinity
  double se = 0.0;
};

/// All three metrics. Clouds that are both empty or where one side is empty
/// only get SE (cd and psnr are NaN) unless P itself is empty, which throws.
MetricReport compare_clouds(const PointCloud& p, const PointCloud& q, double max_range);

}  // namespace alri
