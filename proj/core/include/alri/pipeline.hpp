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
#include <functional>

#include "alri/geometry.hpp"
#include "alri/horizontal.hpp"
#include "alri/intrinsics.hpp"
#include "alri/toggles.hpp"
#include "alri/vertical.hpp"

namespace alri {

struct EstimationOptions {
  VerticalOptions vertical;
  HorizontalOptions horizontal;
  /// Beams with fewer points use the pooled fallback when horizontal
  /// heuristics are enabled.
  std::size_t dense_threshold = 64;
};

struct EstimationDetails {
  std::size_t input_points = 0;
  std::size_t dropped_points = 0;
  VerticalResult vertical;
};

/// Copy of the cloud without zero-norm or non-finite points.
PointCloud drop_unusable(const PointCloud& cloud, std::size_t* dropped = nullptr);

/// Quantization inference, scanline detection, then per-beam horizontal
/// estimation (largest beams first, pooled fallback afterwards). Beams whose
/// horizontal estimation fails keep H = 0. Throws EstimationError.
SensorIntrinsics estimate_intrinsics(const PointCloud& cloud, const FeatureToggles& toggles = {},
                                     const EstimationOptions& options = {}, EstimationDetails* details = nullptr);

}  // namespace alri
