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

#include <array>
#include <string>
#include <string_view>

namespace alri {

/// Switches for the optional parts of the estimation loop.
struct FeatureToggles {
  bool hough_continuity = true;
  bool conflict_resolution = true;
  bool vertical_heuristics = true;
  bool horizontal_heuristics = true;

  friend bool operator==(const FeatureToggles&, const FeatureToggles&) = default;

  static FeatureToggles all_on() { return {}; }
  static FeatureToggles all_off() { return {false, false, false, false}; }

  /// Ablation presets "e0" .. "e7" (case-insensitive). Throws ConfigError.
  static FeatureToggles preset(std::string_view name);

  /// Short human-readable form, e.g. "continuity=on conflicts=off ...".
  std::string describe() const;
};

}  // namespace alri
