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

#include "alri/toggles.hpp"

#include <cctype>

#include "alri/errors.hpp"

namespace alri {

FeatureToggles FeatureToggles::preset(std::string_view name) {
  std::string key;
  for (char c : name) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  // continuity, conflicts, vertical heuristics, horizontal heuristics
  static constexpr std::array<std::array<bool, 4>, 8> kTable = {{
      {true, true, true, true},
      {false, true, true, true},
      {true, false, true, true},
      {true, true, false, true},
      {true, true, true, false},
      {true, true, false, false},
      {false, false, true, true},
      {false, false, false, false},
  }};
  if (key.size() == 2 && key[0] == 'e' && key[1] >= '0' && key[1] <= '7') {
    const auto& row = kTable[static_cast<std::size_t>(key[1] - '0')];
    return {row[0], row[1], row[2], row[3]};
  }
  throw ConfigError("unknown toggle preset '" + std::string(name) + "' (expected e0..e7)");
}

std::string FeatureToggles::describe() const {
  auto f = [](bool b) { return b ? "on" : "off"; };
  return std::string("continuity=") + f(hough_continuity) + " conflicts=" + f(conflict_resolution) +
         " vertical_heuristics=" + f(vertical_heuristics) + " horizontal_heuristics=" + f(horizontal_heuristics);
}

}  // namespace alri
