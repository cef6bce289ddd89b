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

#include "alri/intrinsics.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "alri/errors.hpp"

namespace alri {

std::uint64_t SensorIntrinsics::width(std::uint64_t limit) const {
  std::uint64_t w = 0;
  for (const BeamIntrinsics& b : beams) {
    if (!b.valid()) continue;
    const auto h = static_cast<std::uint64_t>(b.H);
    if (w == 0) {
      w = h;
      continue;
    }
    const std::uint64_t g = std::gcd(w, h);
    const std::uint64_t step = h / g;
    if (w > limit / step) throw ConfigError("range image width exceeds the supported maximum");
    w *= step;
  }
  if (w == 0) throw ConfigError("intrinsics contain no beam with a valid resolution");
  if (w > limit) throw ConfigError("range image width exceeds the supported maximum");
  return w;
}

void SensorIntrinsics::validate() const {
  if (beams.empty()) throw ConfigError("intrinsics have no beams");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("intrinsics: epsilon must be positive");
  for (std::size_t l = 0; l < beams.size(); ++l) {
    const BeamIntrinsics& b = beams[l];
    if (!std::isfinite(b.phi) || !std::isfinite(b.oy) || !std::isfinite(b.ox) || !std::isfinite(b.theta_off))
      throw ConfigError("intrinsics: non-finite beam parameter");
    if (b.H < 0) throw ConfigError("intrinsics: negative resolution");
    if (l > 0 && !(beams[l - 1].phi < b.phi)) throw ConfigError("intrinsics: beams must be strictly ordered by elevation");
  }
}

std::string intrinsics_summary(const SensorIntrinsics& s) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%5s %12s %10s %10s %12s %6s %9s %10s %7s\n", "beam", "phi_deg", "oy_mm", "ox_mm",
                "theta_off_deg", "H", "vertical", "horizontal", "points");
  out += line;
  for (std::size_t l = 0; l < s.beams.size(); ++l) {
    const BeamIntrinsics& b = s.beams[l];
    std::snprintf(line, sizeof line, "%5zu %12.6f %10.4f %10.4f %12.6f %6ld %9s %10s %7zu\n", l, b.phi * 180.0 / kPi,
                  b.oy * 1e3, b.ox * 1e3, b.theta_off * 180.0 / kPi, b.H, to_string(b.vertical_origin),
                  to_string(b.horizontal_origin), b.points);
    out += line;
  }
  std::string width = "n/a";
  try {
    width = std::to_string(s.width());
  } catch (const ConfigError&) {
  }
  std::snprintf(line, sizeof line, "L=%zu width=%s epsilon=%.9g m\n", s.beams.size(), width.c_str(), s.epsilon);
  out += line;
  return out;
}

}  // namespace alri
