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
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "alri/geometry.hpp"

namespace alri {

/// Azimuth of a point together with omega = 1 / rho.
struct AzimuthObservation {
  std::size_t index = 0;
  double theta = 0.0;
  double omega = 0.0;
};

/// Throws DegeneratePointError for points on the vertical axis.
AzimuthObservation make_azimuth_observation(std::size_t index, const Point3& p);

struct DeltaTheta {
  double dtheta = 0.0;
  long k = 0;  // nearest grid index, taken modulo H
};

/// Offset of theta from its nearest grid angle 2 pi k / H.
DeltaTheta delta_theta(double theta, long H);

/// Contiguous index range [begin, end) of a sorted (omega, dtheta) sequence.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// Splits the sequence where the omega gap reaches tau_omega or the dtheta
/// jump reaches tau_dtheta. `omega` must be ascending.
std::vector<Segment> segment(std::span<const double> omega, std::span<const double> dtheta, double tau_omega, double tau_dtheta);

/// Weighted median of per-segment slopes, weight = segment size.
/// Throws FitError when there is no slope.
double slope_prior(std::span<const double> slopes, std::span<const std::size_t> sizes);

struct CandidateEvaluation {
  long H = 0;
  double ox = 0.0;
  double theta_off = 0.0;
  double loss = 0.0;
  bool ok = false;
};

/// Default omega gap that splits segments (1/m).
inline constexpr double kSegmentOmegaGap = 1e-2;

/// Observations sorted by omega with scratch space, reusable across many
/// candidate resolutions.
class HorizontalProblem {
 public:
  explicit HorizontalProblem(std::span<const AzimuthObservation> obs);

  std::size_t size() const { return omega_.size(); }

  /// Loss and offsets for one candidate resolution. `ok` is false when the
  /// final regression is degenerate.
  CandidateEvaluation evaluate(long H) const;

  /// Refines (ox, theta_off) of a candidate with the exact arcsine model,
  /// keeping its unwrapping. theta_off is reduced to [-pi/H, pi/H).
  CandidateEvaluation refine(const CandidateEvaluation& c) const;

  const std::vector<double>& omega() const { return omega_; }
  const std::vector<double>& theta() const { return theta_; }

 private:
  std::vector<double> omega_;
  std::vector<double> theta_;
  double omega_mean_ = 0.0;
  double omega_sxx_ = 0.0;
  bool omega_ok_ = false;
  mutable std::vector<double> dtheta_;
  mutable std::vector<double> unwrapped_;
  mutable std::vector<std::pair<double, double>> segments_;
  mutable std::vector<double> residual_;
};

/// Evaluates one candidate resolution (requires at least two observations).
CandidateEvaluation evaluate_candidate(std::span<const AzimuthObservation> obs, long H);

enum class HorizontalOrigin { search, heuristic, invalid };

const char* to_string(HorizontalOrigin o);

struct ScanlineHorizontal {
  long H = 0;
  double ox = 0.0;
  double theta_off = 0.0;
  double loss = 0.0;
  HorizontalOrigin origin = HorizontalOrigin::search;
  std::size_t candidates_evaluated = 0;
};

struct HorizontalOptions {
  long h_max = 10000;
};

/// Exhaustive search over H in [n, h_max]; ties go to the smallest H.
/// Throws EstimationError when no candidate can be evaluated.
ScanlineHorizontal estimate_horizontal(std::span<const AzimuthObservation> obs, const HorizontalOptions& options = {});

/// Candidate (H, ox) pair for the sparse-beam fallback.
struct ResolutionOffset {
  long H = 0;
  double ox = 0.0;
};

/// Picks the pool entry with the smallest mean absolute grid deviation.
/// Throws EstimationError on an empty pool or no observations.
ScanlineHorizontal heuristic_horizontal(std::span<const AzimuthObservation> obs, std::span<const ResolutionOffset> pool);

}  // namespace alri
