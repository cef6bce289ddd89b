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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alri/geometry.hpp"
#include "alri/hough.hpp"
#include "alri/toggles.hpp"

namespace alri {

/// One point as seen by the elevation fit: phi_i = phi + asin(oy * q_i).
struct VerticalObservation {
  std::size_t index = 0;
  double r = 0.0;
  double q = 0.0;  // 1 / r
  double phi = 0.0;
  double delta_phi = 0.0;
  double weight = 0.0;  // 1 / delta_phi^2
};

/// Builds the observation of a point. Throws GeometryError when the point is
/// too close to the vertical axis for the error bound.
VerticalObservation make_vertical_observation(std::size_t index, const Point3& p, double epsilon);

struct WlsFit {
  double slope = 0.0;      // oy (m)
  double intercept = 0.0;  // phi (rad)
  double slope_var = 0.0;
  double intercept_var = 0.0;
  double slope_ci_halfwidth = 0.0;
  double intercept_ci_halfwidth = 0.0;
  double sigma2 = 0.0;
  double log_likelihood = 0.0;
  std::size_t n = 0;
};

/// Closed-form weighted line fit of phi on q with 95% Student t intervals.
/// Throws FitError when n < 3 or the design is degenerate.
WlsFit wls_fit(std::span<const VerticalObservation> obs);

/// Same estimator refined by Gauss-Newton steps on the exact arcsine model.
/// Residuals, sigma^2 and the log-likelihood use the exact model.
WlsFit exact_fit(std::span<const VerticalObservation> obs);

/// Gaussian surrogate log-likelihood with delta_phi^2 as variances and
/// residuals against phi + asin(oy / r).
double scanline_log_likelihood(std::span<const VerticalObservation> obs, double phi, double oy);

/// True when |phi_i - phi - asin(oy / r_i)| <= delta_phi_i + widen_phi + widen_oy * q_i.
inline bool is_member(const VerticalObservation& o, double phi, double oy, double widen_phi = 0.0, double widen_oy = 0.0) {
  if (!(std::abs(oy) < o.r)) return false;
  return std::abs(o.phi - phi - std::asin(oy / o.r)) <= o.delta_phi + widen_phi + widen_oy * o.q;
}

/// Positions (into `obs`) of every observation consistent with the curve,
/// in ascending order. Linear scan.
std::vector<std::size_t> select_members(std::span<const VerticalObservation> obs, double phi, double oy);

/// Range-bucketed, elevation-sorted index answering select_members queries
/// without scanning every observation. Results are identical to the linear
/// scan.
class MembershipIndex {
 public:
  explicit MembershipIndex(std::vector<VerticalObservation> obs);

  const std::vector<VerticalObservation>& observations() const { return obs_; }
  std::size_t size() const { return obs_.size(); }

  std::vector<std::size_t> select(double phi, double oy, double widen_phi = 0.0, double widen_oy = 0.0) const;

 private:
  struct Entry {
    double phi;
    std::size_t pos;
  };
  struct Bucket {
    double q_lo = 0.0;
    double q_hi = 0.0;
    double max_delta = 0.0;
    std::vector<Entry> entries;  // ascending phi
  };

  std::vector<VerticalObservation> obs_;
  std::vector<Bucket> buckets_;
};

enum class VerticalOrigin { wls, heuristic };

const char* to_string(VerticalOrigin o);

struct ScanlineFit {
  double phi = 0.0;
  double oy = 0.0;
  double phi_ci = 0.0;
  double oy_ci = 0.0;
  double uncertainty = 0.0;  // -log likelihood
  VerticalOrigin origin = VerticalOrigin::wls;
  int iterations = 0;
  /// Point indices (VerticalObservation::index), ascending.
  std::vector<std::size_t> members;
};

struct FitOptions {
  int max_iterations = 10;
  /// Extra tolerance used only for the first selection around a seed, to
  /// cover the accumulator discretization.
  double seed_phi_tolerance = 0.0;
  double seed_oy_tolerance = 0.0;
};

struct IterativeFitResult {
  std::optional<ScanlineFit> fit;
  /// Last member set (positions into the index), available on failure.
  std::vector<std::size_t> last_members;
  std::string failure;
};

/// Alternates selection and fitting until the member set repeats.
IterativeFitResult iterative_fit(const MembershipIndex& index, double seed_phi, double seed_oy, const FitOptions& options = {});

/// Convenience overload over a plain observation list.
IterativeFitResult iterative_fit(std::span<const VerticalObservation> obs, double seed_phi, double seed_oy, const FitOptions& options = {});

/// Fallback fit: oy is the mean of the neighbours, phi the mean of
/// phi_i - oy * q_i. Throws FitError on an empty member list.
ScanlineFit heuristic_vertical(const ScanlineFit& below, const ScanlineFit& above, std::span<const VerticalObservation> members);

/// True when the 95% bands of the two curves overlap anywhere in [r_min, r_max].
bool bands_intersect(const ScanlineFit& a, const ScanlineFit& b, double r_min, double r_max);

/// Accepted scanline bookkeeping used by resolve_conflicts.
struct ScanlineRecord {
  ScanlineFit fit;
  bool valid = true;
};

struct RejectedCandidate {
  ScanlineFit fit;
  std::vector<std::size_t> blockers;  // ids into the record list
};

struct ConflictDecision {
  bool accept = false;
  std::vector<std::size_t> invalidated;      // record ids
  std::vector<std::size_t> recovered;        // positions in the rejected pool, ascending
  std::vector<std::size_t> conflicts;        // record ids
};

/// Conflict test of a candidate against the valid records. `owner` maps a
/// point index to a record id, or -1. Does not mutate anything.
ConflictDecision resolve_conflicts(const ScanlineFit& candidate, const std::vector<ScanlineRecord>& records,
                                   const std::vector<RejectedCandidate>& rejected_pool, std::span<const std::int64_t> owner,
                                   double r_min, double r_max);

/// One loop iteration of detect_scanlines, for tracing.
struct VerticalTrace {
  std::size_t iteration = 0;
  HoughPeak peak;
  bool fitted = false;
  VerticalOrigin origin = VerticalOrigin::wls;
  double phi = 0.0;
  double oy = 0.0;
  double uncertainty = 0.0;
  std::size_t members = 0;
  std::string decision;  // accepted | rejected | failed
  std::string reason;
  std::vector<std::size_t> invalidated;
  std::size_t recovered = 0;
};

struct VerticalOptions {
  FitOptions fit;
  std::uint32_t min_peak_votes = 2;
  std::function<void(const VerticalTrace&)> trace;
  /// Optional path: the accumulator is written as PGM right after voting.
  std::string hough_pgm_path;
};

struct VerticalStats {
  std::size_t iterations = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t invalidated = 0;
  std::size_t recovered = 0;
  std::size_t heuristic_fits = 0;
  std::size_t excluded_near_axis = 0;
};

struct VerticalResult {
  /// Ascending phi.
  std::vector<ScanlineFit> scanlines;
  /// Per cloud point: ordinal into `scanlines`, or -1.
  std::vector<std::int64_t> assignment;
  std::vector<std::size_t> unassigned;
  double epsilon = kMinEpsilon;
  VerticalStats stats;
};

/// Full vertical loop over a cloud. `epsilon` is the coordinate error
/// half-bound. Throws EstimationError when no scanline is found.
VerticalResult detect_scanlines(const PointCloud& cloud, double epsilon, const FeatureToggles& toggles = {},
                                const VerticalOptions& options = {});

}  // namespace alri
