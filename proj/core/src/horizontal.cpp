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

#include "alri/horizontal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "alri/errors.hpp"
#include "alri/stats.hpp"

namespace alri {

AzimuthObservation make_azimuth_observation(std::size_t index, const Point3& p) {
  const SphericalPoint s = to_spherical(p);
  if (!(s.rho > 0.0)) throw DegeneratePointError("point on the vertical axis has no azimuth");
  return {index, s.theta, 1.0 / s.rho};
}

DeltaTheta delta_theta(double theta, long H) {
  const double period = kTwoPi / static_cast<double>(H);
  const long k = static_cast<long>(std::floor(theta / kTwoPi * static_cast<double>(H) + 0.5));
  DeltaTheta d;
  d.dtheta = theta - static_cast<double>(k) * period;
  d.k = ((k % H) + H) % H;
  return d;
}

std::vector<Segment> segment(std::span<const double> omega, std::span<const double> dtheta, double tau_omega, double tau_dtheta) {
  std::vector<Segment> out;
  const std::size_t n = omega.size();
  if (n == 0) return out;
  std::size_t begin = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (omega[i] - omega[i - 1] < tau_omega && std::abs(dtheta[i] - dtheta[i - 1]) < tau_dtheta) continue;
    out.push_back({begin, i});
    begin = i;
  }
  out.push_back({begin, n});
  return out;
}

double slope_prior(std::span<const double> slopes, std::span<const std::size_t> sizes) {
  if (slopes.empty()) throw FitError("slope prior: no segment slopes");
  std::vector<double> w(sizes.begin(), sizes.end());
  return weighted_median(slopes, w);
}

const char* to_string(HorizontalOrigin o) {
  switch (o) {
    case HorizontalOrigin::search:
      return "search";
    case HorizontalOrigin::heuristic:
      return "heuristic";
    case HorizontalOrigin::invalid:
      break;
  }
  return "invalid";
}

namespace {

inline long floor_to_long(double x) {
  long k = static_cast<long>(x);
  if (static_cast<double>(k) > x) --k;
  return k;
}

// sin and cos for moderate arguments, accurate to ~1e-12 absolute.
inline void fast_sincos(double x, double& s, double& c) {
  constexpr double kTwoOverPi = 0.63661977236758134308;
  constexpr double kPio2Hi = 1.57079632673412561417;
  constexpr double kPio2Lo = 6.07710050650619224932e-11;
  const double t = x * kTwoOverPi;
  const double kf = std::floor(t + 0.5);
  const double qm = kf - 4.0 * std::floor(kf * 0.25);  // quadrant 0..3
  const double r = (x - kf * kPio2Hi) - kf * kPio2Lo;
  const double r2 = r * r;
  const double sr = r * (1.0 + r2 * (-1.0 / 6 + r2 * (1.0 / 120 + r2 * (-1.0 / 5040 + r2 * (1.0 / 362880 + r2 * (-1.0 / 39916800 + r2 * (1.0 / 6227020800.0)))))));
  const double cr = 1.0 + r2 * (-0.5 + r2 * (1.0 / 24 + r2 * (-1.0 / 720 + r2 * (1.0 / 40320 + r2 * (-1.0 / 3628800 + r2 * (1.0 / 479001600.0))))));
  const bool odd = qm == 1.0 || qm == 3.0;
  const double sign = qm >= 2.0 ? -1.0 : 1.0;
  s = sign * (odd ? cr : sr);
  c = sign * (odd ? -sr : cr);
}

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  bool ok = false;
};

template <class X, class Y>
Line ols(std::size_t n, X&& x, Y&& y) {
  Line l;
  if (n < 2) return l;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x(i);
    my += y(i);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double raw = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x(i) - mx;
    sxx += dx * dx;
    sxy += dx * (y(i) - my);
    raw += x(i) * x(i);
  }
  if (!(sxx > 1e-13 * raw)) return l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  l.ok = true;
  return l;
}

}  // namespace

HorizontalProblem::HorizontalProblem(std::span<const AzimuthObservation> obs) {
  std::vector<std::size_t> order(obs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (obs[a].omega != obs[b].omega) return obs[a].omega < obs[b].omega;
    return obs[a].theta < obs[b].theta;
  });
  omega_.reserve(obs.size());
  theta_.reserve(obs.size());
  for (std::size_t i : order) {
    omega_.push_back(obs[i].omega);
    theta_.push_back(obs[i].theta);
  }
  dtheta_.resize(obs.size());
  unwrapped_.resize(obs.size());
  residual_.resize(obs.size());
  segments_.resize(obs.size() + 1);
  if (!omega_.empty()) {
    double sum = 0.0;
    double raw = 0.0;
    for (double w : omega_) {
      sum += w;
      raw += w * w;
    }
    omega_mean_ = sum / static_cast<double>(omega_.size());
    for (double w : omega_) omega_sxx_ += (w - omega_mean_) * (w - omega_mean_);
    omega_ok_ = omega_sxx_ > 1e-13 * raw;
  }
}

#if defined(__x86_64__) && defined(__GNUC__) && !defined(__clang__)
__attribute__((target_clones("avx2", "default")))
#endif
CandidateEvaluation HorizontalProblem::evaluate(long H) const {
  CandidateEvaluation out;
  out.H = H;
  const std::size_t n = omega_.size();
  if (n < 2 || H < 1 || !omega_ok_) return out;
  const double hd = static_cast<double>(H);
  const double period = kTwoPi / hd;
  const double inv_period = hd / kTwoPi;
  const double tau_dtheta = period / 4.0;
  const double* w = omega_.data();
  const double* th = theta_.data();
  double* dt = dtheta_.data();

  // Residuals to the nearest grid line.
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) {
    const double t = th[i];
    dt[i] = t - std::floor(t * inv_period + 0.5) * period;
  }

  // Local slopes of the piecewise-linear pieces, branch-free since the
  // boundaries are close to random for wrong candidates.
  std::pair<double, double>* segs = segments_.data();
  std::size_t count = 0;
  double w0 = w[0];
  double t0 = dt[0];
  double m = 1.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  auto emit = [&](bool boundary) {
    const double den = m * sxx - sx * sx;
    const bool valid = boundary && m >= 2.0 && den > 1e-12 * m * sxx && den > 0.0;
    segs[count] = {(m * sxy - sx * sy) / (valid ? den : 1.0), m};
    count += valid ? 1 : 0;
  };
  for (std::size_t i = 1; i < n; ++i) {
    const bool boundary = !(w[i] - w[i - 1] < kSegmentOmegaGap && std::abs(dt[i] - dt[i - 1]) < tau_dtheta);
    emit(boundary);
    w0 = boundary ? w[i] : w0;
    t0 = boundary ? dt[i] : t0;
    const double x = w[i] - w0;
    const double y = dt[i] - t0;
    const double keep = boundary ? 0.0 : 1.0;
    m = m * keep + 1.0;
    sx = sx * keep + x;
    sy = sy * keep + y;
    sxx = sxx * keep + x * x;
    sxy = sxy * keep + x * y;
  }
  emit(true);
  const double prior = count == 0 ? 0.0 : weighted_median_select(std::span(segs, count));

  // Offset modulo the period from the circular mean of the residuals.
  double s = 0.0;
  double c = 0.0;
  double* res = residual_.data();
#pragma omp simd reduction(+ : s, c)
  for (std::size_t i = 0; i < n; ++i) {
    res[i] = dt[i] - prior * w[i];
    double si, ci;
    fast_sincos(res[i] * hd, si, ci);
    s += si;
    c += ci;
  }
  if (!(std::hypot(s, c) > 1e-12 * static_cast<double>(n))) return out;
  double off = std::atan2(s, c) / hd;
  if (off < 0.0) off += period;

  // Unwrap the periodic jumps and fit one line against the fixed omega.
  double* un = unwrapped_.data();
  double sum_y = 0.0;
  double sum_xy = 0.0;
  const double wm = omega_mean_;
#pragma omp simd reduction(+ : sum_y, sum_xy)
  for (std::size_t i = 0; i < n; ++i) {
    un[i] = dt[i] - std::floor((res[i] - off) * inv_period + 0.5) * period;
    sum_y += un[i];
    sum_xy += (w[i] - wm) * un[i];
  }
  const double slope = sum_xy / omega_sxx_;
  const double intercept = sum_y / static_cast<double>(n) - slope * wm;
  double loss = 0.0;
#pragma omp simd reduction(+ : loss)
  for (std::size_t i = 0; i < n; ++i) {
    const double r = un[i] - intercept - slope * w[i];
    loss += r * r;
  }
  out.ox = slope;
  out.theta_off = intercept;
  out.loss = loss * hd * hd;
  out.ok = true;
  return out;
}

CandidateEvaluation HorizontalProblem::refine(const CandidateEvaluation& c) const {
  CandidateEvaluation base = evaluate(c.H);
  if (!base.ok) return c;
  const std::size_t n = omega_.size();
  double ox = base.ox;
  double off = base.theta_off;
  double w_max = 0.0;
  for (double w : omega_) w_max = std::max(w_max, w);
  std::vector<double> g(n);
  std::vector<double> y(n);
  for (int step = 0; step < 8; ++step) {
    if (!(std::abs(ox) * w_max < 1.0)) return base;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = ox * omega_[i];
      g[i] = omega_[i] / std::sqrt(1.0 - a * a);
      y[i] = unwrapped_[i] - std::asin(a) + ox * g[i];
    }
    const Line line = ols(n, [&](std::size_t i) { return g[i]; }, [&](std::size_t i) { return y[i]; });
    if (!line.ok) return base;
    const double change = std::abs(line.slope - ox) + std::abs(line.intercept - off);
    ox = line.slope;
    off = line.intercept;
    if (change <= 1e-16) break;
  }
  const double period = kTwoPi / static_cast<double>(c.H);
  off -= period * std::floor(off / period + 0.5);
  base.ox = ox;
  base.theta_off = off;
  return base;
}

CandidateEvaluation evaluate_candidate(std::span<const AzimuthObservation> obs, long H) {
  if (obs.size() < 2) throw ConfigError("evaluate_candidate needs at least two observations");
  if (H < 1) throw ConfigError("evaluate_candidate: H must be positive");
  return HorizontalProblem(obs).evaluate(H);
}

ScanlineHorizontal estimate_horizontal(std::span<const AzimuthObservation> obs, const HorizontalOptions& options) {
  if (obs.size() < 2) throw EstimationError("horizontal search needs at least two points");
  const HorizontalProblem problem(obs);
  const long first = std::max<long>(1, static_cast<long>(obs.size()));
  CandidateEvaluation best;
  ScanlineHorizontal out;
  for (long H = first; H <= options.h_max; ++H) {
    const CandidateEvaluation c = problem.evaluate(H);
    ++out.candidates_evaluated;
    if (!c.ok) continue;
    if (!best.ok || c.loss < best.loss * (1.0 - 1e-9) - 1e-12) best = c;
  }
  if (!best.ok) throw EstimationError("no horizontal resolution candidate could be evaluated");
  const CandidateEvaluation refined = problem.refine(best);
  out.H = refined.H;
  out.ox = refined.ox;
  out.theta_off = refined.theta_off;
  out.loss = best.loss;
  out.origin = HorizontalOrigin::search;
  return out;
}

ScanlineHorizontal heuristic_horizontal(std::span<const AzimuthObservation> obs, std::span<const ResolutionOffset> pool) {
  if (pool.empty()) throw EstimationError("heuristic horizontal fit needs a non-empty pool");
  if (obs.empty()) throw EstimationError("heuristic horizontal fit needs observations");
  const double n = static_cast<double>(obs.size());
  ScanlineHorizontal best;
  double best_m = std::numeric_limits<double>::infinity();
  std::vector<double> dev(obs.size());
  for (const ResolutionOffset& cand : pool) {
    if (cand.H < 1) continue;
    const double period = kTwoPi / static_cast<double>(cand.H);
    double mean = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double corrected = obs[i].theta - cand.ox * obs[i].omega;
      const double ideal = std::floor(corrected / period + 0.5) * period;
      dev[i] = corrected - ideal;
      mean += dev[i];
    }
    mean /= n;
    double mad = 0.0;
    for (double d : dev) mad += std::abs(d - mean);
    const double m = mad / n * static_cast<double>(cand.H);
    if (m < best_m) {
      best_m = m;
      best.H = cand.H;
      best.ox = cand.ox;
      best.theta_off = mean;
      best.loss = m;
    }
  }
  if (!std::isfinite(best_m)) throw EstimationError("heuristic horizontal fit: no valid pool entry");
  best.origin = HorizontalOrigin::heuristic;
  best.candidates_evaluated = pool.size();
  return best;
}

}  // namespace alri
