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

#include "alri/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "alri/errors.hpp"
#include "alri/geometry.hpp"

namespace alri {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) throw ConfigError("incomplete_beta: argument out of domain");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw ConfigError("t_cdf: dof must be positive");
  if (std::isnan(t)) return t;
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = dof / (dof + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

namespace {

double t_pdf(double t, double dof) {
  const double log_norm = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) - 0.5 * std::log(dof * kPi);
  return std::exp(log_norm - 0.5 * (dof + 1.0) * std::log1p(t * t / dof));
}

// Upper-tail probability for t >= 0, accurate when it is tiny.
double t_upper(double t, double dof) {
  return 0.5 * incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

}  // namespace

double t_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("t_quantile: p must lie in (0, 1)");
  if (!(dof >= 1.0)) throw ConfigError("t_quantile: dof must be >= 1");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -t_quantile(1.0 - p, dof);
  const double target = 1.0 - p;  // upper tail

  double lo = 0.0;
  double hi = 1.0;
  while (t_upper(hi, dof) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = t_upper(t, dof) - target;  // decreasing in t
    if (f > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    const double step = f / t_pdf(t, dof);
    double next = t + step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t))) return next;
    t = next;
    if (hi - lo <= 4e-16 * hi) break;
  }
  return t;
}

double t_critical_95(long dof) {
  static std::mutex mu;
  static std::unordered_map<long, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(dof);
  if (it != cache.end()) return it->second;
  const double v = t_quantile(0.975, static_cast<double>(dof));
  cache.emplace(dof, v);
  return v;
}

double weighted_median(std::span<const double> values, std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size()) throw ConfigError("weighted_median: bad input");
  std::vector<std::pair<double, double>> vw(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    vw[i] = {values[i], weights[i]};
    total += weights[i];
  }
  if (!(total > 0.0)) throw ConfigError("weighted_median: total weight must be positive");
  return weighted_median_select(vw);
}

double weighted_median_select(std::span<std::pair<double, double>> vw) {
  double total = 0.0;
  for (const auto& p : vw) total += p.second;
  const double target = 0.5 * total;
  auto by_value = [](const auto& a, const auto& b) { return a.first < b.first; };
  // Quickselect on value; acc is the weight sorted strictly before lo.
  std::size_t lo = 0;
  std::size_t hi = vw.size();
  double acc = 0.0;
  while (hi - lo > 16) {
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(vw.begin() + static_cast<std::ptrdiff_t>(lo), vw.begin() + static_cast<std::ptrdiff_t>(mid),
                     vw.begin() + static_cast<std::ptrdiff_t>(hi), by_value);
    double wl = 0.0;
    for (std::size_t i = lo; i < mid; ++i) wl += vw[i].second;
    if (acc + wl >= target) {
      hi = mid;
    } else if (acc + wl + vw[mid].second >= target) {
      return vw[mid].first;
    } else {
      acc += wl + vw[mid].second;
      lo = mid + 1;
    }
  }
  std::sort(vw.begin() + static_cast<std::ptrdiff_t>(lo), vw.begin() + static_cast<std::ptrdiff_t>(hi), by_value);
  for (std::size_t i = lo; i < hi; ++i) {
    acc += vw[i].second;
    if (acc >= target) return vw[i].first;
  }
  return vw[hi - 1].first;
}

double circular_mean(std::span<const double> values, double period) {
  if (values.empty() || !(period > 0.0)) throw ConfigError("circular_mean: bad input");
  double s = 0.0;
  double c = 0.0;
  const double k = kTwoPi / period;
  for (double v : values) {
    const double a = wrap_period(v, period) * k;
    s += std::sin(a);
    c += std::cos(a);
  }
  const double norm = std::hypot(s, c);
  if (!(norm > 1e-12 * static_cast<double>(values.size()))) throw FitError("circular mean: zero resultant");
  return wrap_period(std::atan2(s, c) / k, period);
}

}  // namespace alri
