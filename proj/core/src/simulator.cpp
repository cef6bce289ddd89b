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

#include "alri/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "alri/errors.hpp"

namespace alri {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double unit_from(std::uint64_t key) {
  return static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
}

namespace {

std::uint64_t key(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ a);
  h = mix64(h ^ (b + 0x632be59bd9b4e019ull));
  return mix64(h ^ (c * 0x85ebca77c2b2ae63ull));
}

}  // namespace

RangeSampler scene_uniform(double min, double max, std::uint64_t seed) {
  if (!(min > 0.0) || !(min <= max)) throw ConfigError("uniform scene needs 0 < min <= max");
  return [=](std::size_t beam, long sample, double, double, int attempt) {
    const double u = unit_from(key(seed, beam, static_cast<std::uint64_t>(sample), static_cast<std::uint64_t>(attempt)));
    return min + (max - min) * u;
  };
}

RangeSampler scene_terrain(const TerrainParams& p, std::uint64_t seed) {
  if (!(p.range_min > 0.0) || !(p.range_min < p.range_max)) throw ConfigError("terrain scene needs 0 < min < max");
  if (p.harmonics < 1) throw ConfigError("terrain scene needs at least one harmonic");
  std::vector<double> coef(static_cast<std::size_t>(p.harmonics));
  std::vector<double> phase(coef.size());
  double norm = 0.0;
  for (std::size_t k = 0; k < coef.size(); ++k) {
    coef[k] = (2.0 * unit_from(key(seed, 0x7e11, k, 1)) - 1.0) / static_cast<double>(k + 1);
    phase[k] = kTwoPi * unit_from(key(seed, 0x7e11, k, 2));
    norm += std::abs(coef[k]);
  }
  for (double& c : coef) c /= norm;

  struct Occluder {
    double theta0, width, distance, top;
  };
  std::vector<Occluder> occ(static_cast<std::size_t>(std::max(0, p.objects)));
  const double far = std::min(p.range_max, 0.6 * p.range_max);
  for (std::size_t i = 0; i < occ.size(); ++i) {
    Occluder& o = occ[i];
    o.theta0 = kTwoPi * unit_from(key(seed, 0x0cc1, i, 0));
    o.width = 0.02 + 0.3 * unit_from(key(seed, 0x0cc1, i, 1));
    o.distance = p.range_min + 1.0 + (far - p.range_min - 1.0) * unit_from(key(seed, 0x0cc1, i, 2));
    o.top = 0.5 + 11.5 * unit_from(key(seed, 0x0cc1, i, 3)) * unit_from(key(seed, 0x0cc1, i, 4));
  }

  return [=](std::size_t beam, long sample, double phi, double theta, int attempt) {
    double f = 0.0;
    for (std::size_t k = 0; k < coef.size(); ++k) f += coef[k] * std::sin(static_cast<double>(k + 1) * theta + phase[k]);
    const double beam_shift = 0.1 * (2.0 * unit_from(key(seed, 0xbea3, beam, 0)) - 1.0);
    double base = 0.45 * p.range_max;
    if (phi < -0.03) base = std::min(base, p.sensor_height / std::sin(-phi));
    double r = base * std::exp(p.amplitude * f + beam_shift);
    const double c = std::cos(phi);
    const double t = std::tan(phi);
    for (const Occluder& o : occ) {
      if (wrap_two_pi(theta - o.theta0) > o.width) continue;
      const double hit = o.distance / c;
      if (hit >= r) continue;
      if (o.distance * t > o.top - p.sensor_height) continue;  // passes over
      r = hit;
    }
    if (p.range_noise > 0.0) {
      const std::uint64_t k = key(seed ^ 0x5e15e, beam, static_cast<std::uint64_t>(sample), static_cast<std::uint64_t>(attempt));
      const double u1 = 1.0 - unit_from(k);
      const double u2 = unit_from(k + 1);
      r += p.range_noise * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }
    return std::clamp(r, p.range_min, p.range_max);
  };
}

const char* to_string(SceneKind k) {
  return k == SceneKind::uniform ? "uniform" : "terrain";
}

void SensorSpec::validate() const {
  if (beams.empty()) throw ConfigError("sensor spec has no beams");
  if (!(quantization_step >= 0.0)) throw ConfigError("quantization step must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (!(range_min > 0.0 && range_min <= range_max)) throw ConfigError("range bounds must satisfy 0 < min <= max");
  for (const BeamIntrinsics& b : beams) {
    if (b.H < 1) throw ConfigError("every simulated beam needs H >= 1");
    if (!(range_min > std::abs(b.oy))) throw ConfigError("range_min must exceed every |oy|");
    if (!(range_min * std::cos(std::abs(b.phi) + 0.5) > std::abs(b.ox))) throw ConfigError("range_min too small for ox");
  }
  for (const SparseBeam& s : sparse_beams) {
    if (s.beam >= beams.size()) throw ConfigError("sparse beam index out of range");
    if (s.points > static_cast<std::size_t>(beams[s.beam].H)) throw ConfigError("sparse beam asks for more points than samples");
  }
}

SensorIntrinsics SensorSpec::intrinsics() const {
  SensorIntrinsics s;
  s.beams = beams;
  s.epsilon = quantization_step > 0.0 ? std::max(quantization_step / 2.0, kMinEpsilon) : kMinEpsilon;
  return s;
}

LabeledCloud synthesize(const SensorSpec& spec) {
  if (spec.scene == SceneKind::uniform) return synthesize(spec, scene_uniform(spec.range_min, spec.range_max, spec.seed));
  TerrainParams tp;
  tp.range_min = spec.range_min;
  tp.range_max = spec.range_max;
  return synthesize(spec, scene_terrain(tp, spec.seed));
}

LabeledCloud synthesize(const SensorSpec& spec, const RangeSampler& scene) {
  spec.validate();
  LabeledCloud out;
  const double q = spec.quantization_step;
  auto quantize = [q](double v) { return q > 0.0 ? std::round(v / q) * q : v; };
  for (std::size_t l = 0; l < spec.beams.size(); ++l) {
    const BeamIntrinsics& b = spec.beams[l];
    std::vector<long> samples;
    const auto sparse = std::find_if(spec.sparse_beams.begin(), spec.sparse_beams.end(), [&](const SparseBeam& s) { return s.beam == l; });
    if (sparse != spec.sparse_beams.end()) {
      // Evenly spread, with a seeded jitter inside each stride.
      const std::size_t k = sparse->points;
      for (std::size_t j = 0; j < k; ++j) {
        const double stride = static_cast<double>(b.H) / static_cast<double>(k);
        const double jitter = unit_from(key(spec.seed, 0x5ba5e, l, j));
        samples.push_back(std::min<long>(b.H - 1, static_cast<long>(stride * (static_cast<double>(j) + jitter))));
      }
    } else {
      for (long h = 0; h < b.H; ++h) {
        if (spec.dropout > 0.0 && unit_from(key(spec.seed, 0xd40f, l, static_cast<std::uint64_t>(h))) < spec.dropout) continue;
        samples.push_back(h);
      }
    }
    for (long h : samples) {
      double r = 0.0;
      bool ok = false;
      for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
        r = scene(l, h, b.phi, kTwoPi * static_cast<double>(h) / static_cast<double>(b.H), attempt);
        ok = std::isfinite(r) && r > std::abs(b.oy);
        if (ok) {
          const double phi_i = b.phi + std::asin(b.oy / r);
          ok = r * std::cos(phi_i) > std::abs(b.ox);
        }
      }
      if (!ok) {
        ++out.dropped_samples;
        continue;
      }
      const double phi_i = b.phi + std::asin(b.oy / r);
      const double rho = r * std::cos(phi_i);
      const double theta_i = kTwoPi * static_cast<double>(h) / static_cast<double>(b.H) + b.theta_off + std::asin(b.ox / rho);
      Point3 p = from_spherical(r, phi_i, theta_i);
      p = {quantize(p.x), quantize(p.y), quantize(p.z)};
      if (!is_usable(p)) {
        ++out.dropped_samples;
        continue;
      }
      out.cloud.points.push_back(p);
      out.labels.push_back({l, h, r});
    }
  }
  if (spec.shuffle) {
    std::vector<std::size_t> order(out.cloud.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(mix64(spec.seed ^ 0x5a17));
    std::shuffle(order.begin(), order.end(), rng);
    LabeledCloud shuffled;
    shuffled.dropped_samples = out.dropped_samples;
    for (std::size_t i : order) {
      shuffled.cloud.points.push_back(out.cloud.points[i]);
      shuffled.labels.push_back(out.labels[i]);
    }
    return shuffled;
  }
  return out;
}

namespace {

SensorSpec make_preset(std::uint64_t seed, double dropout, std::size_t beams, long H, double phi_lo_deg, double phi_hi_deg,
                       double oy_lo, double oy_hi, double ox_abs) {
  SensorSpec s;
  s.seed = seed;
  s.dropout = dropout;
  s.quantization_step = 0.001;
  s.range_min = 3.0;
  s.range_max = 80.0;
  s.scene = SceneKind::terrain;
  std::vector<double> oys(beams);
  for (std::size_t l = 0; l < beams; ++l) oys[l] = oy_lo + (oy_hi - oy_lo) * unit_from(key(seed, 0x0f5e7, l, 0));
  std::sort(oys.begin(), oys.end());
  for (std::size_t l = 0; l < beams; ++l) {
    BeamIntrinsics b;
    const double t = beams > 1 ? static_cast<double>(l) / static_cast<double>(beams - 1) : 0.0;
    b.phi = (phi_lo_deg + (phi_hi_deg - phi_lo_deg) * t) * kPi / 180.0;
    b.oy = oys[l];
    b.ox = ox_abs * (2.0 * unit_from(key(seed, 0x0f5e8, l, 0)) - 1.0);
    b.theta_off = 0.05 * (2.0 * unit_from(key(seed, 0x0f5e9, l, 0)) - 1.0);
    b.H = H;
    s.beams.push_back(b);
  }
  return s;
}

}  // namespace

SensorSpec kitti_like(std::uint64_t seed, double dropout) {
  return make_preset(seed, dropout, 64, 4000, -24.9, 2.0, 0.100, 0.210, 0.026);
}

SensorSpec durlar_like(std::uint64_t seed, double dropout) {
  return make_preset(seed, dropout, 128, 2048, -22.5, 22.5, 0.025, 0.040, 0.001);
}

}  // namespace alri
