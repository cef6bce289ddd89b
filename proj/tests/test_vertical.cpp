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


#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "alri/errors.hpp"
#include "alri/geometry.hpp"
#include "alri/simulator.hpp"
#include "alri/vertical.hpp"
#include "test_support.hpp"

namespace alri {
namespace {

struct NormalSolution {
  long double intercept;
  long double slope;
  long double intercept_var;
  long double slope_var;
};

// Weighted normal equations in extended precision.
NormalSolution normal_equations(const std::vector<VerticalObservation>& obs) {
  long double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& o : obs) {
    const long double w = o.weight;
    s += w;
    sx += w * o.q;
    sy += w * o.phi;
    sxx += w * o.q * o.q;
    sxy += w * o.q * o.phi;
  }
  const long double det = s * sxx - sx * sx;
  NormalSolution n{};
  n.intercept = (sxx * sy - sx * sxy) / det;
  n.slope = (s * sxy - sx * sy) / det;
  long double wrss = 0;
  for (const auto& o : obs) {
    const long double e = o.phi - n.intercept - n.slope * o.q;
    wrss += o.weight * e * e;
  }
  const long double sigma2 = wrss / static_cast<long double>(obs.size() - 2);
  n.intercept_var = sigma2 * sxx / det;
  n.slope_var = sigma2 * s / det;
  return n;
}

std::vector<VerticalObservation> heteroscedastic(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> r(3.0, 80.0);
  std::uniform_real_distribution<double> d(1e-6, 1e-3);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double phi = std::uniform_real_distribution<double>(-0.4, 0.4)(rng);
  const double oy = std::uniform_real_distribution<double>(0.0, 0.2)(rng);
  std::vector<VerticalObservation> obs;
  for (std::size_t i = 0; i < n; ++i) {
    VerticalObservation o;
    o.index = i;
    o.r = r(rng);
    o.q = 1.0 / o.r;
    o.delta_phi = d(rng);
    o.weight = 1.0 / (o.delta_phi * o.delta_phi);
    o.phi = phi + oy * o.q + o.delta_phi * noise(rng);
    obs.push_back(o);
  }
  return obs;
}

TEST(Vertical, WlsMatchesNormalEquations) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto obs = heteroscedastic(rng, 3 + static_cast<std::size_t>(trial % 200));
    const WlsFit f = wls_fit(obs);
    const NormalSolution n = normal_equations(obs);
    ASSERT_NEAR(f.slope, static_cast<double>(n.slope), 1e-10 * std::abs(static_cast<double>(n.slope)) + 1e-15);
    ASSERT_NEAR(f.intercept, static_cast<double>(n.intercept), 1e-10 * std::abs(static_cast<double>(n.intercept)) + 1e-15);
    const double t = boost::math::quantile(boost::math::students_t(static_cast<double>(obs.size() - 2)), 0.975);
    const double slope_hw = t * std::sqrt(static_cast<double>(n.slope_var));
    const double intercept_hw = t * std::sqrt(static_cast<double>(n.intercept_var));
    ASSERT_NEAR(f.slope_ci_halfwidth, slope_hw, 1e-6 * slope_hw);
    ASSERT_NEAR(f.intercept_ci_halfwidth, intercept_hw, 1e-6 * intercept_hw);
    ASSERT_EQ(f.n, obs.size());
  }
}

TEST(Vertical, WlsRejectsDegenerateInput) {
  std::mt19937_64 rng(22);
  auto obs = heteroscedastic(rng, 2);
  EXPECT_THROW(wls_fit(obs), FitError);
  obs = heteroscedastic(rng, 5);
  for (auto& o : obs) {
    o.r = 10.0;
    o.q = 0.1;
  }
  EXPECT_THROW(wls_fit(obs), FitError);
}

TEST(Vertical, ExactFitRecoversNoiseFreeOffsets) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> r(3.0, 80.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double phi = -0.3 + 0.01 * trial;
    const double oy = 0.4 * (trial % 7) / 7.0;
    std::vector<VerticalObservation> obs;
    for (std::size_t i = 0; i < 40; ++i) {
      VerticalObservation o;
      o.index = i;
      o.r = r(rng);
      o.q = 1.0 / o.r;
      o.delta_phi = 1e-4;
      o.weight = 1e8;
      o.phi = phi + std::asin(oy / o.r);
      obs.push_back(o);
    }
    const WlsFit f = exact_fit(obs);
    EXPECT_NEAR(f.intercept, phi, 1e-13);
    EXPECT_NEAR(f.slope, oy, 1e-11);
  }
}

TEST(Vertical, LogLikelihoodFormula) {
  std::mt19937_64 rng(24);
  const auto obs = heteroscedastic(rng, 30);
  double expected = 0.0;
  for (const auto& o : obs) {
    const double e = o.phi - 0.1 - std::asin(0.05 / o.r);
    expected += std::log(2.0 * kPi * o.delta_phi * o.delta_phi) + e * e / (o.delta_phi * o.delta_phi);
  }
  EXPECT_NEAR(scanline_log_likelihood(obs, 0.1, 0.05), -0.5 * expected, 1e-9 * std::abs(expected));
}

TEST(Vertical, ObservationUsesBound) {
  const Point3 p{10.0, 5.0, -2.0};
  const auto o = make_vertical_observation(7, p, 5e-4);
  const SphericalPoint s = to_spherical(p);
  EXPECT_EQ(o.index, 7u);
  EXPECT_DOUBLE_EQ(o.r, s.r);
  EXPECT_DOUBLE_EQ(o.q, 1.0 / s.r);
  EXPECT_DOUBLE_EQ(o.delta_phi, vertical_angle_bound(s.rho, p.z, 5e-4));
  EXPECT_DOUBLE_EQ(o.weight, 1.0 / (o.delta_phi * o.delta_phi));
}

TEST(Vertical, MembershipIndexMatchesLinearScan) {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> phi(-0.4, 0.4);
  std::uniform_real_distribution<double> oy(-0.2, 0.3);
  std::vector<VerticalObservation> obs;
  for (const Point3& p : testing::random_points(5000, 1.0, 90.0, 26)) {
    if (std::hypot(p.x, p.y) < 0.5) continue;
    obs.push_back(make_vertical_observation(obs.size(), p, 5e-3));
  }
  const MembershipIndex index(obs);
  for (int q = 0; q < 300; ++q) {
    const double a = phi(rng);
    const double b = oy(rng);
    const double wp = q % 2 ? 1e-3 : 0.0;
    const double wo = q % 3 ? 0.02 : 0.0;
    std::vector<std::size_t> expected;
    for (std::size_t i = 0; i < obs.size(); ++i)
      if (is_member(obs[i], a, b, wp, wo)) expected.push_back(i);
    auto got = index.select(a, b, wp, wo);
    std::sort(got.begin(), got.end());
    ASSERT_EQ(got, expected);
    if (wp == 0.0 && wo == 0.0) {
      auto plain = select_members(obs, a, b);
      std::sort(plain.begin(), plain.end());
      ASSERT_EQ(plain, expected);
    }
  }
}

TEST(Vertical, IterativeFitConvergesFromNearbySeed) {
  SensorSpec spec = testing::small_sensor(31);
  spec.quantization_step = 0.001;
  const LabeledCloud lc = synthesize(spec);
  const double eps = infer_quantization(lc.cloud).epsilon;
  std::vector<VerticalObservation> obs;
  for (std::size_t i = 0; i < lc.cloud.size(); ++i) obs.push_back(make_vertical_observation(i, lc.cloud.points[i], eps));
  const BeamIntrinsics& b = spec.beams[3];
  FitOptions fo;
  fo.seed_phi_tolerance = 1e-4;
  fo.seed_oy_tolerance = 1e-3;
  const auto res = iterative_fit(obs, b.phi + 5e-5, b.oy + 5e-4, fo);
  ASSERT_TRUE(res.fit.has_value()) << res.failure;
  EXPECT_NEAR(res.fit->phi, b.phi, 2e-5);
  EXPECT_NEAR(res.fit->oy, b.oy, 2e-4);
  for (std::size_t m : res.fit->members) EXPECT_EQ(lc.labels[m].beam, 3u);
}

class DetectScanlines : public ::testing::Test {
 protected:
  void SetUp() override {
    spec_ = testing::small_sensor(41);
    spec_.quantization_step = 0.001;
    spec_.dropout = 0.5;
    labeled_ = synthesize(spec_);
    eps_ = infer_quantization(labeled_.cloud).epsilon;
  }
  SensorSpec spec_;
  LabeledCloud labeled_;
  double eps_ = 0.0;
};

TEST_F(DetectScanlines, AssignmentIsAPartialFunction) {
  const VerticalResult v = detect_scanlines(labeled_.cloud, eps_);
  std::set<std::size_t> seen;
  std::size_t total = 0;
  for (std::size_t l = 0; l < v.scanlines.size(); ++l) {
    for (std::size_t m : v.scanlines[l].members) {
      ASSERT_TRUE(seen.insert(m).second) << "point in two scanlines";
      ASSERT_EQ(v.assignment[m], static_cast<std::int64_t>(l));
      ++total;
    }
  }
  for (std::size_t u : v.unassigned) {
    ASSERT_TRUE(seen.insert(u).second);
    ASSERT_EQ(v.assignment[u], -1);
  }
  EXPECT_EQ(total + v.unassigned.size(), labeled_.cloud.size());
}

TEST_F(DetectScanlines, RecoversBeamsWithValidMembers) {
  const VerticalResult v = detect_scanlines(labeled_.cloud, eps_);
  ASSERT_EQ(v.scanlines.size(), spec_.beams.size());
  for (std::size_t l = 0; l < v.scanlines.size(); ++l) {
    const ScanlineFit& f = v.scanlines[l];
    EXPECT_NEAR(f.phi, spec_.beams[l].phi, 1e-4);
    if (l > 0) {
      EXPECT_LT(v.scanlines[l - 1].phi, f.phi);
    }
    for (std::size_t m : f.members) {
      const auto o = make_vertical_observation(m, labeled_.cloud.points[m], eps_);
      if (f.origin == VerticalOrigin::wls) {
        ASSERT_TRUE(is_member(o, f.phi, f.oy));
      }
      ASSERT_EQ(labeled_.labels[m].beam, l);
    }
  }
  double r_min = 1e300;
  double r_max = 0.0;
  for (const auto& lab : labeled_.labels) {
    r_min = std::min(r_min, lab.range);
    r_max = std::max(r_max, lab.range);
  }
  for (std::size_t l = 1; l < v.scanlines.size(); ++l)
    EXPECT_FALSE(bands_intersect(v.scanlines[l - 1], v.scanlines[l], r_min, r_max));
}

TEST_F(DetectScanlines, IsDeterministic) {
  const VerticalResult a = detect_scanlines(labeled_.cloud, eps_);
  const VerticalResult b = detect_scanlines(labeled_.cloud, eps_);
  ASSERT_EQ(a.scanlines.size(), b.scanlines.size());
  for (std::size_t l = 0; l < a.scanlines.size(); ++l) {
    EXPECT_EQ(a.scanlines[l].phi, b.scanlines[l].phi);
    EXPECT_EQ(a.scanlines[l].oy, b.scanlines[l].oy);
    EXPECT_EQ(a.scanlines[l].members, b.scanlines[l].members);
  }
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.stats.iterations, b.stats.iterations);
}

TEST_F(DetectScanlines, TogglesChangeTheLoop) {
  FeatureToggles greedy;
  greedy.conflict_resolution = false;
  const VerticalResult g = detect_scanlines(labeled_.cloud, eps_, greedy);
  EXPECT_EQ(g.stats.invalidated, 0u);
  EXPECT_EQ(g.stats.recovered, 0u);
  FeatureToggles no_heuristics;
  no_heuristics.vertical_heuristics = false;
  const VerticalResult h = detect_scanlines(labeled_.cloud, eps_, no_heuristics);
  EXPECT_EQ(h.stats.heuristic_fits, 0u);
  for (const auto& s : h.scanlines) EXPECT_EQ(s.origin, VerticalOrigin::wls);
}

TEST_F(DetectScanlines, TraceReportsEveryIteration) {
  VerticalOptions opts;
  std::size_t calls = 0;
  opts.trace = [&](const VerticalTrace& t) {
    ++calls;
    EXPECT_TRUE(t.decision == "accepted" || t.decision == "rejected" || t.decision == "failed") << t.decision;
  };
  const VerticalResult v = detect_scanlines(labeled_.cloud, eps_, {}, opts);
  EXPECT_EQ(calls, v.stats.iterations);
}

TEST(Vertical, BandsIntersect) {
  ScanlineFit a;
  a.phi = 0.0;
  a.oy = 0.1;
  a.phi_ci = 1e-4;
  a.oy_ci = 1e-3;
  ScanlineFit b = a;
  b.phi = 0.05;
  EXPECT_FALSE(bands_intersect(a, b, 3.0, 80.0));
  b.phi = 1e-4;
  EXPECT_TRUE(bands_intersect(a, b, 3.0, 80.0));
  // Curves that cross inside the observed range.
  b.phi = -0.01;
  b.oy = 0.1 + 0.01 * 10.0;
  EXPECT_TRUE(bands_intersect(a, b, 3.0, 80.0));
}

}  // namespace
}  // namespace alri
