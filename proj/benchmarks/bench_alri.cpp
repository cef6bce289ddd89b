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


#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "alri/geometry.hpp"
#include "alri/horizontal.hpp"
#include "alri/hough.hpp"
#include "alri/metrics.hpp"
#include "alri/projection.hpp"
#include "alri/simulator.hpp"
#include "alri/stats.hpp"

namespace {

using namespace alri;

const LabeledCloud& kitti_frame() {
  static const LabeledCloud frame = synthesize(kitti_like(42, 0.53));
  return frame;
}

void BM_Project(benchmark::State& state) {
  const LabeledCloud& f = kitti_frame();
  const SensorIntrinsics s = kitti_like(42, 0.53).intrinsics();
  for (auto _ : state) benchmark::DoNotOptimize(project(f.cloud, s));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * f.cloud.size()));
}
BENCHMARK(BM_Project)->Unit(benchmark::kMillisecond);

void BM_Unproject(benchmark::State& state) {
  const LabeledCloud& f = kitti_frame();
  const SensorIntrinsics s = kitti_like(42, 0.53).intrinsics();
  const ProjectionResult pr = project(f.cloud, s);
  for (auto _ : state) benchmark::DoNotOptimize(unproject(pr.image, s));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * f.cloud.size()));
}
BENCHMARK(BM_Unproject)->Unit(benchmark::kMillisecond);

void BM_HoughVote(benchmark::State& state) {
  const LabeledCloud& f = kitti_frame();
  std::vector<PointVote> votes;
  for (std::size_t i = 0; i < 5000; ++i) {
    const SphericalPoint sp = to_spherical(f.cloud.points[i * 20]);
    votes.push_back({i, sp.r, sp.phi});
  }
  HoughConfig c = HoughConfig::for_min_range(3.0);
  c.phi_min = -0.5;
  c.phi_max = 0.1;
  c.continuity_fill = state.range(0) != 0;
  HoughAccumulator acc(c);
  for (auto _ : state) {
    acc.vote(votes);
    acc.remove_votes(votes);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * votes.size()));
}
BENCHMARK(BM_HoughVote)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CandidateEvaluate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rho(3.0, 80.0);
  std::vector<AzimuthObservation> obs;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 1.0 / rho(rng);
    obs.push_back({i, wrap_two_pi(kTwoPi * static_cast<double>(i * 4000 / n) / 4000.0 + 0.0003 + 0.02 * w), w});
  }
  const HorizontalProblem p(obs);
  long H = static_cast<long>(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.evaluate(H));
    if (++H > 10000) H = static_cast<long>(n);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n));
}
BENCHMARK(BM_CandidateEvaluate)->Arg(256)->Arg(1024)->Arg(4000);

void BM_WeightedMedian(benchmark::State& state) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, double>> base(static_cast<std::size_t>(state.range(0)));
  for (auto& p : base) p = {u(rng), 1.0 + u(rng)};
  std::vector<std::pair<double, double>> scratch;
  for (auto _ : state) {
    scratch = base;
    benchmark::DoNotOptimize(weighted_median_select(scratch));
  }
}
BENCHMARK(BM_WeightedMedian)->Arg(64)->Arg(1024);

void BM_Chamfer(benchmark::State& state) {
  const LabeledCloud& f = kitti_frame();
  PointCloud a;
  a.points.assign(f.cloud.points.begin(), f.cloud.points.begin() + 20000);
  PointCloud b = a;
  for (Point3& p : b.points) p.x += 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(chamfer(a, b));
}
BENCHMARK(BM_Chamfer)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
