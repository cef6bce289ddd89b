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

#include "alri/vertical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include <spdlog/spdlog.h>

#include "alri/errors.hpp"
#include "alri/log.hpp"
#include "alri/stats.hpp"

namespace alri {

VerticalObservation make_vertical_observation(std::size_t index, const Point3& p, double epsilon) {
  const SphericalPoint s = to_spherical(p);
  VerticalObservation o;
  o.index = index;
  o.r = s.r;
  o.q = 1.0 / s.r;
  o.phi = s.phi;
  o.delta_phi = vertical_angle_bound(s.rho, p.z, epsilon);
  if (!(o.delta_phi > 0.0)) throw GeometryError("vertical observation needs a positive error bound");
  o.weight = 1.0 / (o.delta_phi * o.delta_phi);
  return o;
}

namespace {

struct Moments {
  double s = 0.0;
  double xbar = 0.0;
  double ybar = 0.0;
  double sxx_c = 0.0;  // sum w (x - xbar)^2
  double sxy_c = 0.0;
  double sxx = 0.0;  // sum w x^2
};

template <class X, class Y>
Moments moments(std::span<const VerticalObservation> obs, X&& x_of, Y&& y_of) {
  Moments m;
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double w = obs[i].weight;
    m.s += w;
    sx += w * x_of(i);
    sy += w * y_of(i);
  }
  m.xbar = sx / m.s;
  m.ybar = sy / m.s;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double w = obs[i].weight;
    const double dx = x_of(i) - m.xbar;
    m.sxx_c += w * dx * dx;
    m.sxy_c += w * dx * (y_of(i) - m.ybar);
    m.sxx += w * x_of(i) * x_of(i);
  }
  return m;
}

double log_likelihood_from(std::span<const VerticalObservation> obs, const std::vector<double>& residuals) {
  double acc = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double d2 = obs[i].delta_phi * obs[i].delta_phi;
    acc += std::log(kTwoPi * d2) + residuals[i] * residuals[i] / d2;
  }
  return -0.5 * acc;
}

void finish_fit(std::span<const VerticalObservation> obs, const Moments& m, const std::vector<double>& residuals, WlsFit& f) {
  const std::size_t n = obs.size();
  double wrss = 0.0;
  for (std::size_t i = 0; i < n; ++i) wrss += obs[i].weight * residuals[i] * residuals[i];
  f.n = n;
  f.sigma2 = wrss / static_cast<double>(n - 2);
  const double det = m.s * m.sxx_c;  // S * Sxx - Sx^2
  f.slope_var = f.sigma2 * m.s / det;
  f.intercept_var = f.sigma2 * m.sxx / det;
  const double t = t_critical_95(static_cast<long>(n - 2));
  f.slope_ci_halfwidth = t * std::sqrt(f.slope_var);
  f.intercept_ci_halfwidth = t * std::sqrt(f.intercept_var);
  f.log_likelihood = log_likelihood_from(obs, residuals);
}

void check_design(const Moments& m, std::size_t n) {
  if (n < 3) throw FitError("weighted fit needs at least 3 points");
  if (!(m.sxx_c > 1e-13 * m.sxx) || !std::isfinite(m.sxx_c)) throw FitError("weighted fit: degenerate design");
}

}  // namespace

WlsFit wls_fit(std::span<const VerticalObservation> obs) {
  if (obs.size() < 3) throw FitError("weighted fit needs at least 3 points");
  const Moments m = moments(obs, [&](std::size_t i) { return obs[i].q; }, [&](std::size_t i) { return obs[i].phi; });
  check_design(m, obs.size());
  WlsFit f;
  f.slope = m.sxy_c / m.sxx_c;
  f.intercept = m.ybar - f.slope * m.xbar;
  std::vector<double> res(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) res[i] = obs[i].phi - f.slope * obs[i].q - f.intercept;
  finish_fit(obs, m, res, f);
  return f;
}

WlsFit exact_fit(std::span<const VerticalObservation> obs) {
  const WlsFit start = wls_fit(obs);
  double oy = start.slope;
  double phi = start.intercept;
  const std::size_t n = obs.size();
  double r_lo = std::numeric_limits<double>::infinity();
  for (const auto& o : obs) r_lo = std::min(r_lo, o.r);

  std::vector<double> g(n);
  std::vector<double> y(n);
  Moments m;
  for (int step = 0; step < 8; ++step) {
    if (!(std::abs(oy) < r_lo)) throw FitError("exact fit: offset exceeds closest range");
    for (std::size_t i = 0; i < n; ++i) {
      const double a = oy / obs[i].r;
      g[i] = obs[i].q / std::sqrt(1.0 - a * a);
      y[i] = obs[i].phi - std::asin(a) + oy * g[i];
    }
    m = moments(obs, [&](std::size_t i) { return g[i]; }, [&](std::size_t i) { return y[i]; });
    check_design(m, n);
    const double next_oy = m.sxy_c / m.sxx_c;
    const double next_phi = m.ybar - next_oy * m.xbar;
    const double change = std::abs(next_oy - oy) + std::abs(next_phi - phi);
    oy = next_oy;
    phi = next_phi;
    if (change <= 1e-15) break;
  }
  if (!(std::abs(oy) < r_lo)) throw FitError("exact fit: offset exceeds closest range");

  WlsFit f;
  f.slope = oy;
  f.intercept = phi;
  std::vector<double> res(n);
  for (std::size_t i = 0; i < n; ++i) res[i] = obs[i].phi - phi - std::asin(oy / obs[i].r);
  finish_fit(obs, m, res, f);
  return f;
}

double scanline_log_likelihood(std::span<const VerticalObservation> obs, double phi, double oy) {
  std::vector<double> res(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) res[i] = obs[i].phi - phi - std::asin(oy / obs[i].r);
  return log_likelihood_from(obs, res);
}

std::vector<std::size_t> select_members(std::span<const VerticalObservation> obs, double phi, double oy) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (is_member(obs[i], phi, oy)) out.push_back(i);
  }
  return out;
}

MembershipIndex::MembershipIndex(std::vector<VerticalObservation> obs) : obs_(std::move(obs)) {
  if (obs_.empty()) return;
  double q_min = std::numeric_limits<double>::infinity();
  double q_max = -q_min;
  for (const auto& o : obs_) {
    q_min = std::min(q_min, o.q);
    q_max = std::max(q_max, o.q);
  }
  const std::size_t nb = std::clamp<std::size_t>(obs_.size() / 32, 1, 2048);
  buckets_.resize(nb);
  const double span = q_max - q_min;
  for (std::size_t i = 0; i < obs_.size(); ++i) {
    const VerticalObservation& o = obs_[i];
    std::size_t b = 0;
    if (span > 0.0) b = std::min(nb - 1, static_cast<std::size_t>((o.q - q_min) / span * static_cast<double>(nb)));
    Bucket& bk = buckets_[b];
    if (bk.entries.empty()) {
      bk.q_lo = bk.q_hi = o.q;
    } else {
      bk.q_lo = std::min(bk.q_lo, o.q);
      bk.q_hi = std::max(bk.q_hi, o.q);
    }
    bk.max_delta = std::max(bk.max_delta, o.delta_phi);
    bk.entries.push_back({o.phi, i});
  }
  for (Bucket& bk : buckets_) {
    std::sort(bk.entries.begin(), bk.entries.end(), [](const Entry& a, const Entry& b) {
      return a.phi < b.phi || (a.phi == b.phi && a.pos < b.pos);
    });
  }
}

std::vector<std::size_t> MembershipIndex::select(double phi, double oy, double widen_phi, double widen_oy) const {
  std::vector<std::size_t> out;
  for (const Bucket& bk : buckets_) {
    if (bk.entries.empty()) continue;
    if (!(std::abs(oy) * bk.q_hi < 1.0 - 1e-12)) {
      for (const Entry& e : bk.entries) {
        if (is_member(obs_[e.pos], phi, oy, widen_phi, widen_oy)) out.push_back(e.pos);
      }
      continue;
    }
    const double m1 = phi + std::asin(oy * bk.q_lo);
    const double m2 = phi + std::asin(oy * bk.q_hi);
    const double tol = bk.max_delta + widen_phi + widen_oy * bk.q_hi;
    const double slack = 1e-12 * (1.0 + std::abs(m1) + std::abs(m2));
    const double lo = std::min(m1, m2) - tol - slack;
    const double hi = std::max(m1, m2) + tol + slack;
    auto it = std::lower_bound(bk.entries.begin(), bk.entries.end(), lo, [](const Entry& e, double v) { return e.phi < v; });
    for (; it != bk.entries.end() && it->phi <= hi; ++it) {
      if (is_member(obs_[it->pos], phi, oy, widen_phi, widen_oy)) out.push_back(it->pos);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

const char* to_string(VerticalOrigin o) {
  return o == VerticalOrigin::wls ? "wls" : "heuristic";
}

namespace {

std::vector<VerticalObservation> gather(const std::vector<VerticalObservation>& all, const std::vector<std::size_t>& positions) {
  std::vector<VerticalObservation> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(all[p]);
  return out;
}

std::vector<std::size_t> point_indices(const std::vector<VerticalObservation>& all, const std::vector<std::size_t>& positions) {
  std::vector<std::size_t> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(all[p].index);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

IterativeFitResult iterative_fit(const MembershipIndex& index, double seed_phi, double seed_oy, const FitOptions& options) {
  IterativeFitResult result;
  const auto& all = index.observations();
  std::vector<std::size_t> members = index.select(seed_phi, seed_oy, options.seed_phi_tolerance, options.seed_oy_tolerance);
  for (int it = 1; it <= options.max_iterations; ++it) {
    result.last_members = members;
    if (members.size() < 3) {
      result.failure = "insufficient points";
      return result;
    }
    const std::vector<VerticalObservation> sub = gather(all, members);
    WlsFit f;
    try {
      f = exact_fit(sub);
    } catch (const FitError& e) {
      result.failure = e.what();
      return result;
    }
    std::vector<std::size_t> next = index.select(f.intercept, f.slope);
    if (next == members) {
      ScanlineFit s;
      s.phi = f.intercept;
      s.oy = f.slope;
      s.phi_ci = f.intercept_ci_halfwidth;
      s.oy_ci = f.slope_ci_halfwidth;
      s.uncertainty = -f.log_likelihood;
      s.origin = VerticalOrigin::wls;
      s.iterations = it;
      s.members = point_indices(all, members);
      result.fit = std::move(s);
      return result;
    }
    members = std::move(next);
  }
  result.last_members = members;
  result.failure = "membership did not converge";
  return result;
}

IterativeFitResult iterative_fit(std::span<const VerticalObservation> obs, double seed_phi, double seed_oy, const FitOptions& options) {
  MembershipIndex index(std::vector<VerticalObservation>(obs.begin(), obs.end()));
  return iterative_fit(index, seed_phi, seed_oy, options);
}

ScanlineFit heuristic_vertical(const ScanlineFit& below, const ScanlineFit& above, std::span<const VerticalObservation> members) {
  if (members.empty()) throw FitError("heuristic fit needs at least one point");
  ScanlineFit s;
  s.origin = VerticalOrigin::heuristic;
  s.oy = 0.5 * (below.oy + above.oy);
  double acc = 0.0;
  double max_delta = 0.0;
  for (const auto& o : members) {
    acc += o.phi - s.oy * o.q;
    max_delta = std::max(max_delta, o.delta_phi);
  }
  s.phi = acc / static_cast<double>(members.size());
  std::vector<double> res(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) res[i] = members[i].phi - s.phi - s.oy * members[i].q;
  s.uncertainty = -log_likelihood_from(members, res);
  s.phi_ci = max_delta;
  s.oy_ci = 0.5 * std::abs(above.oy - below.oy);
  s.members.reserve(members.size());
  for (const auto& o : members) s.members.push_back(o.index);
  std::sort(s.members.begin(), s.members.end());
  return s;
}

bool bands_intersect(const ScanlineFit& a, const ScanlineFit& b, double r_min, double r_max) {
  const double max_oy = std::max(std::abs(a.oy), std::abs(b.oy));
  const double r_lo = std::max(r_min, max_oy * (1.0 + 1e-9) + 1e-12);
  const double r_hi = std::max(r_max, r_lo);
  auto diff = [&](double r) { return (a.phi + std::asin(a.oy / r)) - (b.phi + std::asin(b.oy / r)); };
  auto width = [&](double r) { return a.phi_ci + b.phi_ci + (a.oy_ci + b.oy_ci) / r; };
  const double d_lo = diff(r_lo);
  const double d_hi = diff(r_hi);
  if (std::abs(d_lo) <= width(r_lo) || std::abs(d_hi) <= width(r_hi)) return true;
  return (d_lo > 0.0) != (d_hi > 0.0);
}

ConflictDecision resolve_conflicts(const ScanlineFit& candidate, const std::vector<ScanlineRecord>& records,
                                   const std::vector<RejectedCandidate>& rejected_pool, std::span<const std::int64_t> owner,
                                   double r_min, double r_max) {
  ConflictDecision d;
  for (std::size_t m : candidate.members) {
    if (m >= owner.size()) continue;
    const std::int64_t o = owner[m];
    if (o >= 0 && records[static_cast<std::size_t>(o)].valid) d.conflicts.push_back(static_cast<std::size_t>(o));
  }
  for (std::size_t id = 0; id < records.size(); ++id) {
    if (!records[id].valid) continue;
    if (bands_intersect(candidate, records[id].fit, r_min, r_max)) d.conflicts.push_back(id);
  }
  std::sort(d.conflicts.begin(), d.conflicts.end());
  d.conflicts.erase(std::unique(d.conflicts.begin(), d.conflicts.end()), d.conflicts.end());
  if (d.conflicts.empty()) {
    d.accept = true;
    return d;
  }
  for (std::size_t id : d.conflicts) {
    if (!(candidate.uncertainty < records[id].fit.uncertainty)) return d;
  }
  d.accept = true;
  d.invalidated = d.conflicts;
  for (std::size_t k = 0; k < rejected_pool.size(); ++k) {
    bool all_invalid = true;
    for (std::size_t b : rejected_pool[k].blockers) {
      const bool now_invalid = !records[b].valid || std::binary_search(d.invalidated.begin(), d.invalidated.end(), b);
      if (!now_invalid) {
        all_invalid = false;
        break;
      }
    }
    if (all_invalid) d.recovered.push_back(k);
  }
  return d;
}

namespace {

class ScanlineDetector {
 public:
  ScanlineDetector(const PointCloud& cloud, double epsilon, const FeatureToggles& toggles, const VerticalOptions& options)
      : cloud_(cloud), epsilon_(epsilon), toggles_(toggles), options_(options) {}

  VerticalResult run();

 private:
  void vote(std::size_t pos);
  void unvote(std::size_t pos);
  void refresh(std::size_t pos);
  std::optional<ScanlineFit> heuristic(const HoughPeak& peak, const IterativeFitResult& failed);
  void accept(ScanlineFit fit, const std::vector<std::size_t>& invalidate, VerticalTrace& trace);

  const PointCloud& cloud_;
  double epsilon_;
  FeatureToggles toggles_;
  const VerticalOptions& options_;

  std::vector<VerticalObservation> obs_;
  std::vector<std::size_t> pos_of_;  // point index -> position, or npos
  std::unique_ptr<MembershipIndex> index_;
  std::unique_ptr<HoughAccumulator> acc_;
  std::vector<std::uint8_t> voting_;
  std::vector<std::int64_t> owner_;  // by point index
  std::vector<ScanlineRecord> records_;
  std::vector<RejectedCandidate> pool_;
  std::size_t unassigned_ = 0;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  VerticalStats stats_;
};

constexpr std::size_t kNoPos = static_cast<std::size_t>(-1);

void ScanlineDetector::vote(std::size_t pos) {
  const auto& o = obs_[pos];
  acc_->vote(PointVote{pos, o.r, o.phi});
  voting_[pos] = 1;
}

void ScanlineDetector::unvote(std::size_t pos) {
  const auto& o = obs_[pos];
  acc_->remove_votes(PointVote{pos, o.r, o.phi});
  voting_[pos] = 0;
}

void ScanlineDetector::refresh(std::size_t pos) {
  if (voting_[pos]) unvote(pos);
  vote(pos);
}

std::optional<ScanlineFit> ScanlineDetector::heuristic(const HoughPeak& peak, const IterativeFitResult& failed) {
  if (failed.last_members.empty()) return std::nullopt;
  const ScanlineRecord* below = nullptr;
  const ScanlineRecord* above = nullptr;
  for (const auto& rec : records_) {
    if (!rec.valid) continue;
    if (rec.fit.phi < peak.phi && (below == nullptr || rec.fit.phi > below->fit.phi)) below = &rec;
    if (rec.fit.phi > peak.phi && (above == nullptr || rec.fit.phi < above->fit.phi)) above = &rec;
  }
  if (below == nullptr || above == nullptr) return std::nullopt;
  std::vector<VerticalObservation> seed;
  for (std::size_t p : failed.last_members) seed.push_back(obs_[p]);
  ScanlineFit h = heuristic_vertical(below->fit, above->fit, seed);
  const std::vector<std::size_t> sel = index_->select(h.phi, h.oy);
  if (sel.empty()) return std::nullopt;
  std::vector<VerticalObservation> members;
  for (std::size_t p : sel) members.push_back(obs_[p]);
  ScanlineFit out = heuristic_vertical(below->fit, above->fit, members);
  out.phi = h.phi;
  out.oy = h.oy;
  std::vector<double> res(members.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const double r = members[i].phi - out.phi - out.oy * members[i].q;
    const double d2 = members[i].delta_phi * members[i].delta_phi;
    acc += std::log(kTwoPi * d2) + r * r / d2;
  }
  out.uncertainty = 0.5 * acc;
  return out;
}

void ScanlineDetector::accept(ScanlineFit fit, const std::vector<std::size_t>& invalidate, VerticalTrace& trace) {
  std::vector<std::size_t> released;
  for (std::size_t id : invalidate) {
    ScanlineRecord& rec = records_[id];
    rec.valid = false;
    ++stats_.invalidated;
    for (std::size_t m : rec.fit.members) {
      if (owner_[m] == static_cast<std::int64_t>(id)) {
        owner_[m] = -1;
        ++unassigned_;
        released.push_back(m);
      }
    }
  }
  const auto id = static_cast<std::int64_t>(records_.size());
  for (std::size_t m : fit.members) {
    if (owner_[m] < 0) --unassigned_;
    owner_[m] = id;
    const std::size_t pos = pos_of_[m];
    if (voting_[pos]) unvote(pos);
  }
  for (std::size_t m : released) {
    const std::size_t pos = pos_of_[m];
    if (owner_[m] < 0 && !voting_[pos]) vote(pos);
  }
  trace.invalidated = invalidate;
  records_.push_back({std::move(fit), true});
  ++stats_.accepted;
}

VerticalResult ScanlineDetector::run() {
  const std::size_t n_points = cloud_.size();
  pos_of_.assign(n_points, kNoPos);
  owner_.assign(n_points, -1);
  const double axis_limit = std::sqrt(2.0) * epsilon_;
  for (std::size_t i = 0; i < n_points; ++i) {
    const Point3& p = cloud_.points[i];
    if (!is_usable(p)) continue;
    if (!(std::hypot(p.x, p.y) > axis_limit)) {
      ++stats_.excluded_near_axis;
      continue;
    }
    pos_of_[i] = obs_.size();
    obs_.push_back(make_vertical_observation(i, p, epsilon_));
  }
  if (obs_.empty()) throw EstimationError("no usable points for scanline detection");
  r_min_ = std::numeric_limits<double>::infinity();
  r_max_ = 0.0;
  for (const auto& o : obs_) {
    r_min_ = std::min(r_min_, o.r);
    r_max_ = std::max(r_max_, o.r);
  }

  HoughConfig hc = HoughConfig::for_min_range(r_min_);
  hc.continuity_fill = toggles_.hough_continuity;
  hc.min_peak_votes = options_.min_peak_votes;
  acc_ = std::make_unique<HoughAccumulator>(hc);
  index_ = std::make_unique<MembershipIndex>(obs_);
  voting_.assign(obs_.size(), 0);
  {
    std::vector<PointVote> votes(obs_.size());
    for (std::size_t k = 0; k < obs_.size(); ++k) votes[k] = {k, obs_[k].r, obs_[k].phi};
    acc_->vote(votes);
    std::fill(voting_.begin(), voting_.end(), 1);
  }
  if (!options_.hough_pgm_path.empty()) acc_->write_pgm(options_.hough_pgm_path);
  unassigned_ = obs_.size();

  FitOptions fo = options_.fit;
  fo.seed_phi_tolerance = std::max(fo.seed_phi_tolerance, hc.phi_step);
  fo.seed_oy_tolerance = std::max(fo.seed_oy_tolerance, hc.oy_step);
  const std::size_t cap = 10 * acc_->rows();

  while (unassigned_ > 0) {
    const std::optional<HoughPeak> peak = acc_->peak();
    if (!peak) break;
    if (++stats_.iterations > cap) throw EstimationError("scanline detection exceeded its iteration cap");

    VerticalTrace trace;
    trace.iteration = stats_.iterations;
    trace.peak = *peak;

    const IterativeFitResult res = iterative_fit(*index_, peak->phi, peak->oy, fo);
    std::optional<ScanlineFit> cand = res.fit;
    if (!cand && toggles_.vertical_heuristics) {
      cand = heuristic(*peak, res);
      if (cand) ++stats_.heuristic_fits;
    }
    auto reject = [&](const char* decision, std::string reason) {
      acc_->reset_equal_hash_cells(*peak);
      ++stats_.rejected;
      trace.decision = decision;
      trace.reason = std::move(reason);
    };

    if (!cand) {
      reject("failed", res.failure.empty() ? "no fit" : res.failure);
    } else {
      trace.fitted = true;
      trace.origin = cand->origin;
      trace.phi = cand->phi;
      trace.oy = cand->oy;
      trace.uncertainty = cand->uncertainty;
      trace.members = cand->members.size();
      if (!toggles_.conflict_resolution) {
        const bool taken = std::any_of(cand->members.begin(), cand->members.end(), [&](std::size_t m) { return owner_[m] >= 0; });
        if (taken) {
          reject("rejected", "members already assigned");
        } else {
          trace.decision = "accepted";
          accept(std::move(*cand), {}, trace);
        }
      } else {
        const ConflictDecision d = resolve_conflicts(*cand, records_, pool_, owner_, r_min_, r_max_);
        if (d.accept) {
          std::vector<std::vector<std::size_t>> revive;
          for (std::size_t k : d.recovered) revive.push_back(pool_[k].fit.members);
          for (auto it = d.recovered.rbegin(); it != d.recovered.rend(); ++it) pool_.erase(pool_.begin() + static_cast<std::ptrdiff_t>(*it));
          trace.decision = "accepted";
          accept(std::move(*cand), d.invalidated, trace);
          for (const auto& members : revive) {
            for (std::size_t m : members) {
              if (owner_[m] < 0) refresh(pos_of_[m]);
            }
          }
          stats_.recovered += revive.size();
          trace.recovered = revive.size();
        } else {
          pool_.push_back({*cand, d.conflicts});
          reject("rejected", "conflicts with a more certain scanline");
        }
      }
    }
    if (options_.trace) options_.trace(trace);
  }

  VerticalResult out;
  out.epsilon = epsilon_;
  out.stats = stats_;
  std::vector<std::size_t> valid;
  for (std::size_t id = 0; id < records_.size(); ++id) {
    if (records_[id].valid) valid.push_back(id);
  }
  if (valid.empty()) throw EstimationError("no scanline could be identified");
  std::sort(valid.begin(), valid.end(), [&](std::size_t a, std::size_t b) { return records_[a].fit.phi < records_[b].fit.phi; });
  std::vector<std::int64_t> ordinal(records_.size(), -1);
  for (std::size_t k = 0; k < valid.size(); ++k) {
    ordinal[valid[k]] = static_cast<std::int64_t>(k);
    out.scanlines.push_back(records_[valid[k]].fit);
  }
  out.assignment.assign(n_points, -1);
  for (std::size_t i = 0; i < n_points; ++i) {
    if (owner_[i] >= 0) out.assignment[i] = ordinal[static_cast<std::size_t>(owner_[i])];
    if (out.assignment[i] < 0) out.unassigned.push_back(i);
  }
  logger().debug("vertical: {} scanlines, {} iterations, {} rejected, {} invalidated, {} unassigned", out.scanlines.size(),
                 stats_.iterations, stats_.rejected, stats_.invalidated, out.unassigned.size());
  return out;
}

}  // namespace

VerticalResult detect_scanlines(const PointCloud& cloud, double epsilon, const FeatureToggles& toggles, const VerticalOptions& options) {
  if (cloud.empty()) throw EstimationError("empty point cloud");
  ScanlineDetector detector(cloud, epsilon, toggles, options);
  return detector.run();
}

}  // namespace alri
