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
#include <cstdlib>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alri/geometry.hpp"

namespace alri {

/// Discretization of the (elevation, vertical offset) parameter space.
struct HoughConfig {
  double phi_min = -kPi / 2.0;
  double phi_max = kPi / 2.0;
  double phi_step = 1e-4;
  double oy_step = 1e-3;
  /// Columns span [-oy_max, +oy_max]. Usually min(min range, 0.5 m).
  double oy_max = 0.5;
  /// Vote-for-discontinuities: fill rows skipped between adjacent columns.
  bool continuity_fill = true;
  /// Cells below this count are never reported as peaks.
  std::uint32_t min_peak_votes = 2;

  /// Default discretization with oy_max clipped by the closest observed range.
  static HoughConfig for_min_range(double min_range);

  /// Throws ConfigError on non-positive steps or an empty range.
  void validate() const;
};

/// 64-bit multiplicative hash of a point index: ((i + 1) * c) mod 2^64.
constexpr std::uint64_t knuth_hash(std::uint64_t index) {
  return (index + 1) * 11400714819323198485ull;
}

/// One point's contribution to the accumulator.
struct PointVote {
  std::size_t index = 0;
  double r = 0.0;
  double phi = 0.0;
};

struct HoughPeak {
  std::size_t row = 0;
  std::size_t col = 0;
  std::uint32_t votes = 0;
  std::uint64_t hash = 0;
  double phi = 0.0;
  double oy = 0.0;
};

/// Dense vote grid over (phi', oy) with a parallel XOR hash grid.
///
/// Each point traces phi' = phi - asin(oy / r) across the oy columns and
/// increments one cell per column (plus skipped rows when continuity_fill is
/// on). The hash of a cell is the XOR of knuth_hash over its voters, so two
/// cells fed by the same point set carry the same hash.
///
/// Storage is allocated zeroed and lazily, so rows that no point reaches do
/// not consume physical memory. A block-maximum cache keeps peak() cheap; all
/// mutators leave the cache consistent.
class HoughAccumulator {
 public:
  explicit HoughAccumulator(const HoughConfig& config);

  HoughAccumulator(const HoughAccumulator&) = delete;
  HoughAccumulator& operator=(const HoughAccumulator&) = delete;
  HoughAccumulator(HoughAccumulator&&) noexcept = default;
  HoughAccumulator& operator=(HoughAccumulator&&) noexcept = default;

  const HoughConfig& config() const { return config_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double row_phi(std::size_t row) const { return config_.phi_min + static_cast<double>(row) * config_.phi_step; }
  double col_oy(std::size_t col) const { return -config_.oy_max + static_cast<double>(col) * config_.oy_step; }

  void vote(const PointVote& p);
  void vote(std::span<const PointVote> points);

  /// Exact inverse of vote(). Throws InternalError when a count would go
  /// negative in a cell that was never reset (double removal).
  void remove_votes(std::span<const PointVote> points);
  void remove_votes(const PointVote& p) { remove_votes(std::span<const PointVote>(&p, 1)); }

  /// Highest cell; ties go to the lowest (row, col) in row-major order.
  /// Returns nullopt when the best count is below min_peak_votes.
  std::optional<HoughPeak> peak() const;

  /// Zeroes the count of every cell whose hash equals `hash` (hashes are kept).
  /// Returns the number of cells whose count changed.
  std::size_t reset_equal_hash_cells(std::uint64_t hash);

  /// Same effect for the hash of a peak just returned by peak(), scanning
  /// only blocks that can hold an equal contributor set.
  std::size_t reset_equal_hash_cells(const HoughPeak& peak);

  std::uint32_t votes(std::size_t row, std::size_t col) const { return counts_[row * cols_ + col]; }
  std::uint64_t hash(std::size_t row, std::size_t col) const { return hashes_[row * cols_ + col]; }
  std::uint64_t total_votes() const { return total_votes_; }

  /// Number of cells a point occupies (same traversal as vote()).
  std::size_t cells_for(const PointVote& p) const;

  /// Calls fn(row, col) for each cell visited by a point, in traversal order.
  template <class Fn>
  void for_each_cell(double r, double phi, Fn&& fn) const;

  /// Writes the touched rows of the vote grid as an 8-bit binary PGM, scaled
  /// so the maximum count maps to 255.
  void write_pgm(const std::string& path) const;

 private:
  struct FreeDeleter {
    void operator()(void* p) const { std::free(p); }
  };
  struct BlockMax {
    std::uint32_t votes = 0;
    std::size_t cell = 0;
  };

  static constexpr std::size_t kBlockRows = 2;

  void add_cell(std::size_t row, std::size_t col, std::uint64_t h);
  void sub_cell(std::size_t row, std::size_t col, std::uint64_t h);
  void mark_dirty(std::size_t block);
  void refresh_dirty_blocks();
  void recompute_block(std::size_t block);
  std::size_t reset_range(std::size_t begin, std::size_t end, std::uint64_t hash);

  HoughConfig config_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::unique_ptr<std::uint32_t[], FreeDeleter> counts_;
  std::unique_ptr<std::uint64_t[], FreeDeleter> hashes_;
  std::unique_ptr<std::uint8_t[], FreeDeleter> reset_;
  std::vector<BlockMax> block_max_;
  std::vector<std::uint8_t> block_dirty_;
  std::vector<std::size_t> dirty_list_;
  std::vector<std::size_t> reset_cells_;
  std::size_t touched_lo_ = 0;
  std::size_t touched_hi_ = 0;  // exclusive
  std::uint64_t total_votes_ = 0;
};

template <class Fn>
void HoughAccumulator::for_each_cell(double r, double phi, Fn&& fn) const {
  const double inv_step = 1.0 / config_.phi_step;
  const long long last_row = static_cast<long long>(rows_) - 1;
  bool have_prev = false;
  long long prev = 0;
  for (std::size_t k = 0; k < cols_; ++k) {
    const double oy = col_oy(k);
    if (!(std::abs(oy) < r)) {
      have_prev = false;
      continue;
    }
    const double phi_prime = phi - std::asin(oy / r);
    const long long j = static_cast<long long>(std::floor((phi_prime - config_.phi_min) * inv_step + 0.5));
    if (config_.continuity_fill && have_prev && (j - prev > 1 || prev - j > 1)) {
      // Rows strictly between prev and j: the half nearer prev belongs to
      // the previous column, the rest to this one.
      const long long step = j > prev ? 1 : -1;
      const long long gap = (j > prev ? j - prev : prev - j) - 1;
      const long long to_prev = gap / 2;
      for (long long t = 1; t <= gap; ++t) {
        const long long row = prev + step * t;
        if (row < 0 || row > last_row) continue;
        fn(static_cast<std::size_t>(row), t <= to_prev ? k - 1 : k);
      }
    }
    if (j >= 0 && j <= last_row) fn(static_cast<std::size_t>(j), k);
    have_prev = true;
    prev = j;
  }
}

}  // namespace alri
