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

#include "alri/hough.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "alri/errors.hpp"

namespace alri {

HoughConfig HoughConfig::for_min_range(double min_range) {
  HoughConfig c;
  c.oy_max = std::min(min_range, 0.5);
  return c;
}

void HoughConfig::validate() const {
  if (!(phi_step > 0.0) || !(oy_step > 0.0)) throw ConfigError("hough: steps must be positive");
  if (!(oy_max > 0.0)) throw ConfigError("hough: oy_max must be positive");
  if (!(phi_min < phi_max)) throw ConfigError("hough: empty elevation range");
}

namespace {

template <class T>
T* zeroed(std::size_t n) {
  void* p = std::calloc(n, sizeof(T));
  if (p == nullptr) throw std::bad_alloc();
  return static_cast<T*>(p);
}

}  // namespace

HoughAccumulator::HoughAccumulator(const HoughConfig& config) : config_(config) {
  config_.validate();
  rows_ = static_cast<std::size_t>(std::floor((config_.phi_max - config_.phi_min) / config_.phi_step + 1e-9)) + 1;
  cols_ = static_cast<std::size_t>(std::floor(2.0 * config_.oy_max / config_.oy_step + 1e-9)) + 1;
  const std::size_t n = rows_ * cols_;
  counts_.reset(zeroed<std::uint32_t>(n));
  hashes_.reset(zeroed<std::uint64_t>(n));
  reset_.reset(zeroed<std::uint8_t>(n));
  const std::size_t blocks = (rows_ + kBlockRows - 1) / kBlockRows;
  block_max_.resize(blocks);
  for (std::size_t b = 0; b < blocks; ++b) block_max_[b].cell = b * kBlockRows * cols_;
  block_dirty_.assign(blocks, 0);
  touched_lo_ = rows_;
  touched_hi_ = 0;
}

void HoughAccumulator::add_cell(std::size_t row, std::size_t col, std::uint64_t h) {
  const std::size_t cell = row * cols_ + col;
  const std::uint32_t v = ++counts_[cell];
  hashes_[cell] ^= h;
  ++total_votes_;
  touched_lo_ = std::min(touched_lo_, row);
  touched_hi_ = std::max(touched_hi_, row + 1);
  const std::size_t b = row / kBlockRows;
  if (block_dirty_[b]) return;
  BlockMax& m = block_max_[b];
  if (v > m.votes || (v == m.votes && cell < m.cell)) {
    m.votes = v;
    m.cell = cell;
  }
}

void HoughAccumulator::sub_cell(std::size_t row, std::size_t col, std::uint64_t h) {
  const std::size_t cell = row * cols_ + col;
  hashes_[cell] ^= h;
  if (counts_[cell] == 0) {
    if (!reset_[cell]) throw InternalError("hough: vote count would become negative");
    return;
  }
  --counts_[cell];
  --total_votes_;
  const std::size_t b = row / kBlockRows;
  if (block_max_[b].cell == cell) mark_dirty(b);
}

void HoughAccumulator::mark_dirty(std::size_t block) {
  if (block_dirty_[block]) return;
  block_dirty_[block] = 1;
  dirty_list_.push_back(block);
}

void HoughAccumulator::recompute_block(std::size_t block) {
  const std::size_t begin = block * kBlockRows * cols_;
  const std::size_t end = std::min(rows_, (block + 1) * kBlockRows) * cols_;
  BlockMax m{0, begin};
  for (std::size_t c = begin; c < end; ++c) {
    if (counts_[c] > m.votes) {
      m.votes = counts_[c];
      m.cell = c;
    }
  }
  block_max_[block] = m;
}

void HoughAccumulator::refresh_dirty_blocks() {
  for (std::size_t b : dirty_list_) {
    recompute_block(b);
    block_dirty_[b] = 0;
  }
  dirty_list_.clear();
}

void HoughAccumulator::vote(const PointVote& p) {
  vote(std::span<const PointVote>(&p, 1));
}

void HoughAccumulator::vote(std::span<const PointVote> points) {
  for (const PointVote& p : points) {
    const std::uint64_t h = knuth_hash(p.index);
    for_each_cell(p.r, p.phi, [&](std::size_t row, std::size_t col) { add_cell(row, col, h); });
  }
  refresh_dirty_blocks();
}

void HoughAccumulator::remove_votes(std::span<const PointVote> points) {
  for (const PointVote& p : points) {
    const std::uint64_t h = knuth_hash(p.index);
    for_each_cell(p.r, p.phi, [&](std::size_t row, std::size_t col) { sub_cell(row, col, h); });
  }
  refresh_dirty_blocks();
}

std::optional<HoughPeak> HoughAccumulator::peak() const {
  const BlockMax* best = nullptr;
  for (const BlockMax& m : block_max_) {
    if (best == nullptr || m.votes > best->votes) best = &m;
  }
  if (best == nullptr || best->votes < config_.min_peak_votes) return std::nullopt;
  HoughPeak p;
  p.row = best->cell / cols_;
  p.col = best->cell % cols_;
  p.votes = best->votes;
  p.hash = hashes_[best->cell];
  p.phi = row_phi(p.row);
  p.oy = col_oy(p.col);
  return p;
}

std::size_t HoughAccumulator::reset_range(std::size_t begin, std::size_t end, std::uint64_t hash) {
  std::size_t changed = 0;
  for (std::size_t c = begin; c < end; ++c) {
    if (hashes_[c] != hash) continue;
    if (!reset_[c]) {
      reset_[c] = 1;
      reset_cells_.push_back(c);
    }
    if (counts_[c] == 0) continue;
    total_votes_ -= counts_[c];
    counts_[c] = 0;
    ++changed;
    const std::size_t b = (c / cols_) / kBlockRows;
    if (block_max_[b].cell == c) mark_dirty(b);
  }
  return changed;
}

std::size_t HoughAccumulator::reset_equal_hash_cells(std::uint64_t hash) {
  if (touched_lo_ >= touched_hi_) return 0;
  const std::size_t changed = reset_range(touched_lo_ * cols_, touched_hi_ * cols_, hash);
  refresh_dirty_blocks();
  return changed;
}

std::size_t HoughAccumulator::reset_equal_hash_cells(const HoughPeak& peak) {
  const std::size_t cell0 = peak.row * cols_ + peak.col;
  // A never-reset cell holds exactly `count` contributors, so an equal hash
  // implies an equal count; that count is the global maximum. Cells that were
  // reset before lose this link and are checked individually.
  if (peak.row >= rows_ || peak.col >= cols_ || reset_[cell0] || counts_[cell0] != peak.votes || hashes_[cell0] != peak.hash) {
    return reset_equal_hash_cells(peak.hash);
  }
  for (const BlockMax& m : block_max_) {
    if (m.votes > peak.votes) return reset_equal_hash_cells(peak.hash);
  }
  std::size_t changed = 0;
  const std::size_t first = touched_lo_ / kBlockRows;
  const std::size_t last = touched_hi_ == 0 ? 0 : (touched_hi_ - 1) / kBlockRows + 1;
  for (std::size_t b = first; b < last; ++b) {
    if (block_max_[b].votes < peak.votes) continue;
    const std::size_t begin = b * kBlockRows * cols_;
    const std::size_t end = std::min(rows_, (b + 1) * kBlockRows) * cols_;
    changed += reset_range(begin, end, peak.hash);
  }
  const std::size_t known = reset_cells_.size();
  for (std::size_t i = 0; i < known; ++i) {
    const std::size_t c = reset_cells_[i];
    if (hashes_[c] != peak.hash || counts_[c] == 0) continue;
    total_votes_ -= counts_[c];
    counts_[c] = 0;
    ++changed;
    const std::size_t b = (c / cols_) / kBlockRows;
    if (block_max_[b].cell == c) mark_dirty(b);
  }
  refresh_dirty_blocks();
  return changed;
}

std::size_t HoughAccumulator::cells_for(const PointVote& p) const {
  std::size_t n = 0;
  for_each_cell(p.r, p.phi, [&](std::size_t, std::size_t) { ++n; });
  return n;
}

void HoughAccumulator::write_pgm(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path);
  const std::size_t lo = touched_lo_ < touched_hi_ ? touched_lo_ : 0;
  const std::size_t hi = touched_lo_ < touched_hi_ ? touched_hi_ : 0;
  std::uint32_t max_count = 1;
  for (std::size_t c = lo * cols_; c < hi * cols_; ++c) max_count = std::max(max_count, counts_[c]);
  out << "P5\n" << cols_ << ' ' << (hi - lo) << "\n255\n";
  std::vector<unsigned char> row(cols_);
  for (std::size_t j = lo; j < hi; ++j) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double v = static_cast<double>(counts_[j * cols_ + k]) / max_count;
      row[k] = static_cast<unsigned char>(std::lround(255.0 * v));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace alri
