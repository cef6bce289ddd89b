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
#include <string>

#include "alri/geometry.hpp"
#include "alri/intrinsics.hpp"
#include "alri/metrics.hpp"
#include "alri/projection.hpp"
#include "alri/simulator.hpp"

namespace alri {

enum class CloudFormat { kitti_bin, xyz_csv };

/// ".bin" selects kitti_bin; ".csv", ".xyz" and ".txt" select xyz_csv.
/// Throws ConfigError for anything else.
CloudFormat cloud_format_from_path(const std::string& path);

struct CloudReadStats {
  std::size_t records = 0;
  std::size_t dropped_non_finite = 0;
};

/// kitti_bin: little-endian float32 records (x, y, z, intensity).
/// xyz_csv: optional header line, then x,y,z[,intensity] rows.
/// Non-finite points are dropped and counted.
PointCloud read_cloud(const std::string& path, CloudFormat format, CloudReadStats* stats = nullptr);
PointCloud read_cloud(const std::string& path);

/// Missing intensities are written as 0 in kitti_bin and omitted in CSV.
void write_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format);
void write_cloud(const PointCloud& cloud, const std::string& path);

std::string intrinsics_to_json(const SensorIntrinsics& s);
SensorIntrinsics intrinsics_from_json(const std::string& text);
void write_intrinsics(const SensorIntrinsics& s, const std::string& path);
SensorIntrinsics read_intrinsics(const std::string& path);

/// "ALRI", version 0x01, u32 width, u32 height, float32 ranges (row-major).
void write_range_image(const RangeImage& image, const std::string& path);
RangeImage read_range_image(const std::string& path);
std::string encode_range_image(const RangeImage& image);
RangeImage decode_range_image(const std::string& bytes);

/// {"cd_m", "psnr_db", "se"}; an infinite PSNR is written as "inf".
std::string metrics_to_json(const MetricReport& m);
MetricReport metrics_from_json(const std::string& text);

/// Intrinsics schema plus quantization_m, dropout, seed, scene and the
/// simulation ranges.
std::string sensor_spec_to_json(const SensorSpec& spec);
SensorSpec sensor_spec_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace alri
