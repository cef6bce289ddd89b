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

#include "alri/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include <spdlog/spdlog.h>

#include "alri/errors.hpp"
#include "alri/log.hpp"

namespace alri {

using nlohmann::json;

namespace {

std::string lower_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return {};
  std::string ext = path.substr(dot);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

template <class T>
T from_le(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof v);
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof v);
  }
  return v;
}

template <class T>
void to_le(T v, std::string& out) {
  unsigned char b[sizeof v];
  std::memcpy(b, &v, sizeof v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof v);
  out.append(reinterpret_cast<const char*>(b), sizeof v);
}

std::string read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return ss.str();
}

void write_binary(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

PointCloud read_kitti(const std::string& path, CloudReadStats& stats) {
  const std::string bytes = read_binary(path);
  constexpr std::size_t kRecord = 16;
  if (bytes.size() % kRecord != 0) {
    throw FormatError(path + ": truncated record at byte offset " + std::to_string(bytes.size() / kRecord * kRecord));
  }
  PointCloud cloud;
  const std::size_t n = bytes.size() / kRecord;
  cloud.points.reserve(n);
  cloud.intensities.reserve(n);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < n; ++i, p += kRecord) {
    const float x = from_le<float>(p);
    const float y = from_le<float>(p + 4);
    const float z = from_le<float>(p + 8);
    const float w = from_le<float>(p + 12);
    ++stats.records;
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      ++stats.dropped_non_finite;
      continue;
    }
    cloud.points.push_back({x, y, z});
    cloud.intensities.push_back(w);
  }
  return cloud;
}

bool parse_row(const std::string& line, double (&v)[4], int& count) {
  count = 0;
  const char* s = line.c_str();
  while (*s != '\0') {
    while (*s == ' ' || *s == '\t') ++s;
    if (*s == '\0' || *s == '\r') break;
    if (count == 4) return false;
    char* end = nullptr;
    v[count] = std::strtod(s, &end);
    if (end == s) return false;
    ++count;
    s = end;
    while (*s == ' ' || *s == '\t' || *s == '\r') ++s;
    if (*s == ',') {
      ++s;
    } else if (*s != '\0') {
      return false;
    }
  }
  return count == 3 || count == 4;
}

PointCloud read_csv(const std::string& path, CloudReadStats& stats) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  int columns = 0;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    double v[4];
    int count = 0;
    if (!parse_row(line, v, count)) {
      if (line_no == 1) continue;  // header
      throw FormatError(path + ": malformed row at line " + std::to_string(line_no) + " (byte offset " + std::to_string(line_offset) + ")");
    }
    if (columns == 0) columns = count;
    if (count != columns) throw FormatError(path + ": inconsistent column count at line " + std::to_string(line_no));
    ++stats.records;
    if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2])) {
      ++stats.dropped_non_finite;
      continue;
    }
    cloud.points.push_back({v[0], v[1], v[2]});
    if (count == 4) cloud.intensities.push_back(static_cast<float>(v[3]));
  }
  if (in.bad()) throw IoError("read failed: " + path);
  return cloud;
}

}  // namespace

CloudFormat cloud_format_from_path(const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".bin") return CloudFormat::kitti_bin;
  if (ext == ".csv" || ext == ".xyz" || ext == ".txt") return CloudFormat::xyz_csv;
  throw ConfigError("cannot infer cloud format from '" + path + "' (use .bin or .csv)");
}

PointCloud read_cloud(const std::string& path, CloudFormat format, CloudReadStats* stats) {
  CloudReadStats local;
  PointCloud cloud = format == CloudFormat::kitti_bin ? read_kitti(path, local) : read_csv(path, local);
  if (local.dropped_non_finite > 0) logger().info("{}: dropped {} non-finite points", path, local.dropped_non_finite);
  if (stats != nullptr) *stats = local;
  return cloud;
}

PointCloud read_cloud(const std::string& path) {
  return read_cloud(path, cloud_format_from_path(path));
}

void write_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format) {
  cloud.validate();
  std::string out;
  if (format == CloudFormat::kitti_bin) {
    out.reserve(cloud.size() * 16);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point3& p = cloud.points[i];
      to_le(static_cast<float>(p.x), out);
      to_le(static_cast<float>(p.y), out);
      to_le(static_cast<float>(p.z), out);
      to_le(cloud.has_intensities() ? cloud.intensities[i] : 0.0f, out);
    }
  } else {
    char buf[160];
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point3& p = cloud.points[i];
      int n = 0;
      if (cloud.has_intensities()) {
        n = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.9g\n", p.x, p.y, p.z, static_cast<double>(cloud.intensities[i]));
      } else {
        n = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x, p.y, p.z);
      }
      out.append(buf, static_cast<std::size_t>(n));
    }
  }
  write_binary(path, out);
}

void write_cloud(const PointCloud& cloud, const std::string& path) {
  write_cloud(cloud, path, cloud_format_from_path(path));
}

std::string read_text_file(const std::string& path) {
  return read_binary(path);
}

void write_text_file(const std::string& path, const std::string& text) {
  write_binary(path, text);
}

namespace {

VerticalOrigin parse_vertical_origin(const std::string& s) {
  if (s == "wls") return VerticalOrigin::wls;
  if (s == "heuristic") return VerticalOrigin::heuristic;
  throw FormatError("unknown vertical_origin '" + s + "'");
}

HorizontalOrigin parse_horizontal_origin(const std::string& s) {
  if (s == "search") return HorizontalOrigin::search;
  if (s == "heuristic") return HorizontalOrigin::heuristic;
  if (s == "invalid") return HorizontalOrigin::invalid;
  throw FormatError("unknown horizontal_origin '" + s + "'");
}

json beams_to_json(const std::vector<BeamIntrinsics>& beams) {
  json arr = json::array();
  for (const BeamIntrinsics& b : beams) {
    json j;
    j["phi_rad"] = b.phi;
    j["oy_m"] = b.oy;
    j["ox_m"] = b.ox;
    j["theta_off_rad"] = b.theta_off;
    j["H"] = b.H;
    j["vertical_origin"] = to_string(b.vertical_origin);
    j["horizontal_origin"] = to_string(b.horizontal_origin);
    if (b.points > 0) j["points"] = b.points;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<BeamIntrinsics> beams_from_json(const json& arr) {
  if (!arr.is_array()) throw FormatError("\"beams\" must be an array");
  std::vector<BeamIntrinsics> beams;
  for (const json& j : arr) {
    BeamIntrinsics b;
    b.phi = j.at("phi_rad").get<double>();
    b.oy = j.at("oy_m").get<double>();
    b.ox = j.at("ox_m").get<double>();
    b.theta_off = j.at("theta_off_rad").get<double>();
    b.H = j.at("H").get<long>();
    b.vertical_origin = parse_vertical_origin(j.value("vertical_origin", std::string("wls")));
    b.horizontal_origin = parse_horizontal_origin(j.value("horizontal_origin", std::string(b.H > 0 ? "search" : "invalid")));
    b.points = j.value("points", std::size_t{0});
    beams.push_back(b);
  }
  return beams;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string("unexpected JSON content: ") + e.what());
  }
}

}  // namespace

std::string intrinsics_to_json(const SensorIntrinsics& s) {
  json j;
  j["epsilon_m"] = s.epsilon;
  j["beams"] = beams_to_json(s.beams);
  return j.dump(2) + "\n";
}

SensorIntrinsics intrinsics_from_json(const std::string& text) {
  const json j = parse_json(text);
  return guarded([&] {
    SensorIntrinsics s;
    s.epsilon = j.at("epsilon_m").get<double>();
    s.beams = beams_from_json(j.at("beams"));
    return s;
  });
}

void write_intrinsics(const SensorIntrinsics& s, const std::string& path) {
  write_text_file(path, intrinsics_to_json(s));
}

SensorIntrinsics read_intrinsics(const std::string& path) {
  return intrinsics_from_json(read_text_file(path));
}

std::string encode_range_image(const RangeImage& image) {
  if (image.ranges.size() != image.width * image.height) throw ConfigError("range image buffer does not match its dimensions");
  if (image.width > std::numeric_limits<std::uint32_t>::max() || image.height > std::numeric_limits<std::uint32_t>::max())
    throw ConfigError("range image too large for the file format");
  std::string out = "ALRI";
  out.push_back(static_cast<char>(0x01));
  to_le(static_cast<std::uint32_t>(image.width), out);
  to_le(static_cast<std::uint32_t>(image.height), out);
  out.reserve(out.size() + image.ranges.size() * 4);
  for (double r : image.ranges) to_le(static_cast<float>(r), out);
  return out;
}

RangeImage decode_range_image(const std::string& bytes) {
  constexpr std::size_t kHeader = 13;
  if (bytes.size() < kHeader || bytes.compare(0, 4, "ALRI") != 0) throw FormatError("not an ALRI range image");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (p[4] != 0x01) throw UnsupportedVersionError("unsupported ALRI version " + std::to_string(p[4]));
  const auto width = from_le<std::uint32_t>(p + 5);
  const auto height = from_le<std::uint32_t>(p + 9);
  const std::uint64_t cells = static_cast<std::uint64_t>(width) * height;
  if (bytes.size() != kHeader + cells * 4) {
    throw FormatError("ALRI payload size mismatch: expected " + std::to_string(kHeader + cells * 4) + " bytes, got " +
                      std::to_string(bytes.size()));
  }
  RangeImage img(width, height);
  for (std::uint64_t i = 0; i < cells; ++i) img.ranges[i] = from_le<float>(p + kHeader + 4 * i);
  return img;
}

void write_range_image(const RangeImage& image, const std::string& path) {
  write_binary(path, encode_range_image(image));
}

RangeImage read_range_image(const std::string& path) {
  return decode_range_image(read_binary(path));
}

std::string metrics_to_json(const MetricReport& m) {
  json j;
  auto num = [](double v) -> json {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
  };
  j["cd_m"] = num(m.cd);
  j["psnr_db"] = num(m.psnr);
  j["se"] = num(m.se);
  return j.dump();
}

MetricReport metrics_from_json(const std::string& text) {
  const json j = parse_json(text);
  return guarded([&] {
    auto num = [](const json& v) {
      if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
      if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw FormatError("unexpected metric value '" + s + "'");
      }
      return v.get<double>();
    };
    MetricReport m;
    m.cd = num(j.at("cd_m"));
    m.psnr = num(j.at("psnr_db"));
    m.se = num(j.at("se"));
    return m;
  });
}

std::string sensor_spec_to_json(const SensorSpec& spec) {
  json j;
  j["epsilon_m"] = spec.intrinsics().epsilon;
  j["beams"] = beams_to_json(spec.beams);
  j["quantization_m"] = spec.quantization_step;
  j["dropout"] = spec.dropout;
  j["seed"] = spec.seed;
  j["scene"] = to_string(spec.scene);
  j["range_min_m"] = spec.range_min;
  j["range_max_m"] = spec.range_max;
  j["shuffle"] = spec.shuffle;
  if (!spec.sparse_beams.empty()) {
    json arr = json::array();
    for (const SparseBeam& s : spec.sparse_beams) arr.push_back({{"beam", s.beam}, {"points", s.points}});
    j["sparse_beams"] = arr;
  }
  return j.dump(2) + "\n";
}

SensorSpec sensor_spec_from_json(const std::string& text) {
  const json j = parse_json(text);
  return guarded([&] {
    SensorSpec s;
    s.beams = beams_from_json(j.at("beams"));
    s.quantization_step = j.value("quantization_m", 0.0);
    s.dropout = j.value("dropout", 0.0);
    s.seed = j.value("seed", std::uint64_t{1});
    const std::string scene = j.value("scene", std::string("uniform"));
    if (scene == "uniform") {
      s.scene = SceneKind::uniform;
    } else if (scene == "terrain") {
      s.scene = SceneKind::terrain;
    } else {
      throw FormatError("unknown scene '" + scene + "'");
    }
    s.range_min = j.value("range_min_m", 3.0);
    s.range_max = j.value("range_max_m", 80.0);
    s.shuffle = j.value("shuffle", false);
    if (j.contains("sparse_beams")) {
      for (const json& e : j.at("sparse_beams")) s.sparse_beams.push_back({e.at("beam").get<std::size_t>(), e.at("points").get<std::size_t>()});
    }
    s.validate();
    return s;
  });
}

}  // namespace alri
