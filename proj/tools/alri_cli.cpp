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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "alri/errors.hpp"
#include "alri/io.hpp"
#include "alri/metrics.hpp"
#include "alri/pipeline.hpp"
#include "alri/projection.hpp"
#include "alri/simulator.hpp"
#include "alri/toggles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kGeneric = 1, kConfig = 2, kIo = 3, kFormat = 4, kEstimation = 5 };

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const alri::ConfigError*>(&e) != nullptr) return kConfig;
  if (dynamic_cast<const alri::IoError*>(&e) != nullptr) return kIo;
  if (dynamic_cast<const alri::FormatError*>(&e) != nullptr) return kFormat;
  if (dynamic_cast<const alri::EstimationError*>(&e) != nullptr) return kEstimation;
  if (dynamic_cast<const alri::QuantizationError*>(&e) != nullptr) return kEstimation;
  if (dynamic_cast<const alri::FitError*>(&e) != nullptr) return kEstimation;
  return kGeneric;
}

// Accepts a preset name (e0..e7) or a comma list such as
// "continuity=off,conflicts=on,vertical=on,horizontal=off".
alri::FeatureToggles parse_toggles(const std::string& text) {
  if (text.empty()) return {};
  if (text.find('=') == std::string::npos) return alri::FeatureToggles::preset(text);
  alri::FeatureToggles t;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw alri::ConfigError("bad toggle '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    bool on = false;
    if (val == "on" || val == "1" || val == "true") {
      on = true;
    } else if (val != "off" && val != "0" && val != "false") {
      throw alri::ConfigError("bad toggle value '" + val + "'");
    }
    if (key == "continuity") {
      t.hough_continuity = on;
    } else if (key == "conflicts") {
      t.conflict_resolution = on;
    } else if (key == "vertical") {
      t.vertical_heuristics = on;
    } else if (key == "horizontal") {
      t.horizontal_heuristics = on;
    } else {
      throw alri::ConfigError("unknown toggle '" + key + "'");
    }
  }
  return t;
}

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const long v = std::stol(item);
      if (v <= 0) throw alri::ConfigError("width must be positive: " + item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw alri::ConfigError("bad width '" + item + "'");
    }
  }
  if (out.empty()) throw alri::ConfigError("no widths given");
  return out;
}

json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

void emit_report(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    alri::write_text_file(path, j.dump(2) + "\n");
  }
}

json trace_to_json(const alri::VerticalTrace& t) {
  json j;
  j["iteration"] = t.iteration;
  j["peak"] = {{"row", t.peak.row}, {"col", t.peak.col}, {"votes", t.peak.votes}, {"phi", t.peak.phi}, {"oy", t.peak.oy}};
  j["fitted"] = t.fitted;
  if (t.fitted) {
    j["origin"] = alri::to_string(t.origin);
    j["phi"] = t.phi;
    j["oy"] = t.oy;
    j["uncertainty"] = t.uncertainty;
    j["members"] = t.members;
  }
  j["decision"] = t.decision;
  if (!t.reason.empty()) j["reason"] = t.reason;
  if (!t.invalidated.empty()) j["invalidated"] = t.invalidated;
  if (t.recovered > 0) j["recovered"] = t.recovered;
  return j;
}

struct EstimateArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string toggles;
  std::string trace;
  std::string hough_pgm;
  unsigned jobs = 1;
};

void estimate_one(const std::string& input, const std::string& output, const EstimateArgs& a, bool multi) {
  const alri::PointCloud cloud = alri::read_cloud(input);
  alri::EstimationOptions opts;
  std::ofstream trace;
  std::string stem = fs::path(input).stem().string();
  if (!a.trace.empty()) {
    const std::string path = multi ? (fs::path(a.trace) / (stem + ".jsonl")).string() : a.trace;
    trace.open(path, std::ios::trunc);
    if (!trace) throw alri::IoError("cannot open " + path + " for writing");
    opts.vertical.trace = [&trace](const alri::VerticalTrace& t) { trace << trace_to_json(t).dump() << "\n"; };
  }
  if (!a.hough_pgm.empty()) {
    opts.vertical.hough_pgm_path = multi ? (fs::path(a.hough_pgm) / (stem + ".pgm")).string() : a.hough_pgm;
  }
  const alri::SensorIntrinsics s = alri::estimate_intrinsics(cloud, parse_toggles(a.toggles), opts);
  alri::write_intrinsics(s, output);
  if (!multi) std::cerr << alri::intrinsics_summary(s);
}

int run_estimate(const EstimateArgs& a) {
  const alri::FeatureToggles check = parse_toggles(a.toggles);
  (void)check;
  if (a.inputs.size() == 1) {
    estimate_one(a.inputs.front(), a.output, a, false);
    return kOk;
  }
  // Several inputs: --output (and --trace / --hough-pgm) name directories.
  fs::create_directories(a.output);
  if (!a.trace.empty()) fs::create_directories(a.trace);
  if (!a.hough_pgm.empty()) fs::create_directories(a.hough_pgm);
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  int worst = kOk;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= a.inputs.size()) return;
      const std::string& in = a.inputs[i];
      const std::string out = (fs::path(a.output) / (fs::path(in).stem().string() + ".json")).string();
      try {
        estimate_one(in, out, a, true);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        std::cerr << "alri: " << in << ": " << e.what() << "\n";
        worst = std::max(worst, exit_code_for(e));
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(a.inputs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return worst;
}

json projection_json(const alri::ProjectionReport& r, const alri::RangeImage& img) {
  return {{"width", img.width},
          {"height", img.height},
          {"projected", r.projected},
          {"collisions", r.collisions},
          {"out_of_bounds", r.out_of_bounds},
          {"occupancy", r.occupancy}};
}

json metric_json(const alri::MetricReport& m) {
  return {{"cd_m", number(m.cd)}, {"psnr_db", number(m.psnr)}, {"se", number(m.se)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lossless range images for spinning LiDAR point clouds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "alri 0.1.0");

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Estimate sensor intrinsics from a point cloud");
  c_est->add_option("--input", est.inputs, "Point cloud(s) (.bin or .csv)")->required();
  c_est->add_option("--output", est.output, "Intrinsics JSON (a directory when several inputs are given)")->required();
  c_est->add_option("--toggles", est.toggles, "Preset e0..e7 or continuity=,conflicts=,vertical=,horizontal= list");
  c_est->add_option("--trace", est.trace, "Write per-iteration scanline decisions as JSON lines");
  c_est->add_option("--hough-pgm", est.hough_pgm, "Dump the vote accumulator as PGM");
  c_est->add_option("--jobs", est.jobs, "Parallel pipelines over multiple inputs")->check(CLI::PositiveNumber);

  std::string in, out, intr, report;
  auto* c_proj = app.add_subcommand("project", "Project a point cloud into an ALRI range image");
  c_proj->add_option("--input", in)->required();
  c_proj->add_option("--intrinsics", intr)->required();
  c_proj->add_option("--output", out)->required();
  c_proj->add_option("--report", report, "Projection report JSON (stdout when omitted)");

  auto* c_unproj = app.add_subcommand("unproject", "Reconstruct a point cloud from an ALRI range image");
  c_unproj->add_option("--input", in)->required();
  c_unproj->add_option("--intrinsics", intr)->required();
  c_unproj->add_option("--output", out)->required();

  double max_range = alri::kKittiMaxRange;
  auto* c_rt = app.add_subcommand("roundtrip", "Project, unproject and compare with the input");
  c_rt->add_option("--input", in)->required();
  c_rt->add_option("--intrinsics", intr)->required();
  c_rt->add_option("--output", out, "Optional reconstructed cloud");
  c_rt->add_option("--report", report);
  c_rt->add_option("--max-range", max_range, "PSNR peak range in meters")->check(CLI::PositiveNumber);

  std::string spec_path, preset, labels, spec_out;
  std::uint64_t seed = 1;
  double dropout = 0.0;
  auto* c_sim = app.add_subcommand("simulate", "Synthesize a point cloud from a sensor spec");
  auto* o_spec = c_sim->add_option("--spec", spec_path, "Sensor spec JSON");
  auto* o_preset = c_sim->add_option("--preset", preset, "kitti or durlar")->check(CLI::IsMember({"kitti", "durlar"}));
  o_spec->excludes(o_preset);
  c_sim->add_option("--seed", seed, "Seed for --preset");
  c_sim->add_option("--dropout", dropout, "Dropout for --preset")->check(CLI::Range(0.0, 1.0));
  c_sim->add_option("--output", out)->required();
  c_sim->add_option("--labels", labels, "Per-point ground-truth labels JSON");
  c_sim->add_option("--spec-out", spec_out, "Write the effective spec JSON");
  c_sim->add_option("--truth", intr, "Write the ground-truth intrinsics JSON");

  std::string path_a, path_b;
  auto* c_eval = app.add_subcommand("evaluate", "CD, PSNR and SE between two clouds");
  c_eval->add_option("--a", path_a, "Reference cloud")->required();
  c_eval->add_option("--b", path_b, "Reconstructed cloud")->required();
  c_eval->add_option("--max-range", max_range)->check(CLI::PositiveNumber);
  c_eval->add_option("--report", report);

  std::string widths = "4000,8000,16000,32000";
  std::size_t height = 64;
  std::string table_format = "json";
  auto* c_pbea = app.add_subcommand("compare-pbea", "Compare against uniform-elevation projection");
  c_pbea->add_option("--input", in)->required();
  c_pbea->add_option("--intrinsics", intr)->required();
  c_pbea->add_option("--widths", widths, "Comma-separated image widths");
  c_pbea->add_option("--height", height)->check(CLI::PositiveNumber);
  c_pbea->add_option("--max-range", max_range)->check(CLI::PositiveNumber);
  c_pbea->add_option("--format", table_format)->check(CLI::IsMember({"json", "csv"}));
  c_pbea->add_option("--report", report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*c_est) return run_estimate(est);

    if (*c_proj) {
      const alri::SensorIntrinsics s = alri::read_intrinsics(intr);
      const alri::ProjectionResult p = alri::project(alri::read_cloud(in), s);
      alri::write_range_image(p.image, out);
      emit_report(projection_json(p.report, p.image), report);
      return kOk;
    }

    if (*c_unproj) {
      const alri::SensorIntrinsics s = alri::read_intrinsics(intr);
      alri::write_cloud(alri::unproject(alri::read_range_image(in), s), out);
      return kOk;
    }

    if (*c_rt) {
      const alri::SensorIntrinsics s = alri::read_intrinsics(intr);
      const alri::PointCloud cloud = alri::drop_unusable(alri::read_cloud(in));
      const alri::ProjectionResult p = alri::project(cloud, s);
      const alri::PointCloud back = alri::unproject(p.image, s);
      if (!out.empty()) alri::write_cloud(back, out);
      json j = projection_json(p.report, p.image);
      j["input_points"] = cloud.size();
      j["output_points"] = back.size();
      j.update(metric_json(alri::compare_clouds(cloud, back, max_range)));
      emit_report(j, report);
      return kOk;
    }

    if (*c_sim) {
      alri::SensorSpec spec;
      if (!spec_path.empty()) {
        spec = alri::sensor_spec_from_json(alri::read_text_file(spec_path));
      } else if (preset == "kitti") {
        spec = alri::kitti_like(seed, dropout);
      } else if (preset == "durlar") {
        spec = alri::durlar_like(seed, dropout);
      } else {
        throw alri::ConfigError("simulate needs --spec or --preset");
      }
      const alri::LabeledCloud lc = alri::synthesize(spec);
      alri::write_cloud(lc.cloud, out);
      if (!spec_out.empty()) alri::write_text_file(spec_out, alri::sensor_spec_to_json(spec));
      if (!intr.empty()) alri::write_intrinsics(spec.intrinsics(), intr);
      if (!labels.empty()) {
        json j = json::array();
        for (const alri::PointLabel& l : lc.labels) j.push_back({{"beam", l.beam}, {"sample", l.sample}, {"range_m", l.range}});
        alri::write_text_file(labels, j.dump() + "\n");
      }
      return kOk;
    }

    if (*c_eval) {
      const alri::PointCloud a = alri::read_cloud(path_a);
      const alri::PointCloud b = alri::read_cloud(path_b);
      emit_report(metric_json(alri::compare_clouds(a, b, max_range)), report);
      return kOk;
    }

    if (*c_pbea) {
      const alri::SensorIntrinsics s = alri::read_intrinsics(intr);
      const alri::PointCloud cloud = alri::drop_unusable(alri::read_cloud(in));
      const std::vector<std::size_t> ws = parse_widths(widths);
      double phi_min = 0.0, phi_max = 0.0;
      bool first = true;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double phi = alri::to_spherical(cloud.points[i]).phi;
        if (first || phi < phi_min) phi_min = phi;
        if (first || phi > phi_max) phi_max = phi;
        first = false;
      }
      json rows = json::array();
      {
        const alri::ProjectionResult p = alri::project(cloud, s);
        const alri::PointCloud back = alri::unproject(p.image, s);
        json row = metric_json(alri::compare_clouds(cloud, back, max_range));
        row["method"] = "alice";
        row["width"] = p.image.width;
        row["height"] = p.image.height;
        rows.push_back(row);
      }
      for (std::size_t w : ws) {
        const alri::ProjectionResult p = alri::project_pbea(cloud, w, height, phi_min, phi_max);
        const alri::PointCloud back = alri::unproject_pbea(p.image, phi_min, phi_max);
        json row = metric_json(alri::compare_clouds(cloud, back, max_range));
        row["method"] = "pbea";
        row["width"] = w;
        row["height"] = height;
        rows.push_back(row);
      }
      if (table_format == "json") {
        emit_report(rows, report);
      } else {
        std::ostringstream csv;
        csv << "method,width,height,cd_m,psnr_db,se\n";
        for (const json& r : rows) {
          auto field = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
          csv << r["method"].get<std::string>() << "," << r["width"] << "," << r["height"] << "," << field(r["cd_m"]) << ","
              << field(r["psnr_db"]) << "," << field(r["se"]) << "\n";
        }
        if (report.empty()) {
          std::cout << csv.str();
        } else {
          alri::write_text_file(report, csv.str());
        }
      }
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "alri: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kGeneric;
}
