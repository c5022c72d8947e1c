// Copyright 2026 the planecal authors
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

#include "planecal/dataset_io.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "planecal/errors.hpp"

namespace planecal {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr char kCloudMagic[8] = {'P', 'L', 'C', 'L', 'O', 'U', 'D', '1'};

/// Shortest representation that parses back to the same double.
std::string format_double(double value) {
  std::array<char, 32> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(),
                                       value);
  if (ec != std::errc()) {
    throw DataError("failed to format a floating point value");
  }
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text, const std::string& context) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError(context + ": cannot parse number '" + std::string(text) +
                    "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) {
    throw DataError("cannot open '" + path + "' for writing");
  }
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) {
    throw DataError("cannot open '" + path + "' for reading");
  }
  return in;
}

json vec3_to_json(const Vec3& v) {
  return json::array({v.x(), v.y(), v.z()});
}

Vec3 vec3_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) {
    throw DataError(context + ": expected an array of 3 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Pixel pixel_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 2) {
    throw DataError(context + ": expected an array of 2 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json intrinsics_to_json(const CameraIntrinsics& k) {
  return json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx},
              {"cy", k.cy}, {"skew", k.skew}};
}

CameraIntrinsics intrinsics_from_json(const json& j) {
  CameraIntrinsics k;
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.skew = j.value("skew", 0.0);
  if (k.fx <= 0.0 || k.fy <= 0.0) {
    throw DataError("intrinsics: focal lengths must be positive");
  }
  return k;
}

std::string frame_file_name(const char* stem, FrameId id, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03lld.%s", stem,
                static_cast<long long>(id), ext);
  return buf;
}

template <typename Fn>
auto with_json_errors(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

}  // namespace

void write_cloud_csv(const std::string& path, const PointCloud& cloud) {
  bool with_intensity = !cloud.empty();
  for (const LidarPoint& p : cloud.points) {
    with_intensity = with_intensity && p.intensity.has_value();
  }
  std::ofstream out = open_out(path, std::ios::out);
  out << (with_intensity ? "x,y,z,ring,intensity\n" : "x,y,z,ring\n");
  for (const LidarPoint& p : cloud.points) {
    out << format_double(p.position.x()) << ',' << format_double(p.position.y())
        << ',' << format_double(p.position.z()) << ',' << p.ring;
    if (with_intensity) {
      out << ',' << format_double(*p.intensity);
    }
    out << '\n';
  }
  if (!out) {
    throw DataError("failed while writing '" + path + "'");
  }
}

PointCloud read_cloud_csv(const std::string& path) {
  std::ifstream in = open_in(path, std::ios::in);
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("'" + path + "': empty cloud file");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  const bool with_intensity = line == "x,y,z,ring,intensity";
  if (!with_intensity && line != "x,y,z,ring") {
    throw DataError("'" + path + "': unexpected header '" + line + "'");
  }

  PointCloud cloud;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const auto fields = split(line, ',');
    const std::size_t expected = with_intensity ? 5 : 4;
    const std::string context = "'" + path + "' line " + std::to_string(line_no);
    if (fields.size() != expected) {
      throw DataError(context + ": expected " + std::to_string(expected) +
                      " fields");
    }
    LidarPoint p;
    p.position = Vec3(parse_double(fields[0], context),
                      parse_double(fields[1], context),
                      parse_double(fields[2], context));
    p.ring = static_cast<int>(std::lround(parse_double(fields[3], context)));
    if (with_intensity) {
      p.intensity = parse_double(fields[4], context);
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_cloud_binary(const std::string& path, const PointCloud& cloud) {
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  out.write(kCloudMagic, sizeof(kCloudMagic));
  const std::uint64_t count = cloud.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const LidarPoint& p : cloud.points) {
    const float rec[4] = {static_cast<float>(p.position.x()),
                          static_cast<float>(p.position.y()),
                          static_cast<float>(p.position.z()),
                          static_cast<float>(p.ring)};
    out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
  }
  if (!out) {
    throw DataError("failed while writing '" + path + "'");
  }
}

PointCloud read_cloud_binary(const std::string& path) {
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCloudMagic, sizeof(magic)) != 0) {
    throw DataError("'" + path + "': not a binary cloud file");
  }
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in) {
    throw DataError("'" + path + "': truncated header");
  }
  PointCloud cloud;
  cloud.points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    float rec[4];
    in.read(reinterpret_cast<char*>(rec), sizeof(rec));
    if (!in) {
      throw DataError("'" + path + "': truncated at point " +
                      std::to_string(i));
    }
    LidarPoint p;
    p.position = Vec3(rec[0], rec[1], rec[2]);
    p.ring = static_cast<int>(std::lround(rec[3]));
    cloud.points.push_back(p);
  }
  return cloud;
}

PointCloud read_cloud(const std::string& path) {
  {
    std::ifstream probe = open_in(path, std::ios::in | std::ios::binary);
    char magic[8] = {};
    probe.read(magic, sizeof(magic));
    if (probe && std::memcmp(magic, kCloudMagic, sizeof(magic)) == 0) {
      return read_cloud_binary(path);
    }
  }
  return read_cloud_csv(path);
}

void write_image_lines(const std::string& path, const ImageLineSet& lines) {
  json j;
  j["lines"] = json::array();
  for (const ImageLine& l : lines.lines) {
    j["lines"].push_back(json{{"label", to_string(l.label)},
                              {"p0", json::array({l.p0.x(), l.p0.y()})},
                              {"p1", json::array({l.p1.x(), l.p1.y()})}});
  }
  save_json(path, j);
}

ImageLineSet read_image_lines(const std::string& path) {
  const json j = load_json(path);
  return with_json_errors(path, [&]() -> ImageLineSet {
    const json& entries = j.at("lines");
    if (!entries.is_array()) {
      throw DataError("'" + path + "': \"lines\" must be an array");
    }
    std::size_t labeled = 0;
    for (const json& e : entries) {
      labeled += e.contains("label") ? 1 : 0;
    }
    if (labeled == entries.size()) {
      ImageLineSet out;
      for (const json& e : entries) {
        ImageLine line;
        line.label = edge_label_from_string(e.at("label").get<std::string>());
        line.p0 = pixel_from_json(e.at("p0"), path);
        line.p1 = pixel_from_json(e.at("p1"), path);
        out.lines.push_back(line);
      }
      return out;
    }
    if (labeled != 0) {
      throw DataError("'" + path +
                      "': mix of labeled and unlabeled segments");
    }
    // No labels: assign them from the quad geometry.
    std::vector<std::pair<Pixel, Pixel>> segments;
    for (const json& e : entries) {
      segments.emplace_back(pixel_from_json(e.at("p0"), path),
                            pixel_from_json(e.at("p1"), path));
    }
    return label_image_lines(segments);
  });
}

void write_manifest(const std::string& path, const Manifest& manifest) {
  json j;
  j["frames"] = json::array();
  for (const ManifestFrame& f : manifest.frames) {
    j["frames"].push_back(json{{"id", f.id},
                               {"cloud", f.cloud_path},
                               {"image_features", f.image_features_path}});
  }
  j["intrinsics"] = intrinsics_to_json(manifest.intrinsics);
  j["target"] = json{{"side_m", manifest.target.side_m}};
  if (manifest.ground_truth) {
    j["ground_truth"] = transform_to_json(*manifest.ground_truth);
  }
  if (manifest.passthrough_bounds) {
    j["passthrough_bounds"] =
        json{{"min", vec3_to_json(manifest.passthrough_bounds->min)},
             {"max", vec3_to_json(manifest.passthrough_bounds->max)}};
  }
  if (manifest.image_size) {
    j["image_size"] =
        json::array({manifest.image_size->first, manifest.image_size->second});
  }
  save_json(path, j);
}

Manifest read_manifest(const std::string& path) {
  const json j = load_json(path);
  return with_json_errors(path, [&]() -> Manifest {
    Manifest manifest;
    const fs::path base = fs::path(path).parent_path();
    const auto resolve = [&](const std::string& p) {
      const fs::path fp(p);
      return fp.is_absolute() ? fp.string() : (base / fp).string();
    };
    for (const json& e : j.at("frames")) {
      ManifestFrame frame;
      frame.id = e.at("id").get<FrameId>();
      frame.cloud_path = resolve(e.at("cloud").get<std::string>());
      frame.image_features_path =
          resolve(e.at("image_features").get<std::string>());
      manifest.frames.push_back(frame);
    }
    manifest.intrinsics = intrinsics_from_json(j.at("intrinsics"));
    manifest.target.side_m = j.at("target").at("side_m").get<double>();
    if (manifest.target.side_m <= 0.0) {
      throw DataError("'" + path + "': target side must be positive");
    }
    if (j.contains("ground_truth")) {
      manifest.ground_truth = transform_from_json(j.at("ground_truth"));
    }
    if (j.contains("passthrough_bounds")) {
      PassthroughBounds bounds;
      bounds.min = vec3_from_json(j.at("passthrough_bounds").at("min"), path);
      bounds.max = vec3_from_json(j.at("passthrough_bounds").at("max"), path);
      manifest.passthrough_bounds = bounds;
    }
    if (j.contains("image_size")) {
      const json& s = j.at("image_size");
      if (!s.is_array() || s.size() != 2) {
        throw DataError("'" + path + "': image_size must be [width, height]");
      }
      manifest.image_size = {s[0].get<int>(), s[1].get<int>()};
    }
    return manifest;
  });
}

json transform_to_json(const RigidTransform& transform) {
  json j;
  j["euler_convention"] = kEulerConvention;
  j["euler_zyx_rad"] = json::array(
      {transform.euler.z(), transform.euler.y(), transform.euler.x()});
  j["translation_m"] = vec3_to_json(transform.translation);
  const Mat4 m = transform.matrix();
  json flat = json::array();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      flat.push_back(m(r, c));
    }
  }
  j["matrix_4x4"] = flat;
  return j;
}

RigidTransform transform_from_json(const json& j) {
  if (j.contains("euler_zyx_rad") && j.contains("translation_m")) {
    const json& e = j.at("euler_zyx_rad");
    if (!e.is_array() || e.size() != 3) {
      throw DataError("transform: euler_zyx_rad must hold 3 numbers");
    }
    RigidTransform t;
    t.euler = Vec3(e[2].get<double>(), e[1].get<double>(), e[0].get<double>());
    t.translation = vec3_from_json(j.at("translation_m"), "transform");
    return t;
  }
  if (j.contains("matrix_4x4")) {
    const json& flat = j.at("matrix_4x4");
    if (!flat.is_array() || flat.size() != 16) {
      throw DataError("transform: matrix_4x4 must hold 16 numbers");
    }
    Mat4 m;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        m(r, c) = flat[4 * r + c].get<double>();
      }
    }
    return RigidTransform::from_matrix(m);
  }
  throw DataError(
      "transform: need euler_zyx_rad + translation_m or matrix_4x4");
}

void write_transform(const std::string& path, const RigidTransform& transform) {
  save_json(path, transform_to_json(transform));
}

RigidTransform read_transform(const std::string& path) {
  const json j = load_json(path);
  return with_json_errors(path,
                          [&]() { return transform_from_json(j); });
}

json calibration_result_to_json(const CalibrationResult& result) {
  json j = transform_to_json(result.transform);
  j["status"] = result.status;
  j["stage2_failed"] = result.stage2_failed;
  const auto stage_json = [](const StageReport& s) {
    return json{{"cost", s.final_cost},
                {"initial_cost", s.initial_cost},
                {"iters", s.iterations},
                {"status", to_string(s.status)}};
  };
  j["stage1"] = stage_json(result.stage1);
  j["stage1"]["transform"] = transform_to_json(result.stage1_transform);
  if (result.stage2) {
    j["stage2"] = stage_json(*result.stage2);
  }
  j["per_frame"] = json::array();
  for (const FrameResidualStats& f : result.per_frame) {
    j["per_frame"].push_back(json{{"id", f.id},
                                  {"plane_points", f.plane_points},
                                  {"edge_points", f.edge_points},
                                  {"plane_rms_m", f.plane_rms_m},
                                  {"backplane_rms_m", f.backplane_rms_m}});
  }
  return j;
}

void write_calibration_result(const std::string& path,
                              const CalibrationResult& result) {
  save_json(path, calibration_result_to_json(result));
}

SceneConfig read_scene_config(const std::string& path) {
  const json j = load_json(path);
  return with_json_errors(path, [&]() -> SceneConfig {
    SceneConfig config;
    const int n_views = j.value("n_views", 0);
    const auto seed = j.value("seed", std::uint64_t{0});
    NoiseModel noise;
    if (j.contains("noise")) {
      noise.lidar_range_sigma_m =
          j.at("noise").value("lidar_range_sigma_m", 0.0);
      noise.pixel_sigma_px = j.at("noise").value("pixel_sigma_px", 0.0);
    }
    if (n_views <= 0 && !j.contains("poses")) {
      throw DataError("'" + path + "': need n_views > 0 or explicit poses");
    }
    config.scene = make_default_scene(std::max(n_views, 1), seed, noise);
    if (j.contains("poses")) {
      config.scene.poses.clear();
      for (const json& p : j.at("poses")) {
        config.scene.poses.push_back(transform_from_json(p));
      }
    }
    if (j.contains("ground_truth")) {
      config.scene.gt_transform = transform_from_json(j.at("ground_truth"));
    }
    if (j.contains("intrinsics")) {
      config.scene.intrinsics = intrinsics_from_json(j.at("intrinsics"));
    }
    if (j.contains("target")) {
      config.scene.target.side_m = j.at("target").at("side_m").get<double>();
    }
    if (j.contains("lidar")) {
      const json& l = j.at("lidar");
      if (l.contains("ring_elevations_deg")) {
        config.scene.lidar.ring_elevations_deg =
            l.at("ring_elevations_deg").get<std::vector<double>>();
      }
      config.scene.lidar.azimuth_step_deg =
          l.value("azimuth_step_deg", config.scene.lidar.azimuth_step_deg);
      config.scene.lidar.max_abs_azimuth_deg = l.value(
          "max_abs_azimuth_deg", config.scene.lidar.max_abs_azimuth_deg);
      config.scene.lidar.max_range_m =
          l.value("max_range_m", config.scene.lidar.max_range_m);
    }
    config.scene.wall_offset_m =
        j.value("wall_offset_m", config.scene.wall_offset_m);
    config.scene.window_margin_deg =
        j.value("window_margin_deg", config.scene.window_margin_deg);
    config.scene.image_width = j.value("image_width", config.scene.image_width);
    config.scene.image_height =
        j.value("image_height", config.scene.image_height);
    config.cloud_format = j.value("cloud_format", std::string("csv"));
    if (config.cloud_format != "csv" && config.cloud_format != "binary") {
      throw DataError("'" + path + "': cloud_format must be csv or binary");
    }
    return config;
  });
}

json load_json(const std::string& path) {
  std::ifstream in = open_in(path, std::ios::in);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

void save_json(const std::string& path, const json& j) {
  std::ofstream out = open_out(path, std::ios::out);
  out << j.dump(2) << '\n';
  if (!out) {
    throw DataError("failed while writing '" + path + "'");
  }
}

// Defined here rather than with the samplers: writing the dataset is pure
// serialization.
std::string generate_dataset(const SyntheticScene& scene,
                             const std::string& out_dir,
                             const std::string& cloud_format) {
  if (cloud_format != "csv" && cloud_format != "binary") {
    throw DataError("cloud format must be csv or binary");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw DataError("cannot create directory '" + out_dir +
                    "': " + ec.message());
  }

  const std::vector<SyntheticFrame> frames = generate_frames(scene);
  Manifest manifest;
  manifest.intrinsics = scene.intrinsics;
  manifest.target = scene.target;
  manifest.ground_truth = scene.gt_transform;
  manifest.passthrough_bounds = recommended_bounds(scene);
  manifest.image_size = {scene.image_width, scene.image_height};

  for (const SyntheticFrame& frame : frames) {
    const std::string cloud_name =
        frame_file_name("cloud", frame.id, cloud_format == "csv" ? "csv" : "plc");
    const std::string lines_name = frame_file_name("lines", frame.id, "json");
    const std::string cloud_path = (fs::path(out_dir) / cloud_name).string();
    if (cloud_format == "csv") {
      write_cloud_csv(cloud_path, frame.cloud);
    } else {
      write_cloud_binary(cloud_path, frame.cloud);
    }
    write_image_lines((fs::path(out_dir) / lines_name).string(),
                      frame.image_lines);
    manifest.frames.push_back({frame.id, cloud_name, lines_name});
  }

  const std::string manifest_path =
      (fs::path(out_dir) / "manifest.json").string();
  write_manifest(manifest_path, manifest);
  return manifest_path;
}

}  // namespace planecal
