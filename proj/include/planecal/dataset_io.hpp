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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "planecal/calib_solver.hpp"
#include "planecal/camera_features.hpp"
#include "planecal/geometry.hpp"
#include "planecal/lidar_features.hpp"
#include "planecal/synthetic.hpp"
#include "planecal/types.hpp"

namespace planecal {

/// One dataset frame: a point cloud file plus an image-feature file.
struct ManifestFrame {
  FrameId id = 0;
  std::string cloud_path;
  std::string image_features_path;
};

/// Dataset manifest binding frames, camera intrinsics, and the target model;
/// optionally the generating ground truth (for evaluation) and a crop box
/// applied before plane segmentation.
struct Manifest {
  std::vector<ManifestFrame> frames;
  CameraIntrinsics intrinsics;
  TargetModel target;
  std::optional<RigidTransform> ground_truth;
  std::optional<PassthroughBounds> passthrough_bounds;
  std::optional<std::pair<int, int>> image_size;  // width, height
};

/// Point-cloud text format: header `x,y,z,ring` (plus `,intensity` when
/// present), one point per line, shortest round-trip float formatting.
void write_cloud_csv(const std::string& path, const PointCloud& cloud);
PointCloud read_cloud_csv(const std::string& path);

/// Point-cloud binary format: magic "PLCLOUD1", little-endian uint64 count,
/// then per point four float32 values (x, y, z, ring).
void write_cloud_binary(const std::string& path, const PointCloud& cloud);
PointCloud read_cloud_binary(const std::string& path);

/// Reads either format, sniffing the binary magic.
PointCloud read_cloud(const std::string& path);

/// Image-feature JSON: {"lines": [{"label": "TopLeft", "p0": [u,v],
/// "p1": [u,v]}, ...]}. Reading files whose entries carry no labels falls
/// back to geometric quad labeling.
void write_image_lines(const std::string& path, const ImageLineSet& lines);
ImageLineSet read_image_lines(const std::string& path);

void write_manifest(const std::string& path, const Manifest& manifest);
/// Frame paths in the returned manifest are resolved against the manifest's
/// directory.
Manifest read_manifest(const std::string& path);

/// Transform JSON fields: "euler_zyx_rad" = [psi, theta, phi] (the rotation
/// applied x-first), "translation_m", "matrix_4x4" (row major), and the
/// convention string.
nlohmann::json transform_to_json(const RigidTransform& transform);
RigidTransform transform_from_json(const nlohmann::json& j);
void write_transform(const std::string& path, const RigidTransform& transform);
RigidTransform read_transform(const std::string& path);

/// Calibration result JSON: the transform fields plus per-stage cost and
/// iteration reports, status, and per-frame residual statistics. The file is
/// also readable by read_transform.
nlohmann::json calibration_result_to_json(const CalibrationResult& result);
void write_calibration_result(const std::string& path,
                              const CalibrationResult& result);

/// Scene configuration for the simulator. Minimal form:
///   {"n_views": 5, "seed": 42}
/// which expands to the built-in multi-view scene; every generated field
/// (ground_truth, intrinsics, target, poses, lidar, noise, wall_offset_m,
/// window_margin_deg) can be overridden explicitly. "cloud_format" selects
/// "csv" (default) or "binary".
struct SceneConfig {
  SyntheticScene scene;
  std::string cloud_format = "csv";
};
SceneConfig read_scene_config(const std::string& path);

/// Parses a JSON file; throws DataError on IO or syntax problems.
nlohmann::json load_json(const std::string& path);
/// Writes JSON with 2-space indentation and a trailing newline.
void save_json(const std::string& path, const nlohmann::json& j);

}  // namespace planecal
