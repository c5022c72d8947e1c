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

#include <cstdint>
#include <string>
#include <vector>

#include "planecal/camera_features.hpp"
#include "planecal/geometry.hpp"
#include "planecal/lidar_features.hpp"
#include "planecal/types.hpp"

namespace planecal {

/// Ring-structured scanning LIDAR model. Rays leave the origin with
/// direction (cos(el)sin(az), -sin(el), cos(el)cos(az)): the sensor frame is
/// camera-style (x right, y down, z forward) and elevation grows upward.
struct LidarModel {
  std::vector<double> ring_elevations_deg;
  double azimuth_step_deg = 0.2;
  double max_abs_azimuth_deg = 120.0;  // horizontal field of view (half)
  double max_range_m = 100.0;

  /// 32 uniformly spaced rings from -25 to +15 degrees.
  static LidarModel default_32ring();
};

struct NoiseModel {
  double lidar_range_sigma_m = 0.0;
  double pixel_sigma_px = 0.0;
};

/// Ground-truth scene: a posed square target observed by a LIDAR and a
/// camera whose relative transform is known exactly. Everything downstream
/// is verified against this.
struct SyntheticScene {
  RigidTransform gt_transform;  // LIDAR -> camera
  CameraIntrinsics intrinsics;
  TargetModel target;
  std::vector<RigidTransform> poses;  // target -> LIDAR, one per frame
  LidarModel lidar;
  NoiseModel noise;
  std::uint64_t seed = 0;
  /// A parallel infinite wall this far behind the target provides the depth
  /// gaps the boundary detector relies on; <= 0 disables it.
  double wall_offset_m = 3.0;
  /// Rays are generated inside the target's angular silhouette plus this
  /// margin; keeps clouds target-centric like a cropped real capture.
  double window_margin_deg = 1.5;
  int image_width = 1280;
  int image_height = 720;
};

/// Throws DataError when a pose puts the target behind the camera, outside
/// the LIDAR range, or the scene configuration is inconsistent.
void validate(const SyntheticScene& scene);

/// Deterministic per-frame RNG seed derived from the scene seed.
std::uint64_t frame_seed(std::uint64_t scene_seed, FrameId id);

/// Simulates one LIDAR sweep over the posed target: ring/azimuth grid rays
/// hitting the board (plus the background wall), and for every ring the
/// exact points where the ring's elevation cone crosses each board edge, so
/// that noise-free boundary points are exactly collinear. Range noise is
/// applied along each ray. Throws NoHitsError when no ray reaches the board.
PointCloud sample_target_lidar(const SyntheticScene& scene,
                               const RigidTransform& pose,
                               std::uint64_t rng_seed);

/// Projects the posed target's corners through gt_transform and the pinhole
/// model and emits the four labeled edge segments, with independent Gaussian
/// pixel noise on each endpoint. Throws BehindCameraError when a corner has
/// non-positive depth.
ImageLineSet sample_target_camera(const SyntheticScene& scene,
                                  const RigidTransform& pose,
                                  std::uint64_t rng_seed);

/// Rank of the stacked target-plane normals in the camera frame; lets tests
/// build observability-passing (rank 3) and failing (rank < 3) scenes on
/// purpose.
int pose_normal_rank(const SyntheticScene& scene);

/// Axis-aligned crop box (LIDAR frame) that contains every posed target
/// with padding but excludes the background wall.
PassthroughBounds recommended_bounds(const SyntheticScene& scene);

/// One generated frame, in memory.
struct SyntheticFrame {
  FrameId id = 0;
  PointCloud cloud;
  ImageLineSet image_lines;
};

/// All frames of the scene, ids 0..N-1, each with its derived seed.
std::vector<SyntheticFrame> generate_frames(const SyntheticScene& scene);

/// Writes the scene to disk: one cloud file and one image-feature JSON per
/// frame plus a manifest binding them with the intrinsics, target size,
/// crop box, and ground truth. `cloud_format` is "csv" or "binary".
/// Returns the manifest path.
std::string generate_dataset(const SyntheticScene& scene,
                             const std::string& out_dir,
                             const std::string& cloud_format = "csv");

/// Deterministic multi-view scene around the default ground truth
/// (phi, theta, psi) = (10, -5, 3) degrees, t = (0.1, -0.2, 0.05) m:
/// n_views poses at 2.2-3.2 m with tilt axes swept around the view
/// direction so the plane normals span rank 3.
SyntheticScene make_default_scene(int n_views, std::uint64_t seed,
                                  const NoiseModel& noise = {});

}  // namespace planecal
