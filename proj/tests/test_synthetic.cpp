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

#include "planecal/synthetic.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <set>
#include <utility>
#include <vector>

#include <doctest.h>

#include "planecal/calib_solver.hpp"
#include "planecal/dataset_io.hpp"
#include "planecal/errors.hpp"

namespace planecal {
namespace {

constexpr std::array<std::pair<CornerId, CornerId>, 4> kEdgeCorners = {
    std::make_pair(CornerId::Left, CornerId::Top),      // TopLeft
    std::make_pair(CornerId::Top, CornerId::Right),     // TopRight
    std::make_pair(CornerId::Right, CornerId::Bottom),  // BottomRight
    std::make_pair(CornerId::Bottom, CornerId::Left),   // BottomLeft
};

TEST_CASE("make_default_scene builds a valid, well-conditioned scene") {
  const SyntheticScene scene = make_default_scene(5, 7);
  CHECK_NOTHROW(validate(scene));
  CHECK(scene.poses.size() == 5);
  CHECK(pose_normal_rank(scene) == 3);
  // Documented ground truth: (10, -5, 3) degrees, (0.1, -0.2, 0.05) m.
  const Vec3 deg = scene.gt_transform.euler * 180.0 / 3.141592653589793;
  CHECK((deg - Vec3(10, -5, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((scene.gt_transform.translation - Vec3(0.1, -0.2, 0.05)).norm() <
        1e-12);
  // Poses keep the target at working distance in front of the LIDAR.
  for (const RigidTransform& pose : scene.poses) {
    CHECK(pose.translation.z() > 1.0);
    CHECK(pose.translation.z() < 5.0);
  }
}

TEST_CASE("validate rejects inconsistent scenes") {
  SyntheticScene empty = make_default_scene(3, 1);
  empty.poses.clear();
  CHECK_THROWS_AS(validate(empty), DataError);

  SyntheticScene no_target = make_default_scene(3, 1);
  no_target.target.side_m = 0.0;
  CHECK_THROWS_AS(validate(no_target), DataError);

  SyntheticScene behind = make_default_scene(3, 1);
  behind.poses[1].translation = Vec3(0, 0, -5);
  CHECK_THROWS_AS(validate(behind), DataError);

  SyntheticScene too_far = make_default_scene(3, 1);
  too_far.poses[0].translation = Vec3(0, 0, 150);  // beyond LIDAR range
  CHECK_THROWS_AS(validate(too_far), DataError);
}

TEST_CASE("frame_seed is deterministic and spreads across frames and scenes") {
  CHECK(frame_seed(42, 0) == frame_seed(42, 0));
  std::set<std::uint64_t> seeds;
  for (FrameId id = 0; id < 32; ++id) {
    seeds.insert(frame_seed(42, id));
    seeds.insert(frame_seed(43, id));
  }
  CHECK(seeds.size() == 64);
}

TEST_CASE("noiseless LIDAR samples lie exactly on the posed board") {
  const SyntheticScene scene = make_default_scene(4, 11);
  const PassthroughBounds bounds = recommended_bounds(scene);
  const double h = scene.target.half_diagonal();

  for (std::size_t i = 0; i < scene.poses.size(); ++i) {
    const RigidTransform& pose = scene.poses[i];
    const PointCloud cloud =
        sample_target_lidar(scene, pose, frame_seed(scene.seed, i));
    CHECK(cloud.has_rings());
    REQUIRE(cloud.size() > 200);

    const PointCloud board = passthrough_filter(cloud, bounds);
    REQUIRE(board.size() > 100);
    const RigidTransform inv = pose.inverse();
    for (const LidarPoint& p : board.points) {
      const Vec3 q = transform_point(inv, p.position);
      CHECK(std::abs(q.z()) < 1e-9);                      // on the plane
      CHECK(std::abs(q.x()) + std::abs(q.y()) <= h + 1e-9);  // inside it
    }

    // The background wall produces returns outside the crop box.
    std::size_t outside = 0;
    for (const LidarPoint& p : cloud.points) {
      if (!bounds.contains(p.position)) {
        ++outside;
      }
    }
    CHECK(outside > 0);
    CHECK(outside + board.size() == cloud.size());
  }
}

TEST_CASE("recommended_bounds encloses every posed corner") {
  const SyntheticScene scene = make_default_scene(6, 3);
  const PassthroughBounds bounds = recommended_bounds(scene);
  for (const RigidTransform& pose : scene.poses) {
    for (const Vec3& corner : scene.target.corners()) {
      CHECK(bounds.contains(transform_point(pose, corner)));
    }
  }
}

TEST_CASE("sample_target_lidar is deterministic per seed") {
  SyntheticScene scene = make_default_scene(2, 5);
  scene.noise.lidar_range_sigma_m = 0.01;
  const PointCloud a = sample_target_lidar(scene, scene.poses[0], 77);
  const PointCloud b = sample_target_lidar(scene, scene.poses[0], 77);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.points[i].position == b.points[i].position);
    CHECK(a.points[i].ring == b.points[i].ring);
  }
  const PointCloud c = sample_target_lidar(scene, scene.poses[0], 78);
  bool any_different = a.size() != c.size();
  for (std::size_t i = 0; !any_different && i < a.size(); ++i) {
    any_different = a.points[i].position != c.points[i].position;
  }
  CHECK(any_different);
}

TEST_CASE("LIDAR range noise stays within sane bounds of the board plane") {
  SyntheticScene scene = make_default_scene(3, 9);
  scene.noise.lidar_range_sigma_m = 0.01;
  const PassthroughBounds bounds = recommended_bounds(scene);
  const PointCloud cloud =
      sample_target_lidar(scene, scene.poses[0], frame_seed(scene.seed, 0));
  const RigidTransform inv = scene.poses[0].inverse();
  double worst = 0.0;
  for (const LidarPoint& p : passthrough_filter(cloud, bounds).points) {
    worst = std::max(worst, std::abs(transform_point(inv, p.position).z()));
  }
  CHECK(worst > 1e-4);   // noise is actually applied
  CHECK(worst < 0.06);   // and bounded (6 sigma)
}

TEST_CASE("sample_target_lidar throws when the board misses the scan fan") {
  const SyntheticScene scene = make_default_scene(2, 13);
  RigidTransform overhead = scene.poses[0];
  overhead.translation = Vec3(0, -3, 2);  // far above the top ring elevation
  CHECK_THROWS_AS(sample_target_lidar(scene, overhead, 1), NoHitsError);
}

TEST_CASE("noiseless camera lines are exact corner projections") {
  const SyntheticScene scene = make_default_scene(4, 17);
  for (std::size_t i = 0; i < scene.poses.size(); ++i) {
    const RigidTransform& pose = scene.poses[i];
    const ImageLineSet lines =
        sample_target_camera(scene, pose, frame_seed(scene.seed, i));
    CHECK_NOTHROW(validate(lines));

    const RigidTransform target_to_camera = scene.gt_transform.compose(pose);
    std::array<Pixel, 4> px;
    for (CornerId id : kAllCornerIds) {
      px[static_cast<int>(id)] = project_point(
          scene.intrinsics, target_to_camera, scene.target.corner(id));
    }
    for (EdgeLabel label : kAllEdgeLabels) {
      const ImageLine* line = lines.find(label);
      REQUIRE(line != nullptr);
      const auto [a, b] = kEdgeCorners[static_cast<int>(label)];
      const Pixel& pa = px[static_cast<int>(a)];
      const Pixel& pb = px[static_cast<int>(b)];
      const bool forward =
          (line->p0 - pa).norm() < 1e-9 && (line->p1 - pb).norm() < 1e-9;
      const bool reverse =
          (line->p0 - pb).norm() < 1e-9 && (line->p1 - pa).norm() < 1e-9;
      CHECK((forward || reverse));
    }

    // Intersecting the lines recovers the corner pixels.
    const std::array<Pixel, 4> corners = lines_to_corners(lines);
    for (CornerId id : kAllCornerIds) {
      CHECK((corners[static_cast<int>(id)] - px[static_cast<int>(id)]).norm() <
            1e-9);
    }
  }
}

TEST_CASE("camera pixel noise is seeded and bounded") {
  SyntheticScene scene = make_default_scene(2, 23);
  scene.noise.pixel_sigma_px = 0.5;
  const ImageLineSet a = sample_target_camera(scene, scene.poses[0], 5);
  const ImageLineSet b = sample_target_camera(scene, scene.poses[0], 5);
  REQUIRE(a.lines.size() == b.lines.size());
  for (std::size_t i = 0; i < a.lines.size(); ++i) {
    CHECK(a.lines[i].p0 == b.lines[i].p0);
    CHECK(a.lines[i].p1 == b.lines[i].p1);
  }

  SyntheticScene clean = scene;
  clean.noise.pixel_sigma_px = 0.0;
  const ImageLineSet exact = sample_target_camera(clean, scene.poses[0], 5);
  double worst = 0.0;
  for (EdgeLabel label : kAllEdgeLabels) {
    const ImageLine* noisy_line = a.find(label);
    const ImageLine* exact_line = exact.find(label);
    REQUIRE(noisy_line != nullptr);
    REQUIRE(exact_line != nullptr);
    worst = std::max(worst, (noisy_line->p0 - exact_line->p0).norm());
    worst = std::max(worst, (noisy_line->p1 - exact_line->p1).norm());
  }
  CHECK(worst > 1e-3);  // noise applied
  CHECK(worst < 3.0);   // 6-sigma envelope on the endpoint offset
}

TEST_CASE("sample_target_camera rejects poses behind the camera") {
  const SyntheticScene scene = make_default_scene(2, 29);
  RigidTransform behind = scene.poses[0];
  behind.translation = Vec3(0, 0, -2);
  CHECK_THROWS_AS(sample_target_camera(scene, behind, 1), BehindCameraError);
}

TEST_CASE("pose_normal_rank flags degenerate pose sets") {
  SyntheticScene scene = make_default_scene(4, 31);
  CHECK(pose_normal_rank(scene) == 3);
  for (RigidTransform& pose : scene.poses) {
    pose.euler = scene.poses[0].euler;  // identical orientations
  }
  CHECK(pose_normal_rank(scene) == 1);
}

TEST_CASE("generate_frames numbers frames and is bitwise deterministic") {
  SyntheticScene scene = make_default_scene(3, 37);
  scene.noise.lidar_range_sigma_m = 0.01;
  scene.noise.pixel_sigma_px = 0.5;
  const std::vector<SyntheticFrame> a = generate_frames(scene);
  const std::vector<SyntheticFrame> b = generate_frames(scene);
  REQUIRE(a.size() == 3);
  REQUIRE(b.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == static_cast<FrameId>(i));
    REQUIRE(a[i].cloud.size() == b[i].cloud.size());
    for (std::size_t k = 0; k < a[i].cloud.size(); ++k) {
      CHECK(a[i].cloud.points[k].position == b[i].cloud.points[k].position);
    }
    REQUIRE(a[i].image_lines.lines.size() == b[i].image_lines.lines.size());
    for (std::size_t k = 0; k < a[i].image_lines.lines.size(); ++k) {
      CHECK(a[i].image_lines.lines[k].p0 == b[i].image_lines.lines[k].p0);
      CHECK(a[i].image_lines.lines[k].p1 == b[i].image_lines.lines[k].p1);
    }
  }
}

TEST_CASE("extracted features of a noiseless scene are exact at ground truth") {
  const SyntheticScene scene = make_default_scene(5, 41);
  const std::vector<SyntheticFrame> generated = generate_frames(scene);

  LidarExtractionConfig config;
  config.bounds = recommended_bounds(scene);

  std::vector<FramePair> frames;
  for (const SyntheticFrame& frame : generated) {
    FramePair pair;
    pair.id = frame.id;
    const LidarFrame lidar = extract_lidar_features(
        frame.cloud, config, frame_seed(scene.seed, frame.id));
    pair.lidar_plane = lidar.plane;
    pair.lidar_edges = lidar.edges;
    pair.camera = build_camera_frame(frame.image_lines, scene.target,
                                     scene.intrinsics);
    frames.push_back(pair);
  }

  // Both costs vanish at the true transform.
  CHECK(cost_p1(scene.gt_transform, frames) < 1e-18);
  CHECK(cost_p2(scene.gt_transform, frames) < 1e-18);

  // Extracted boundary-line directions match the posed board edges.
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const RigidTransform& pose = scene.poses[i];
    for (EdgeLabel label : kAllEdgeLabels) {
      const LabeledLine3* line = frames[i].lidar_edges.find(label);
      REQUIRE(line != nullptr);
      const auto [a, b] = kEdgeCorners[static_cast<int>(label)];
      const Vec3 truth = (transform_point(pose, scene.target.corner(b)) -
                          transform_point(pose, scene.target.corner(a)))
                             .normalized();
      CHECK(std::abs(std::abs(line->line.direction.dot(truth)) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("generate_dataset round-trips exactly through CSV") {
  const SyntheticScene scene = make_default_scene(2, 43);
  const std::vector<SyntheticFrame> frames = generate_frames(scene);
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "planecal_test_csv_dataset";
  std::filesystem::remove_all(dir);

  const std::string manifest_path = generate_dataset(scene, dir.string());
  const Manifest manifest = read_manifest(manifest_path);
  REQUIRE(manifest.frames.size() == 2);
  REQUIRE(manifest.ground_truth.has_value());
  CHECK(manifest.ground_truth->euler == scene.gt_transform.euler);
  CHECK(manifest.ground_truth->translation == scene.gt_transform.translation);
  REQUIRE(manifest.passthrough_bounds.has_value());
  CHECK(manifest.intrinsics.fx == scene.intrinsics.fx);
  CHECK(manifest.target.side_m == scene.target.side_m);

  for (std::size_t i = 0; i < manifest.frames.size(); ++i) {
    const PointCloud cloud = read_cloud(manifest.frames[i].cloud_path);
    REQUIRE(cloud.size() == frames[i].cloud.size());
    for (std::size_t k = 0; k < cloud.size(); ++k) {
      CHECK(cloud.points[k].position == frames[i].cloud.points[k].position);
      CHECK(cloud.points[k].ring == frames[i].cloud.points[k].ring);
    }
    const ImageLineSet lines =
        read_image_lines(manifest.frames[i].image_features_path);
    REQUIRE(lines.lines.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(lines.lines[k].label == frames[i].image_lines.lines[k].label);
      CHECK(lines.lines[k].p0 == frames[i].image_lines.lines[k].p0);
      CHECK(lines.lines[k].p1 == frames[i].image_lines.lines[k].p1);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("generate_dataset binary clouds are byte-stable") {
  const SyntheticScene scene = make_default_scene(2, 47);
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "planecal_test_bin_dataset";
  std::filesystem::remove_all(dir);
  const std::string manifest_path =
      generate_dataset(scene, dir.string(), "binary");
  const Manifest manifest = read_manifest(manifest_path);
  const std::vector<SyntheticFrame> frames = generate_frames(scene);
  const PointCloud cloud = read_cloud(manifest.frames[0].cloud_path);
  REQUIRE(cloud.size() == frames[0].cloud.size());
  // float32 storage: positions match to single precision.
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    CHECK((cloud.points[k].position - frames[0].cloud.points[k].position)
              .norm() < 1e-5);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("generate_dataset rejects unknown cloud formats") {
  const SyntheticScene scene = make_default_scene(2, 53);
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "planecal_test_badfmt";
  CHECK_THROWS_AS(generate_dataset(scene, dir.string(), "parquet"),
                  DataError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace planecal
