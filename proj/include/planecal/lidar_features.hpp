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
#include <optional>
#include <vector>

#include "planecal/geometry.hpp"
#include "planecal/types.hpp"

namespace planecal {

struct LidarPoint {
  Vec3 position = Vec3::Zero();  // meters, sensor frame
  int ring = -1;                 // scan-ring index; -1 = no ring structure
  std::optional<double> intensity;
};

struct PointCloud {
  std::vector<LidarPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_rings() const;
};

/// Axis-aligned crop box, meters.
struct PassthroughBounds {
  Vec3 min = Vec3::Constant(-1e9);
  Vec3 max = Vec3::Constant(1e9);

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() &&
           (p.array() <= max.array()).all();
  }
};

struct PlaneRansacConfig {
  double distance_threshold = 0.02;  // m
  int min_inliers = 100;
  int max_iterations = 1000;
  double confidence = 0.999;  // adaptive early-out target
};

struct LineRansacConfig {
  double distance_threshold = 0.02;  // m
  int min_points = 5;
  int max_iterations = 1000;
  double confidence = 0.999;
};

struct EdgeConfig {
  int neighbors_per_side = 1;
  double depth_gap_threshold = 0.3;  // m
};

struct BoundaryLineConfig {
  double plane_band = 0.05;  // keep edge points this close to the target plane
  LineRansacConfig ransac;
};

/// Target plane segmented from the filtered cloud.
struct PlaneSegmentation {
  Plane plane;                    // normal oriented toward the sensor origin
  std::vector<Vec3> inliers;      // the planar points feeding the solver
  Vec3 centroid = Vec3::Zero();
};

struct LabeledLine3 {
  EdgeLabel label = EdgeLabel::TopLeft;
  Line3 line;                  // direction oriented to z > 0 (ties: y, then x)
  std::vector<Vec3> points;    // member edge points
};

/// The four boundary lines of the target. fit_boundary_lines always returns
/// four; problems assembled by hand may carry fewer (distinct labels).
struct EdgeLines {
  std::vector<LabeledLine3> lines;

  const LabeledLine3* find(EdgeLabel label) const;
};

PointCloud passthrough_filter(const PointCloud& cloud,
                              const PassthroughBounds& bounds);

/// RANSAC plane segmentation, refit to the consensus set by least squares.
/// The reported inlier set is recomputed against the refit plane, so it is
/// exactly the distance-threshold set of the returned plane.
PlaneSegmentation segment_plane(const PointCloud& cloud,
                                const PlaneRansacConfig& config,
                                std::uint64_t seed);

/// Depth-discontinuity detector: keeps a point when the range difference to
/// any of its nearest same-ring azimuth neighbors exceeds the gap threshold.
/// Output is ordered by (ring, azimuth) regardless of input order.
PointCloud detect_edge_points(const PointCloud& cloud,
                              const EdgeConfig& config);

/// Band-filters edge points to the target plane, proposes four lines by
/// sequential RANSAC (fit, remove inliers, repeat), then refines jointly:
/// every band point is assigned to its nearest line when within threshold,
/// lines are refit to their members, and the loop runs to a fixed point.
/// Member sets are therefore disjoint and equal to the nearest-assignment
/// threshold sets of the reported lines. Lines are labeled
/// TopLeft/TopRight/BottomRight/BottomLeft from their placement around the
/// plane centroid.
EdgeLines fit_boundary_lines(const PointCloud& edge_cloud,
                             const Plane& target_plane,
                             const BoundaryLineConfig& config,
                             std::uint64_t seed);

/// In-plane basis used for edge labeling and shared with the camera-side
/// convention: `up` is the world up direction (-y) projected into the plane,
/// `right` completes it as seen from the sensor.
struct PlaneBasis {
  Vec3 right;
  Vec3 up;
};
PlaneBasis plane_basis(const Plane& plane);

/// Everything the calibration needs from one LIDAR frame.
struct LidarFrame {
  PlaneSegmentation plane;
  EdgeLines edges;
};

struct LidarExtractionConfig {
  std::optional<PassthroughBounds> bounds;
  PlaneRansacConfig plane_ransac;
  EdgeConfig edge;
  BoundaryLineConfig boundary;
};

/// Full per-frame pipeline: passthrough, plane segmentation, edge detection,
/// boundary-line fitting.
LidarFrame extract_lidar_features(const PointCloud& cloud,
                                  const LidarExtractionConfig& config,
                                  std::uint64_t seed);

}  // namespace planecal
