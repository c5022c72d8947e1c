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

#include <string>
#include <vector>

#include "planecal/calib_solver.hpp"
#include "planecal/geometry.hpp"
#include "planecal/types.hpp"

namespace planecal {

struct EdgeReprojStats {
  EdgeLabel label = EdgeLabel::TopLeft;
  int points = 0;
  double mean_px = 0.0;
};

struct FrameReprojStats {
  FrameId id = 0;
  int points = 0;
  double mean_px = 0.0;  // point-weighted mean over this frame's edges
  std::vector<EdgeReprojStats> edges;
};

/// Distances between projected LIDAR boundary points and the matching image
/// lines. Two global averages are emitted because the weighting choice is a
/// convention: `global_mean_px` averages over every edge point (the headline
/// number), `mean_of_frame_means_px` averages the per-frame means.
struct LineReprojReport {
  std::vector<FrameReprojStats> frames;
  int total_points = 0;
  int excluded_points = 0;  // points behind the camera, skipped and counted
  double global_mean_px = 0.0;
  double mean_of_frame_means_px = 0.0;
};

/// Projects every boundary-line member point with the candidate transform
/// and measures its pixel distance to the same-label image line. Frames are
/// processed in id order, so the report is invariant to input ordering.
LineReprojReport line_reprojection_error(const std::vector<FramePair>& frames,
                                         const RigidTransform& lidar_to_camera,
                                         const CameraIntrinsics& intrinsics);

/// Component-wise discrepancy between the relative transform of two
/// single-camera calibrations, left o inverse(right), and a reference
/// stereo extrinsic. Euler errors are reported in degrees as
/// (alpha, beta, gamma) = rotations about (x, y, z); all errors signed.
struct StereoConsistencyReport {
  Vec3 euler_error_deg = Vec3::Zero();
  Vec3 translation_error_m = Vec3::Zero();
};

StereoConsistencyReport stereo_consistency(const RigidTransform& left,
                                           const RigidTransform& right,
                                           const RigidTransform& reference);

/// Minimal SVG model; kept structured so tests can assert on geometry
/// before serialization.
struct SvgLine {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  std::string stroke = "#000000";
  double width = 1.0;
};

struct SvgCircle {
  double cx = 0, cy = 0, r = 1.0;
  std::string fill = "#000000";
};

struct SvgDocument {
  int width = 0;
  int height = 0;
  std::vector<SvgLine> border;       // image boundary rectangle
  std::vector<SvgLine> image_lines;  // input edge segments (the quad)
  std::vector<SvgCircle> plane_points;  // projected planar points, depth-shaded
  std::vector<SvgCircle> edge_points;   // projected boundary-line points
};

/// Projects the frame's LIDAR features with the candidate transform over
/// the image rectangle. Points behind the camera or outside the canvas are
/// dropped; zero-length line segments are not emitted.
SvgDocument render_overlay(const FramePair& frame,
                           const RigidTransform& lidar_to_camera,
                           const CameraIntrinsics& intrinsics, int width,
                           int height);

/// Deterministic SVG 1.1 serialization (fixed 6-decimal coordinates).
std::string to_svg(const SvgDocument& doc);

}  // namespace planecal
