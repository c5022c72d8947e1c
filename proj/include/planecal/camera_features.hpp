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

#include <array>
#include <utility>
#include <vector>

#include "planecal/geometry.hpp"
#include "planecal/types.hpp"

namespace planecal {

/// A labeled 2D segment along one target edge, in pixel coordinates.
struct ImageLine {
  EdgeLabel label = EdgeLabel::TopLeft;
  Pixel p0 = Pixel::Zero();
  Pixel p1 = Pixel::Zero();

  /// Infinite image line through the two endpoints.
  Line2 line() const { return Line2::through(p0, p1); }
};

/// The four labeled edge segments of the target in one image.
struct ImageLineSet {
  std::vector<ImageLine> lines;

  const ImageLine* find(EdgeLabel label) const;
};

/// Throws if the set does not contain exactly one segment per label or if
/// any pair of adjacent edges is (near-)parallel.
void validate(const ImageLineSet& lines);

/// Square planar target held diamond-wise. The canonical target frame is
/// centered on the board with z = 0 on its surface and y pointing down, so
/// the Top corner sits at (0, -side/sqrt(2), 0).
struct TargetModel {
  double side_m = 0.0;

  /// Distance from the board center to each corner.
  double half_diagonal() const;

  /// Canonical corner position in the target frame.
  Vec3 corner(CornerId id) const;

  /// All four corners ordered Top, Right, Bottom, Left.
  std::array<Vec3, 4> corners() const;
};

/// Result of the planar pose solve: target-to-camera transform plus the
/// corner reprojection RMS in pixels.
struct PnpResult {
  RigidTransform pose;
  double rms_px = 0.0;
};

/// Per-image features of the target in the camera frame. Arrays indexed by
/// CornerId for corners and by EdgeLabel for lines/planes.
struct CameraFrame {
  /// Target plane in the camera frame, normal oriented toward the camera.
  Plane plane;
  /// Corner pixels ordered Top, Right, Bottom, Left.
  std::array<Pixel, 4> corners_2d = {Pixel::Zero(), Pixel::Zero(),
                                     Pixel::Zero(), Pixel::Zero()};
  /// Corner positions in the camera frame, same order.
  std::array<Vec3, 4> corners_3d = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                                    Vec3::Zero()};
  /// Infinite image lines indexed by EdgeLabel.
  std::array<Line2, 4> lines_2d = {};
  /// Back-projected planes through the camera center, indexed by EdgeLabel;
  /// distance is 0 by construction.
  std::array<Plane, 4> back_planes = {};
  /// Target-to-camera pose recovered by PnP (diagnostic).
  RigidTransform target_pose;
  /// Corner reprojection RMS of the refined pose (diagnostic).
  double pnp_rms_px = 0.0;
};

/// Intersects adjacent edge lines to recover the corner pixels, ordered
/// Top, Right, Bottom, Left. Throws ParallelAdjacentLinesError.
std::array<Pixel, 4> lines_to_corners(const ImageLineSet& lines);

/// Pose of the target in the camera frame from its four corner pixels:
/// homography from the 4 planar correspondences, closed-form decomposition
/// with the intrinsics, then Levenberg-Marquardt refinement of the corner
/// reprojection error. Throws DegenerateCornersError for (near-)collinear
/// corners and PnPDivergedError when the refined RMS exceeds
/// residual_tol_px.
PnpResult solve_planar_pnp(const std::array<Pixel, 4>& corners_2d,
                           const TargetModel& model,
                           const CameraIntrinsics& intrinsics,
                           double residual_tol_px = 2.0);

/// Full per-image feature build: corners, PnP pose, target plane, and the
/// back-projected plane of each labeled edge line. Corner positions in the
/// camera frame come from intersecting the target plane with the two
/// adjacent back-projected planes.
CameraFrame build_camera_frame(const ImageLineSet& lines,
                               const TargetModel& model,
                               const CameraIntrinsics& intrinsics,
                               double residual_tol_px = 2.0);

/// Assigns edge labels to four unlabeled segments forming a diamond quad:
/// shared endpoints are clustered into corners, corners are ordered by
/// angle around their centroid with the topmost (smallest v) as Top, and
/// each segment is labeled by the corner pair it joins. Throws
/// EdgeLabelingError when the segments do not form a single quad.
ImageLineSet label_image_lines(
    const std::vector<std::pair<Pixel, Pixel>>& segments);

}  // namespace planecal
