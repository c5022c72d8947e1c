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

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>

namespace planecal {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// 2D pixel position (u right, v down).
using Pixel = Eigen::Vector2d;

/// Homogeneous 3D point; last coordinate 0 denotes a direction at infinity.
using HomPoint3 = Eigen::Vector4d;

/// Homogeneous 2D image point, pixel units.
using HomPoint2 = Eigen::Vector3d;

/// Boundary edges of the square target as seen with the board held
/// diamond-wise. The same labels are assigned independently in the LIDAR
/// and in the image; cross-modal association is by label.
enum class EdgeLabel : int {
  TopLeft = 0,
  TopRight = 1,
  BottomRight = 2,
  BottomLeft = 3,
};

inline constexpr std::array<EdgeLabel, 4> kAllEdgeLabels = {
    EdgeLabel::TopLeft, EdgeLabel::TopRight, EdgeLabel::BottomRight,
    EdgeLabel::BottomLeft};

std::string to_string(EdgeLabel label);
EdgeLabel edge_label_from_string(const std::string& name);

/// Corners of the diamond-held target, ordered by the convention used for
/// PnP correspondences. Corner k is the intersection of its two adjacent
/// edges (see adjacent_edges()).
enum class CornerId : int {
  Top = 0,
  Right = 1,
  Bottom = 2,
  Left = 3,
};

inline constexpr std::array<CornerId, 4> kAllCornerIds = {
    CornerId::Top, CornerId::Right, CornerId::Bottom, CornerId::Left};

/// Edges meeting at a corner: Top = TopLeft x TopRight, Right = TopRight x
/// BottomRight, Bottom = BottomRight x BottomLeft, Left = BottomLeft x TopLeft.
inline constexpr std::pair<EdgeLabel, EdgeLabel> adjacent_edges(CornerId c) {
  switch (c) {
    case CornerId::Top:
      return {EdgeLabel::TopLeft, EdgeLabel::TopRight};
    case CornerId::Right:
      return {EdgeLabel::TopRight, EdgeLabel::BottomRight};
    case CornerId::Bottom:
      return {EdgeLabel::BottomRight, EdgeLabel::BottomLeft};
    case CornerId::Left:
    default:
      return {EdgeLabel::BottomLeft, EdgeLabel::TopLeft};
  }
}

using FrameId = std::int64_t;

}  // namespace planecal
