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

#include "planecal/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "planecal/errors.hpp"

namespace planecal {
namespace {

/// Frame with one labeled LIDAR line and a matching vertical image line
/// u = 100 under unit intrinsics (fx = fy = 1, cx = cy = 0): a camera-frame
/// point (x, y, 1) projects to pixel (x, y).
const CameraIntrinsics kUnitIntrinsics{1.0, 1.0, 0.0, 0.0, 0.0};

FramePair frame_with_points(FrameId id, EdgeLabel label,
                            const std::vector<Vec3>& points) {
  FramePair frame;
  frame.id = id;
  LabeledLine3 line;
  line.label = label;
  line.points = points;
  frame.lidar_edges.lines.push_back(line);
  ImageLine image_line;
  image_line.label = label;
  image_line.p0 = Pixel(100, 0);
  image_line.p1 = Pixel(100, 10);
  frame.camera.lines_2d[static_cast<int>(label)] = image_line.line();
  return frame;
}

TEST_CASE("line_reprojection_error measures pixel offsets to the edge line") {
  // Point (103, 5, 1) projects to pixel (103, 5): 3 px from the line u = 100.
  const FramePair frame = frame_with_points(0, EdgeLabel::TopLeft,
                                            {Vec3(103, 5, 1)});
  const LineReprojReport report = line_reprojection_error(
      {frame}, RigidTransform::identity(), kUnitIntrinsics);
  CHECK(report.total_points == 1);
  CHECK(report.excluded_points == 0);
  CHECK(report.global_mean_px == doctest::Approx(3.0));
  CHECK(report.mean_of_frame_means_px == doctest::Approx(3.0));
  REQUIRE(report.frames.size() == 1);
  CHECK(report.frames[0].mean_px == doctest::Approx(3.0));
  REQUIRE(report.frames[0].edges.size() == 1);
  CHECK(report.frames[0].edges[0].label == EdgeLabel::TopLeft);
  CHECK(report.frames[0].edges[0].points == 1);
  CHECK(report.frames[0].edges[0].mean_px == doctest::Approx(3.0));
}

TEST_CASE("global mean weights points; frame-mean average weights frames") {
  // Frame 0: one point at 1 px. Frame 1: three points at 5 px.
  const FramePair a = frame_with_points(0, EdgeLabel::TopLeft,
                                        {Vec3(101, 2, 1)});
  const FramePair b = frame_with_points(
      1, EdgeLabel::TopLeft,
      {Vec3(105, 1, 1), Vec3(105, 3, 1), Vec3(105, 7, 1)});
  const LineReprojReport report = line_reprojection_error(
      {a, b}, RigidTransform::identity(), kUnitIntrinsics);
  CHECK(report.total_points == 4);
  CHECK(report.global_mean_px == doctest::Approx(4.0));          // (1+5+5+5)/4
  CHECK(report.mean_of_frame_means_px == doctest::Approx(3.0));  // (1+5)/2
}

TEST_CASE("line_reprojection_error applies the candidate transform") {
  // Shift the point 2 px in +x via the transform's translation.
  const FramePair frame = frame_with_points(0, EdgeLabel::BottomLeft,
                                            {Vec3(103, 5, 1)});
  const RigidTransform shift{Vec3::Zero(), Vec3(2, 0, 0)};
  const LineReprojReport report =
      line_reprojection_error({frame}, shift, kUnitIntrinsics);
  CHECK(report.global_mean_px == doctest::Approx(5.0));
}

TEST_CASE("points behind the camera are excluded but counted") {
  const FramePair frame = frame_with_points(
      0, EdgeLabel::TopRight, {Vec3(103, 5, 1), Vec3(0, 0, -2)});
  const LineReprojReport report = line_reprojection_error(
      {frame}, RigidTransform::identity(), kUnitIntrinsics);
  CHECK(report.total_points == 1);
  CHECK(report.excluded_points == 1);
  CHECK(report.global_mean_px == doctest::Approx(3.0));
}

TEST_CASE("report is invariant to frame input order") {
  const FramePair a = frame_with_points(0, EdgeLabel::TopLeft,
                                        {Vec3(101, 2, 1)});
  const FramePair b = frame_with_points(
      1, EdgeLabel::TopRight, {Vec3(105, 1, 1), Vec3(105, 3, 1)});
  const LineReprojReport fwd = line_reprojection_error(
      {a, b}, RigidTransform::identity(), kUnitIntrinsics);
  const LineReprojReport rev = line_reprojection_error(
      {b, a}, RigidTransform::identity(), kUnitIntrinsics);
  CHECK(fwd.global_mean_px == rev.global_mean_px);
  REQUIRE(fwd.frames.size() == rev.frames.size());
  for (std::size_t i = 0; i < fwd.frames.size(); ++i) {
    CHECK(fwd.frames[i].id == rev.frames[i].id);
    CHECK(fwd.frames[i].mean_px == rev.frames[i].mean_px);
  }
}

TEST_CASE("each labeled LIDAR line is scored against its own image line") {
  // TopLeft point sits 3 px from u = 100; BottomRight points sit 5 px from
  // u = 115.  A third LIDAR line with no points must not contribute.
  FramePair frame = frame_with_points(0, EdgeLabel::TopLeft,
                                      {Vec3(103, 5, 1)});
  LabeledLine3 second;
  second.label = EdgeLabel::BottomRight;
  second.points = {Vec3(120, 5, 1), Vec3(120, 9, 1)};
  frame.lidar_edges.lines.push_back(second);
  frame.camera.lines_2d[static_cast<int>(EdgeLabel::BottomRight)] =
      Line2::through(Pixel(115, 0), Pixel(115, 10));
  LabeledLine3 pointless;
  pointless.label = EdgeLabel::TopRight;
  frame.lidar_edges.lines.push_back(pointless);
  const LineReprojReport report = line_reprojection_error(
      {frame}, RigidTransform::identity(), kUnitIntrinsics);
  CHECK(report.total_points == 3);
  CHECK(report.global_mean_px == doctest::Approx(13.0 / 3.0));
  REQUIRE(report.frames.size() == 1);
  REQUIRE(report.frames[0].edges.size() == 2);
  for (const EdgeReprojStats& edge : report.frames[0].edges) {
    if (edge.label == EdgeLabel::TopLeft) {
      CHECK(edge.points == 1);
      CHECK(edge.mean_px == doctest::Approx(3.0));
    } else {
      CHECK(edge.label == EdgeLabel::BottomRight);
      CHECK(edge.points == 2);
      CHECK(edge.mean_px == doctest::Approx(5.0));
    }
  }
}

TEST_CASE("stereo_consistency of a calibration against itself is zero") {
  const RigidTransform calib{Vec3(0.17, -0.09, 0.05), Vec3(0.1, -0.2, 0.05)};
  const StereoConsistencyReport report =
      stereo_consistency(calib, calib, RigidTransform::identity());
  // calib o inverse(calib) is the identity up to floating-point roundoff;
  // the angles recovered from it are at the 1e-15-degree scale.
  CHECK(report.euler_error_deg.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(report.translation_error_m.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stereo_consistency reports signed component errors") {
  // Left and right differ by a pure x-translation of 1 m; against an
  // identity reference the x error is the full meter, signed.
  const RigidTransform right{Vec3(0.2, -0.1, 0.3), Vec3(0.4, 0.1, -0.2)};
  RigidTransform left = right;
  left.translation += Vec3(1, 0, 0);
  const StereoConsistencyReport translated =
      stereo_consistency(left, right, RigidTransform::identity());
  CHECK(translated.euler_error_deg.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(translated.translation_error_m.x() == doctest::Approx(1.0));
  CHECK(translated.translation_error_m.y() == doctest::Approx(0.0));
  CHECK(translated.translation_error_m.z() == doctest::Approx(0.0));

  // A one-degree z-rotation between the calibrations shows up in gamma.
  const double one_deg = 3.141592653589793 / 180.0;
  const RigidTransform base{Vec3::Zero(), Vec3(0.2, 0, 0)};
  RigidTransform rotated = base;
  rotated.euler = Vec3(0, 0, one_deg);
  const StereoConsistencyReport turned =
      stereo_consistency(rotated, base, RigidTransform::identity());
  CHECK(turned.euler_error_deg.z() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(turned.euler_error_deg.x()) < 1e-9);
  CHECK(std::abs(turned.euler_error_deg.y()) < 1e-9);

  // The reference is subtracted: comparing against the true relative
  // transform zeroes the report.
  const StereoConsistencyReport zeroed =
      stereo_consistency(rotated, base, rotated.compose(base.inverse()));
  CHECK(zeroed.euler_error_deg.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(zeroed.translation_error_m.cwiseAbs().maxCoeff() < 1e-12);
}

FramePair overlay_frame() {
  FramePair frame;
  frame.id = 0;
  // Planar points 1 m ahead of the camera (unit intrinsics put pixel (x,y)
  // at camera (x,y,1)); canvas is 200x100.
  frame.lidar_plane.inliers = {Vec3(50, 40, 1), Vec3(120, 70, 1),
                               Vec3(190, 95, 1)};
  LabeledLine3 line;
  line.label = EdgeLabel::TopLeft;
  line.points = {Vec3(60, 20, 1), Vec3(80, 30, 1)};
  frame.lidar_edges.lines.push_back(line);
  ImageLine image_line;
  image_line.label = EdgeLabel::TopLeft;
  image_line.p0 = Pixel(55, 15);
  image_line.p1 = Pixel(85, 35);
  frame.camera.lines_2d[static_cast<int>(EdgeLabel::TopLeft)] =
      image_line.line();
  frame.camera.corners_2d = {Pixel(55, 15), Pixel(85, 35), Pixel(70, 60),
                             Pixel(40, 40)};
  return frame;
}

TEST_CASE("render_overlay projects features onto the canvas") {
  const FramePair frame = overlay_frame();
  const SvgDocument doc = render_overlay(
      frame, RigidTransform::identity(), kUnitIntrinsics, 200, 100);
  CHECK(doc.width == 200);
  CHECK(doc.height == 100);
  CHECK(doc.border.size() == 4);
  CHECK(doc.plane_points.size() == 3);
  CHECK(doc.edge_points.size() == 2);
  CHECK(!doc.image_lines.empty());
  // Projected circle centers land on the expected pixels.
  CHECK(doc.plane_points[0].cx == doctest::Approx(50.0));
  CHECK(doc.plane_points[0].cy == doctest::Approx(40.0));
  CHECK(doc.edge_points[0].cx == doctest::Approx(60.0));
  CHECK(doc.edge_points[0].cy == doctest::Approx(20.0));
}

TEST_CASE("render_overlay drops off-canvas and behind-camera points") {
  FramePair frame = overlay_frame();
  frame.lidar_plane.inliers.push_back(Vec3(500, 40, 1));   // off canvas
  frame.lidar_plane.inliers.push_back(Vec3(50, 40, -1));   // behind camera
  const SvgDocument doc = render_overlay(
      frame, RigidTransform::identity(), kUnitIntrinsics, 200, 100);
  CHECK(doc.plane_points.size() == 3);  // the two extras are dropped

  FramePair empty;
  empty.id = 1;
  const SvgDocument bare = render_overlay(
      empty, RigidTransform::identity(), kUnitIntrinsics, 64, 48);
  CHECK(bare.border.size() == 4);
  CHECK(bare.plane_points.empty());
  CHECK(bare.edge_points.empty());
  CHECK(bare.image_lines.empty());
}

TEST_CASE("to_svg is deterministic and uses fixed decimals") {
  const FramePair frame = overlay_frame();
  const SvgDocument doc = render_overlay(
      frame, RigidTransform::identity(), kUnitIntrinsics, 200, 100);
  const std::string svg = to_svg(doc);
  CHECK(svg == to_svg(doc));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("50.000000") != std::string::npos);  // fixed 6 decimals
  // Well-formed: every <line and <circle element closes.
  const auto count = [&](const std::string& needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = svg.find(needle, pos)) != std::string::npos) {
      ++n;
      pos += needle.size();
    }
    return n;
  };
  CHECK(count("<line") == doc.border.size() + doc.image_lines.size());
  CHECK(count("<circle") ==
        doc.plane_points.size() + doc.edge_points.size());
}

}  // namespace
}  // namespace planecal
