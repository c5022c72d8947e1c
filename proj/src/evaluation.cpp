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
#include <cstdio>
#include <numbers>

namespace planecal {

namespace {

std::string shade_by_depth(double depth, double depth_min, double depth_max) {
  double t = 0.5;
  if (depth_max > depth_min + 1e-12) {
    t = std::clamp((depth - depth_min) / (depth_max - depth_min), 0.0, 1.0);
  }
  // Near = blue, far = red.
  const int r = static_cast<int>(std::lround(32 + t * (208 - 32)));
  const int g = 96;
  const int b = static_cast<int>(std::lround(192 + t * (48 - 192)));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

void append_number(std::string& out, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  out += buf;
}

}  // namespace

LineReprojReport line_reprojection_error(const std::vector<FramePair>& frames,
                                         const RigidTransform& lidar_to_camera,
                                         const CameraIntrinsics& intrinsics) {
  std::vector<const FramePair*> ordered;
  ordered.reserve(frames.size());
  for (const FramePair& f : frames) {
    ordered.push_back(&f);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const FramePair* a, const FramePair* b) { return a->id < b->id; });

  LineReprojReport report;
  double global_sum = 0.0;
  const Mat3 rotation = lidar_to_camera.rotation();

  for (const FramePair* f : ordered) {
    FrameReprojStats frame_stats;
    frame_stats.id = f->id;
    double frame_sum = 0.0;

    for (EdgeLabel label : kAllEdgeLabels) {
      const LabeledLine3* line = f->lidar_edges.find(label);
      if (line == nullptr || line->points.empty()) {
        continue;
      }
      const Line2& image_line = f->camera.lines_2d[static_cast<int>(label)];
      EdgeReprojStats edge_stats;
      edge_stats.label = label;
      double edge_sum = 0.0;
      for (const Vec3& q : line->points) {
        const Vec3 cam = rotation * q + lidar_to_camera.translation;
        if (cam.z() <= 1e-9) {
          ++report.excluded_points;
          continue;
        }
        const Pixel p = project_camera_point(intrinsics, cam);
        edge_sum += point_line_distance_2d(p, image_line);
        ++edge_stats.points;
      }
      if (edge_stats.points > 0) {
        edge_stats.mean_px = edge_sum / edge_stats.points;
        frame_stats.points += edge_stats.points;
        frame_sum += edge_sum;
        frame_stats.edges.push_back(edge_stats);
      }
    }

    if (frame_stats.points > 0) {
      frame_stats.mean_px = frame_sum / frame_stats.points;
      global_sum += frame_sum;
      report.total_points += frame_stats.points;
    }
    report.frames.push_back(frame_stats);
  }

  if (report.total_points > 0) {
    report.global_mean_px = global_sum / report.total_points;
  }
  int frames_with_points = 0;
  double frame_mean_sum = 0.0;
  for (const FrameReprojStats& f : report.frames) {
    if (f.points > 0) {
      frame_mean_sum += f.mean_px;
      ++frames_with_points;
    }
  }
  if (frames_with_points > 0) {
    report.mean_of_frame_means_px = frame_mean_sum / frames_with_points;
  }
  return report;
}

StereoConsistencyReport stereo_consistency(const RigidTransform& left,
                                           const RigidTransform& right,
                                           const RigidTransform& reference) {
  const RigidTransform relative = left.compose(right.inverse());
  StereoConsistencyReport report;
  report.euler_error_deg =
      (relative.euler - reference.euler) * (180.0 / std::numbers::pi);
  report.translation_error_m = relative.translation - reference.translation;
  return report;
}

SvgDocument render_overlay(const FramePair& frame,
                           const RigidTransform& lidar_to_camera,
                           const CameraIntrinsics& intrinsics, int width,
                           int height) {
  SvgDocument doc;
  doc.width = width;
  doc.height = height;

  const double w = width, h = height;
  doc.border = {{0, 0, w, 0}, {w, 0, w, h}, {w, h, 0, h}, {0, h, 0, 0}};

  // The observed quad: each edge drawn between its two adjacent corners.
  for (EdgeLabel label : kAllEdgeLabels) {
    // Find the two corners this edge joins.
    std::vector<int> ends;
    for (CornerId c : kAllCornerIds) {
      const auto [a, b] = adjacent_edges(c);
      if (a == label || b == label) {
        ends.push_back(static_cast<int>(c));
      }
    }
    const Pixel p0 = frame.camera.corners_2d[ends[0]];
    const Pixel p1 = frame.camera.corners_2d[ends[1]];
    if ((p1 - p0).norm() < 1e-12) {
      continue;
    }
    doc.image_lines.push_back(
        {p0.x(), p0.y(), p1.x(), p1.y(), "#e0a000", 1.5});
  }

  const Mat3 rotation = lidar_to_camera.rotation();
  const auto in_canvas = [&](const Pixel& p) {
    return p.x() >= 0.0 && p.x() <= w && p.y() >= 0.0 && p.y() <= h;
  };

  double depth_min = 1e300, depth_max = -1e300;
  std::vector<std::pair<Pixel, double>> plane_px;
  for (const Vec3& p : frame.lidar_plane.inliers) {
    const Vec3 cam = rotation * p + lidar_to_camera.translation;
    if (cam.z() <= 1e-9) {
      continue;
    }
    const Pixel px = project_camera_point(intrinsics, cam);
    if (!in_canvas(px)) {
      continue;
    }
    plane_px.emplace_back(px, cam.z());
    depth_min = std::min(depth_min, cam.z());
    depth_max = std::max(depth_max, cam.z());
  }
  for (const auto& [px, depth] : plane_px) {
    doc.plane_points.push_back(
        {px.x(), px.y(), 1.0, shade_by_depth(depth, depth_min, depth_max)});
  }

  for (EdgeLabel label : kAllEdgeLabels) {
    const LabeledLine3* line = frame.lidar_edges.find(label);
    if (line == nullptr) {
      continue;
    }
    for (const Vec3& q : line->points) {
      const Vec3 cam = rotation * q + lidar_to_camera.translation;
      if (cam.z() <= 1e-9) {
        continue;
      }
      const Pixel px = project_camera_point(intrinsics, cam);
      if (!in_canvas(px)) {
        continue;
      }
      doc.edge_points.push_back({px.x(), px.y(), 1.8, "#10a010"});
    }
  }
  return doc;
}

std::string to_svg(const SvgDocument& doc) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(doc.width) + "\" height=\"" +
         std::to_string(doc.height) + "\" viewBox=\"0 0 " +
         std::to_string(doc.width) + " " + std::to_string(doc.height) +
         "\">\n";

  const auto emit_line = [&out](const SvgLine& l) {
    out += "  <line x1=\"";
    append_number(out, l.x1);
    out += "\" y1=\"";
    append_number(out, l.y1);
    out += "\" x2=\"";
    append_number(out, l.x2);
    out += "\" y2=\"";
    append_number(out, l.y2);
    out += "\" stroke=\"" + l.stroke + "\" stroke-width=\"";
    append_number(out, l.width);
    out += "\"/>\n";
  };
  const auto emit_circle = [&out](const SvgCircle& c) {
    out += "  <circle cx=\"";
    append_number(out, c.cx);
    out += "\" cy=\"";
    append_number(out, c.cy);
    out += "\" r=\"";
    append_number(out, c.r);
    out += "\" fill=\"" + c.fill + "\"/>\n";
  };

  for (const SvgLine& l : doc.border) {
    emit_line(l);
  }
  for (const SvgCircle& c : doc.plane_points) {
    emit_circle(c);
  }
  for (const SvgCircle& c : doc.edge_points) {
    emit_circle(c);
  }
  for (const SvgLine& l : doc.image_lines) {
    emit_line(l);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace planecal
