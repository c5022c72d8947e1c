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

#include "planecal/camera_features.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "planecal/errors.hpp"
#include "planecal/levenberg_marquardt.hpp"

namespace planecal {

namespace {

constexpr double kHugeResidual = 1e8;

/// Similarity transform moving points to centroid 0, mean distance sqrt(2).
Mat3 normalizing_transform(const std::array<Pixel, 4>& pts) {
  Pixel centroid = Pixel::Zero();
  for (const Pixel& p : pts) {
    centroid += p;
  }
  centroid /= 4.0;
  double mean_dist = 0.0;
  for (const Pixel& p : pts) {
    mean_dist += (p - centroid).norm();
  }
  mean_dist /= 4.0;
  if (mean_dist < 1e-12) {
    throw DegenerateCornersError("corner points coincide");
  }
  const double s = std::numbers::sqrt2 / mean_dist;
  Mat3 t = Mat3::Identity();
  t(0, 0) = s;
  t(1, 1) = s;
  t(0, 2) = -s * centroid.x();
  t(1, 2) = -s * centroid.y();
  return t;
}

void require_general_position(const std::array<Pixel, 4>& pts) {
  double max_dist2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      max_dist2 = std::max(max_dist2, (pts[i] - pts[j]).squaredNorm());
    }
  }
  if (max_dist2 < 1e-18) {
    throw DegenerateCornersError("corner points coincide");
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      for (int k = j + 1; k < 4; ++k) {
        const Pixel a = pts[j] - pts[i];
        const Pixel b = pts[k] - pts[i];
        const double twice_area = std::abs(a.x() * b.y() - a.y() * b.x());
        if (twice_area < 1e-9 * max_dist2) {
          throw DegenerateCornersError("three corners are collinear");
        }
      }
    }
  }
}

/// Homography mapping target-plane (x, y) to pixels, from 4 correspondences
/// via the normalized direct linear transform.
Mat3 dlt_homography(const std::array<Pixel, 4>& model_xy,
                    const std::array<Pixel, 4>& pixels) {
  const Mat3 t_model = normalizing_transform(model_xy);
  const Mat3 t_px = normalizing_transform(pixels);

  Eigen::Matrix<double, 8, 9> a = Eigen::Matrix<double, 8, 9>::Zero();
  for (int i = 0; i < 4; ++i) {
    const HomPoint2 xn = t_model * HomPoint2(model_xy[i].x(), model_xy[i].y(), 1.0);
    const HomPoint2 un = t_px * HomPoint2(pixels[i].x(), pixels[i].y(), 1.0);
    a.block<1, 3>(2 * i, 3) = -un.z() * xn.transpose();
    a.block<1, 3>(2 * i, 6) = un.y() * xn.transpose();
    a.block<1, 3>(2 * i + 1, 0) = un.z() * xn.transpose();
    a.block<1, 3>(2 * i + 1, 6) = -un.x() * xn.transpose();
  }

  const Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(
      a, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Mat3 homography = t_px.inverse() * hn * t_model;
  if (!homography.allFinite()) {
    throw DegenerateCornersError("homography estimation failed");
  }
  return homography;
}

Mat3 nearest_rotation(const Mat3& m) {
  const Eigen::JacobiSVD<Mat3> svd(m,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

}  // namespace

const ImageLine* ImageLineSet::find(EdgeLabel label) const {
  for (const ImageLine& l : lines) {
    if (l.label == label) {
      return &l;
    }
  }
  return nullptr;
}

void validate(const ImageLineSet& lines) {
  if (lines.lines.size() != 4) {
    throw DataError("image line set holds " +
                    std::to_string(lines.lines.size()) +
                    " segments, expected 4");
  }
  for (EdgeLabel label : kAllEdgeLabels) {
    int count = 0;
    for (const ImageLine& l : lines.lines) {
      if (l.label == label) {
        ++count;
      }
    }
    if (count != 1) {
      throw EdgeLabelingError("image line set has " + std::to_string(count) +
                              " segments labeled " + to_string(label));
    }
  }
  for (CornerId corner : kAllCornerIds) {
    const auto [la, lb] = adjacent_edges(corner);
    const Pixel da = lines.find(la)->p1 - lines.find(la)->p0;
    const Pixel db = lines.find(lb)->p1 - lines.find(lb)->p0;
    if (da.norm() < 1e-12 || db.norm() < 1e-12) {
      throw DegenerateLineError("zero-length segment labeled " +
                                to_string(da.norm() < 1e-12 ? la : lb));
    }
    const Pixel ua = da.normalized();
    const Pixel ub = db.normalized();
    const double cross = ua.x() * ub.y() - ua.y() * ub.x();
    if (std::abs(cross) <= 1e-9) {
      throw ParallelAdjacentLinesError("adjacent edges " + to_string(la) +
                                       " and " + to_string(lb) +
                                       " are parallel");
    }
  }
}

double TargetModel::half_diagonal() const {
  return side_m / std::numbers::sqrt2;
}

Vec3 TargetModel::corner(CornerId id) const {
  const double h = half_diagonal();
  switch (id) {
    case CornerId::Top:
      return {0.0, -h, 0.0};
    case CornerId::Right:
      return {h, 0.0, 0.0};
    case CornerId::Bottom:
      return {0.0, h, 0.0};
    case CornerId::Left:
    default:
      return {-h, 0.0, 0.0};
  }
}

std::array<Vec3, 4> TargetModel::corners() const {
  std::array<Vec3, 4> out;
  for (CornerId id : kAllCornerIds) {
    out[static_cast<int>(id)] = corner(id);
  }
  return out;
}

std::array<Pixel, 4> lines_to_corners(const ImageLineSet& lines) {
  validate(lines);
  std::array<Pixel, 4> corners;
  for (CornerId corner : kAllCornerIds) {
    const auto [la, lb] = adjacent_edges(corner);
    const HomPoint2 meet =
        lines.find(la)->line().coeffs.cross(lines.find(lb)->line().coeffs);
    try {
      corners[static_cast<int>(corner)] = dehomogenize(meet);
    } catch (const PointAtInfinityError&) {
      throw ParallelAdjacentLinesError("adjacent edges " + to_string(la) +
                                       " and " + to_string(lb) +
                                       " meet at infinity");
    }
  }
  return corners;
}

PnpResult solve_planar_pnp(const std::array<Pixel, 4>& corners_2d,
                           const TargetModel& model,
                           const CameraIntrinsics& intrinsics,
                           double residual_tol_px) {
  if (model.side_m <= 0.0) {
    throw DataError("target side length must be positive");
  }
  require_general_position(corners_2d);

  std::array<Pixel, 4> model_xy;
  for (CornerId id : kAllCornerIds) {
    const Vec3 c = model.corner(id);
    model_xy[static_cast<int>(id)] = Pixel(c.x(), c.y());
  }

  const Mat3 homography = dlt_homography(model_xy, corners_2d);
  const Mat3 m = intrinsics.inverse_matrix() * homography;
  const double n1 = m.col(0).norm();
  const double n2 = m.col(1).norm();
  if (n1 < 1e-12 || n2 < 1e-12) {
    throw DegenerateCornersError("homography decomposition is singular");
  }
  double scale = 2.0 / (n1 + n2);
  Vec3 t = scale * m.col(2);
  if (t.z() < 0) {  // target must sit in front of the camera
    scale = -scale;
    t = -t;
  }
  const Vec3 r1 = scale * m.col(0);
  const Vec3 r2 = scale * m.col(1);
  Mat3 r_approx;
  r_approx.col(0) = r1;
  r_approx.col(1) = r2;
  r_approx.col(2) = r1.cross(r2);
  const Mat3 rotation = nearest_rotation(r_approx);

  // Refine the 6 pose parameters on the corner reprojection error.
  const auto model_corners = model.corners();
  const auto residual = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    const RigidTransform pose{p.head<3>(), p.tail<3>()};
    const Mat3 rot = pose.rotation();
    Eigen::VectorXd res(8);
    for (int i = 0; i < 4; ++i) {
      const Vec3 pc = rot * model_corners[i] + pose.translation;
      if (pc.z() <= 1e-9) {
        res.setConstant(kHugeResidual);
        return res;
      }
      const Pixel proj = project_camera_point(intrinsics, pc);
      res(2 * i) = proj.x() - corners_2d[i].x();
      res(2 * i + 1) = proj.y() - corners_2d[i].y();
    }
    return res;
  };

  Eigen::VectorXd x(6);
  x.head<3>() = matrix_to_euler(rotation);
  x.tail<3>() = t;
  LmConfig lm;
  lm.max_iterations = 100;
  const LmReport report = levenberg_marquardt(residual, nullptr, x, lm);
  if (report.status == LmStatus::NumericalFailure) {
    throw NumericalFailureError("planar pose refinement failed");
  }

  PnpResult result;
  result.pose = RigidTransform{x.head<3>(), x.tail<3>()};
  result.rms_px = std::sqrt(residual(x).squaredNorm() / 4.0);
  if (!std::isfinite(result.rms_px) || result.rms_px > residual_tol_px) {
    throw PnPDivergedError(result.rms_px);
  }
  return result;
}

CameraFrame build_camera_frame(const ImageLineSet& lines,
                               const TargetModel& model,
                               const CameraIntrinsics& intrinsics,
                               double residual_tol_px) {
  CameraFrame frame;
  frame.corners_2d = lines_to_corners(lines);

  const PnpResult pnp =
      solve_planar_pnp(frame.corners_2d, model, intrinsics, residual_tol_px);
  frame.target_pose = pnp.pose;
  frame.pnp_rms_px = pnp.rms_px;

  // Target plane: normal along the posed board's z axis, oriented toward
  // the camera; the board origin lies on the plane.
  Vec3 normal = pnp.pose.rotation().col(2);
  if (normal.dot(pnp.pose.translation) > 0) {
    normal = -normal;
  }
  frame.plane = Plane{normal, normal.dot(pnp.pose.translation)};

  for (EdgeLabel label : kAllEdgeLabels) {
    const ImageLine* l = lines.find(label);
    frame.lines_2d[static_cast<int>(label)] = l->line();
    frame.back_planes[static_cast<int>(label)] =
        back_projected_plane(intrinsics, l->line());
  }

  for (CornerId corner : kAllCornerIds) {
    const auto [la, lb] = adjacent_edges(corner);
    frame.corners_3d[static_cast<int>(corner)] = intersect_three_planes(
        frame.plane, frame.back_planes[static_cast<int>(la)],
        frame.back_planes[static_cast<int>(lb)]);
  }
  return frame;
}

ImageLineSet label_image_lines(
    const std::vector<std::pair<Pixel, Pixel>>& segments) {
  if (segments.size() != 4) {
    throw EdgeLabelingError("expected 4 segments, got " +
                            std::to_string(segments.size()));
  }

  struct Endpoint {
    int segment;
    Pixel position;
    bool used = false;
  };
  std::vector<Endpoint> endpoints;
  for (int s = 0; s < 4; ++s) {
    endpoints.push_back({s, segments[s].first});
    endpoints.push_back({s, segments[s].second});
  }

  // Cluster shared endpoints into corners: repeatedly merge the globally
  // closest pair belonging to different segments.
  struct Corner {
    Pixel position;
    std::pair<int, int> segments;
  };
  std::vector<Corner> corners;
  for (int round = 0; round < 4; ++round) {
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
      for (std::size_t j = i + 1; j < endpoints.size(); ++j) {
        if (endpoints[i].used || endpoints[j].used ||
            endpoints[i].segment == endpoints[j].segment) {
          continue;
        }
        const double d =
            (endpoints[i].position - endpoints[j].position).squaredNorm();
        if (d < best) {
          best = d;
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
        }
      }
    }
    if (bi < 0) {
      throw EdgeLabelingError("segments do not pair up into quad corners");
    }
    endpoints[bi].used = true;
    endpoints[bj].used = true;
    corners.push_back(
        {0.5 * (endpoints[bi].position + endpoints[bj].position),
         {endpoints[bi].segment, endpoints[bj].segment}});
  }
  for (int s = 0; s < 4; ++s) {
    int uses = 0;
    for (const Corner& c : corners) {
      uses += (c.segments.first == s) + (c.segments.second == s);
    }
    if (uses != 2) {
      throw EdgeLabelingError("segments do not form a closed quad");
    }
  }

  // Order corners by angle around their centroid; the topmost one (smallest
  // v; image y grows downward) is Top, then Right, Bottom, Left clockwise.
  Pixel centroid = Pixel::Zero();
  for (const Corner& c : corners) {
    centroid += c.position;
  }
  centroid /= 4.0;

  int top = 0;
  for (int i = 1; i < 4; ++i) {
    const Pixel& a = corners[i].position;
    const Pixel& b = corners[top].position;
    if (a.y() < b.y() || (a.y() == b.y() && a.x() < b.x())) {
      top = i;
    }
  }
  const auto angle_of = [&](int i) {
    const Pixel d = corners[i].position - centroid;
    return std::atan2(d.y(), d.x());
  };
  const double theta0 = angle_of(top);
  std::array<int, 4> order = {0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ta =
        std::fmod(angle_of(a) - theta0 + 4.0 * std::numbers::pi,
                  2.0 * std::numbers::pi);
    const double tb =
        std::fmod(angle_of(b) - theta0 + 4.0 * std::numbers::pi,
                  2.0 * std::numbers::pi);
    return ta < tb;
  });
  if (order[0] != top) {
    throw EdgeLabelingError("corner ordering is inconsistent");
  }

  std::array<CornerId, 4> corner_id_of;  // cluster index -> CornerId
  for (int rank = 0; rank < 4; ++rank) {
    corner_id_of[order[rank]] = static_cast<CornerId>(rank);
  }

  // A segment joining corners (A, B) is the edge adjacent to both.
  const auto edge_between = [](CornerId a, CornerId b) -> EdgeLabel {
    const auto [a1, a2] = adjacent_edges(a);
    const auto [b1, b2] = adjacent_edges(b);
    if (a1 == b1 || a1 == b2) {
      return a1;
    }
    if (a2 == b1 || a2 == b2) {
      return a2;
    }
    throw EdgeLabelingError("segment joins non-adjacent corners");
  };

  ImageLineSet out;
  for (int s = 0; s < 4; ++s) {
    std::vector<CornerId> ends;
    for (std::size_t c = 0; c < corners.size(); ++c) {
      if (corners[c].segments.first == s || corners[c].segments.second == s) {
        ends.push_back(corner_id_of[c]);
      }
    }
    out.lines.push_back({edge_between(ends[0], ends[1]), segments[s].first,
                         segments[s].second});
  }
  std::sort(out.lines.begin(), out.lines.end(),
            [](const ImageLine& a, const ImageLine& b) {
              return static_cast<int>(a.label) < static_cast<int>(b.label);
            });
  validate(out);
  return out;
}

}  // namespace planecal
