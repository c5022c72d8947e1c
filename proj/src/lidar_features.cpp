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

#include "planecal/lidar_features.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace planecal {

namespace {

/// Azimuth of a point in the sensor frame (z forward, x right, y down);
/// rings sweep in this angle.
double azimuth_of(const Vec3& p) { return std::atan2(p.x(), p.z()); }

/// Orients a line direction to positive z (ties: positive y, then x).
Vec3 orient_direction(Vec3 d) {
  if (std::abs(d.z()) > 1e-12) {
    return d.z() > 0 ? d : -d;
  }
  if (std::abs(d.y()) > 1e-12) {
    return d.y() > 0 ? d : -d;
  }
  return d.x() >= 0 ? d : -d;
}

Plane fit_plane_lsq(const std::vector<Vec3>& points) {
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) {
    centroid += p;
  }
  centroid /= static_cast<double>(points.size());

  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  Vec3 normal = eig.eigenvectors().col(0);  // smallest eigenvalue
  double distance = normal.dot(centroid);
  if (normal.dot(centroid) > 0) {  // orient toward the sensor origin
    normal = -normal;
    distance = -distance;
  }
  return {normal, distance};
}

Line3 fit_line_lsq(const std::vector<Vec3>& points) {
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) {
    centroid += p;
  }
  centroid /= static_cast<double>(points.size());

  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Vec3 direction = eig.eigenvectors().col(2);  // largest eigenvalue
  return {centroid, orient_direction(direction)};
}

int ransac_iterations_needed(double inlier_ratio, int sample_size,
                             double confidence, int max_iterations) {
  const double p_good = std::pow(inlier_ratio, sample_size);
  if (p_good >= 1.0 - 1e-12) {
    return 1;
  }
  if (p_good <= 1e-12) {
    return max_iterations;
  }
  const double n = std::log(1.0 - confidence) / std::log(1.0 - p_good);
  return std::clamp(static_cast<int>(std::ceil(n)), 1, max_iterations);
}

}  // namespace

bool PointCloud::has_rings() const {
  return !points.empty() &&
         std::all_of(points.begin(), points.end(),
                     [](const LidarPoint& p) { return p.ring >= 0; });
}

const LabeledLine3* EdgeLines::find(EdgeLabel label) const {
  for (const LabeledLine3& l : lines) {
    if (l.label == label) {
      return &l;
    }
  }
  return nullptr;
}

PointCloud passthrough_filter(const PointCloud& cloud,
                              const PassthroughBounds& bounds) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const LidarPoint& p : cloud.points) {
    if (bounds.contains(p.position)) {
      out.points.push_back(p);
    }
  }
  if (out.empty()) {
    throw EmptyResultError("passthrough filter removed every point");
  }
  return out;
}

PlaneSegmentation segment_plane(const PointCloud& cloud,
                                const PlaneRansacConfig& config,
                                std::uint64_t seed) {
  const std::size_t n = cloud.size();
  if (n < 3) {
    throw InsufficientPointsError("plane segmentation needs at least 3 points");
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  auto count_inliers = [&](const Vec3& normal, double d) {
    std::size_t count = 0;
    for (const LidarPoint& p : cloud.points) {
      if (std::abs(normal.dot(p.position) - d) <= config.distance_threshold) {
        ++count;
      }
    }
    return count;
  };

  std::size_t best_count = 0;
  Vec3 best_normal = Vec3::UnitZ();
  double best_d = 0.0;
  int needed = config.max_iterations;
  for (int iter = 0; iter < needed; ++iter) {
    std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
    if (i == j || j == k || i == k) {
      continue;
    }
    const Vec3& a = cloud.points[i].position;
    const Vec3 cross =
        (cloud.points[j].position - a).cross(cloud.points[k].position - a);
    if (cross.norm() < 1e-12) {
      continue;  // collinear sample
    }
    const Vec3 normal = cross.normalized();
    const double d = normal.dot(a);
    const std::size_t count = count_inliers(normal, d);
    if (count > best_count) {
      best_count = count;
      best_normal = normal;
      best_d = d;
      needed = std::min(
          needed, ransac_iterations_needed(static_cast<double>(count) /
                                               static_cast<double>(n),
                                           3, config.confidence,
                                           config.max_iterations));
    }
  }

  if (best_count < static_cast<std::size_t>(config.min_inliers) ||
      best_count < 3) {
    throw NoConsensusError("best plane consensus of " +
                           std::to_string(best_count) + " is below the floor");
  }

  // Refit and reselect until the inlier set is the exact threshold set of
  // its own least-squares plane.
  std::vector<Vec3> inliers;
  for (const LidarPoint& p : cloud.points) {
    if (std::abs(best_normal.dot(p.position) - best_d) <=
        config.distance_threshold) {
      inliers.push_back(p.position);
    }
  }
  Plane plane = fit_plane_lsq(inliers);
  for (int round = 0; round < 10; ++round) {
    std::vector<Vec3> reselected;
    for (const LidarPoint& p : cloud.points) {
      if (std::abs(plane.signed_distance(p.position)) <=
          config.distance_threshold) {
        reselected.push_back(p.position);
      }
    }
    if (reselected == inliers) {
      break;
    }
    inliers = std::move(reselected);
    if (inliers.size() < 3) {
      throw NoConsensusError("plane refit collapsed below 3 inliers");
    }
    plane = fit_plane_lsq(inliers);
  }
  // Exactness on cap exit: the reported set is the threshold set of the
  // reported plane.
  inliers.clear();
  for (const LidarPoint& p : cloud.points) {
    if (std::abs(plane.signed_distance(p.position)) <=
        config.distance_threshold) {
      inliers.push_back(p.position);
    }
  }
  if (inliers.size() < static_cast<std::size_t>(config.min_inliers)) {
    throw NoConsensusError("refit plane keeps only " +
                           std::to_string(inliers.size()) + " inliers");
  }

  PlaneSegmentation out;
  out.plane = plane;
  out.centroid = Vec3::Zero();
  for (const Vec3& p : inliers) {
    out.centroid += p;
  }
  out.centroid /= static_cast<double>(inliers.size());
  out.inliers = std::move(inliers);
  return out;
}

PointCloud detect_edge_points(const PointCloud& cloud,
                              const EdgeConfig& config) {
  if (cloud.empty()) {
    return {};
  }
  if (!cloud.has_rings()) {
    throw NoRingStructureError("cloud has points without a ring index");
  }

  std::map<int, std::vector<std::size_t>> rings;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    rings[cloud.points[i].ring].push_back(i);
  }

  PointCloud out;
  for (auto& [ring, indices] : rings) {
    std::sort(indices.begin(), indices.end(), [&](std::size_t a,
                                                  std::size_t b) {
      const Vec3& pa = cloud.points[a].position;
      const Vec3& pb = cloud.points[b].position;
      const double aza = azimuth_of(pa), azb = azimuth_of(pb);
      if (aza != azb) {
        return aza < azb;
      }
      return std::lexicographical_compare(pa.data(), pa.data() + 3, pb.data(),
                                          pb.data() + 3);
    });

    std::vector<double> range(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
      range[i] = cloud.points[indices[i]].position.norm();
    }

    const int k = std::max(config.neighbors_per_side, 1);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      double max_gap = 0.0;
      for (int off = 1; off <= k; ++off) {
        if (i >= static_cast<std::size_t>(off)) {
          max_gap = std::max(max_gap, std::abs(range[i - off] - range[i]));
        }
        if (i + off < indices.size()) {
          max_gap = std::max(max_gap, std::abs(range[i + off] - range[i]));
        }
      }
      if (max_gap > config.depth_gap_threshold) {
        out.points.push_back(cloud.points[indices[i]]);
      }
    }
  }
  return out;
}

PlaneBasis plane_basis(const Plane& plane) {
  // World up is -y (sensor frame has y pointing down). For a horizontal
  // plane fall back to +z so the basis stays defined.
  Vec3 up_hint(0, -1, 0);
  Vec3 up = up_hint - up_hint.dot(plane.normal) * plane.normal;
  if (up.norm() < 1e-9) {
    up_hint = Vec3(0, 0, 1);
    up = up_hint - up_hint.dot(plane.normal) * plane.normal;
  }
  up.normalize();
  const Vec3 right = up.cross(plane.normal).normalized();
  return {right, up};
}

EdgeLines fit_boundary_lines(const PointCloud& edge_cloud,
                             const Plane& target_plane,
                             const BoundaryLineConfig& config,
                             std::uint64_t seed) {
  std::vector<Vec3> pool;
  for (const LidarPoint& p : edge_cloud.points) {
    if (std::abs(target_plane.signed_distance(p.position)) <=
        config.plane_band) {
      pool.push_back(p.position);
    }
  }
  if (pool.size() < 2) {
    throw InsufficientEdgePointsError(
        "only " + std::to_string(pool.size()) +
        " edge points within the target plane band");
  }

  Vec3 band_centroid = Vec3::Zero();
  for (const Vec3& p : pool) {
    band_centroid += p;
  }
  band_centroid /= static_cast<double>(pool.size());

  std::mt19937_64 rng(seed);
  const LineRansacConfig& rc = config.ransac;

  std::vector<Line3> lines;
  std::vector<Vec3> working = pool;

  for (int round = 0; round < 4; ++round) {
    if (working.size() < static_cast<std::size_t>(rc.min_points)) {
      throw LineDeficitError(round);
    }
    std::uniform_int_distribution<std::size_t> pick(0, working.size() - 1);

    std::size_t best_count = 0;
    Vec3 best_point = Vec3::Zero(), best_dir = Vec3::UnitX();
    int needed = rc.max_iterations;
    for (int iter = 0; iter < needed; ++iter) {
      const std::size_t i = pick(rng), j = pick(rng);
      if (i == j) {
        continue;
      }
      const Vec3 dir = working[j] - working[i];
      if (dir.norm() < 1e-12) {
        continue;
      }
      const Line3 candidate{working[i], dir.normalized()};
      std::size_t count = 0;
      for (const Vec3& p : working) {
        if (candidate.distance_to(p) <= rc.distance_threshold) {
          ++count;
        }
      }
      if (count > best_count) {
        best_count = count;
        best_point = candidate.point;
        best_dir = candidate.direction;
        needed = std::min(
            needed, ransac_iterations_needed(
                        static_cast<double>(count) /
                            static_cast<double>(working.size()),
                        2, rc.confidence, rc.max_iterations));
      }
    }
    if (best_count < static_cast<std::size_t>(rc.min_points)) {
      throw LineDeficitError(round);
    }

    // Refit against the consensus set once so the removal step tracks the
    // least-squares line rather than the raw 2-point candidate.
    Line3 line{best_point, best_dir};
    std::vector<Vec3> members;
    for (const Vec3& p : working) {
      if (line.distance_to(p) <= rc.distance_threshold) {
        members.push_back(p);
      }
    }
    line = fit_line_lsq(members);
    std::erase_if(working, [&](const Vec3& p) {
      return line.distance_to(p) <= rc.distance_threshold;
    });
    lines.push_back(line);
  }

  // Joint refinement over the whole band pool: each point goes to the
  // nearest of the four lines (when within threshold), each line is refit
  // to its share, and the loop runs to a fixed point. Nearest-assignment is
  // what keeps the member sets disjoint near the square's corners, where a
  // point can fall within threshold of both adjacent boundary lines; plain
  // threshold membership there would bleed points across edges and bias the
  // fits. The loop always ends on an assignment pass, so the reported
  // member sets are exactly the nearest-assignment threshold sets of the
  // reported lines (ties to the lowest line index).
  auto assign_groups = [&]() {
    std::vector<std::vector<Vec3>> groups(lines.size());
    for (const Vec3& p : pool) {
      int best = -1;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t li = 0; li < lines.size(); ++li) {
        const double dist = lines[li].distance_to(p);
        if (dist < best_dist) {
          best_dist = dist;
          best = static_cast<int>(li);
        }
      }
      if (best >= 0 && best_dist <= rc.distance_threshold) {
        groups[static_cast<std::size_t>(best)].push_back(p);
      }
    }
    return groups;
  };

  std::vector<std::vector<Vec3>> groups = assign_groups();
  for (int refine = 0; refine < 20; ++refine) {
    for (std::size_t li = 0; li < lines.size(); ++li) {
      if (groups[li].size() >= 2) {
        lines[li] = fit_line_lsq(groups[li]);
      }
    }
    std::vector<std::vector<Vec3>> next = assign_groups();
    const bool stable = next == groups;
    groups = std::move(next);
    if (stable) {
      break;
    }
  }

  int lines_reaching_floor = 0;
  for (const std::vector<Vec3>& g : groups) {
    if (g.size() >= static_cast<std::size_t>(rc.min_points)) {
      ++lines_reaching_floor;
    }
  }
  if (lines_reaching_floor < 4) {
    throw LineDeficitError(lines_reaching_floor);
  }

  // Label each line from its placement around the band centroid in the
  // plane basis: vertical half picks top/bottom, in-plane slope sign picks
  // the left/right member of that pair.
  const PlaneBasis basis = plane_basis(target_plane);
  EdgeLines out;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    Vec3 line_centroid = Vec3::Zero();
    for (const Vec3& p : groups[li]) {
      line_centroid += p;
    }
    line_centroid /= static_cast<double>(groups[li].size());

    const double eta = basis.up.dot(line_centroid - band_centroid);
    const double slope =
        basis.right.dot(lines[li].direction) * basis.up.dot(lines[li].direction);
    EdgeLabel label;
    if (eta > 0) {
      label = slope > 0 ? EdgeLabel::TopLeft : EdgeLabel::TopRight;
    } else {
      label = slope > 0 ? EdgeLabel::BottomRight : EdgeLabel::BottomLeft;
    }
    if (out.find(label) != nullptr) {
      throw EdgeLabelingError("two boundary lines both classify as " +
                              to_string(label));
    }
    out.lines.push_back({label, lines[li], groups[li]});
  }

  std::sort(out.lines.begin(), out.lines.end(),
            [](const LabeledLine3& a, const LabeledLine3& b) {
              return static_cast<int>(a.label) < static_cast<int>(b.label);
            });
  return out;
}

LidarFrame extract_lidar_features(const PointCloud& cloud,
                                  const LidarExtractionConfig& config,
                                  std::uint64_t seed) {
  // Plane segmentation runs on the cropped cloud so clutter behind the
  // target cannot win the consensus vote; edge detection needs the full
  // cloud because the depth gaps that mark the target boundary are against
  // background returns that the crop removes.
  const PointCloud filtered =
      config.bounds ? passthrough_filter(cloud, *config.bounds) : cloud;
  LidarFrame frame;
  frame.plane = segment_plane(filtered, config.plane_ransac, seed);
  const PointCloud edges = detect_edge_points(cloud, config.edge);
  frame.edges =
      fit_boundary_lines(edges, frame.plane.plane, config.boundary, seed + 1);
  return frame;
}

}  // namespace planecal
