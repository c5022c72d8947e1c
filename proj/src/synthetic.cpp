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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "planecal/errors.hpp"

namespace planecal {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// The two corners an edge connects, ordered by CornerId.
std::pair<CornerId, CornerId> edge_corners(EdgeLabel label) {
  std::vector<CornerId> found;
  for (CornerId c : kAllCornerIds) {
    const auto [a, b] = adjacent_edges(c);
    if (a == label || b == label) {
      found.push_back(c);
    }
  }
  return {found[0], found[1]};
}

struct PosedTarget {
  std::array<Vec3, 4> corners;  // LIDAR frame, Top/Right/Bottom/Left
  Plane plane;                  // LIDAR frame, normal toward the sensor
  Mat3 rotation;                // target -> LIDAR
  Vec3 translation;
};

PosedTarget pose_target(const TargetModel& target, const RigidTransform& pose) {
  PosedTarget out;
  out.rotation = pose.rotation();
  out.translation = pose.translation;
  const auto model = target.corners();
  for (int k = 0; k < 4; ++k) {
    out.corners[k] = out.rotation * model[k] + out.translation;
  }
  Vec3 normal = out.rotation.col(2);
  double d = normal.dot(out.translation);
  if (d > 0) {
    normal = -normal;
    d = -d;
  }
  out.plane = Plane{normal, d};
  return out;
}

double azimuth_of(const Vec3& p) { return std::atan2(p.x(), p.z()); }
double elevation_of(const Vec3& p) {
  return std::atan2(-p.y(), std::hypot(p.x(), p.z()));
}

Vec3 ray_direction(double elevation, double azimuth) {
  return {std::cos(elevation) * std::sin(azimuth), -std::sin(elevation),
          std::cos(elevation) * std::cos(azimuth)};
}

/// Parameters s in [0,1] where segment A + s(B-A) meets the elevation cone
/// el(P) = elevation. Solves the squared cone equation and rejects mirror
/// roots with the unsquared condition.
std::vector<double> cone_segment_roots(const Vec3& a, const Vec3& b,
                                       double elevation) {
  const Vec3 d = b - a;
  const double se = std::sin(elevation);
  const double ce = std::cos(elevation);
  const double se2 = se * se, ce2 = ce * ce;

  const double qa = se2 * (d.x() * d.x() + d.z() * d.z()) - ce2 * d.y() * d.y();
  const double qb =
      2.0 * (se2 * (a.x() * d.x() + a.z() * d.z()) - ce2 * a.y() * d.y());
  const double qc = se2 * (a.x() * a.x() + a.z() * a.z()) - ce2 * a.y() * a.y();

  std::vector<double> candidates;
  const double scale = std::abs(qa) + std::abs(qb) + std::abs(qc);
  if (std::abs(qa) < 1e-14 * std::max(scale, 1e-300)) {
    if (std::abs(qb) > 1e-14 * std::max(scale, 1e-300)) {
      candidates.push_back(-qc / qb);
    }
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      const double q = -0.5 * (qb + (qb >= 0 ? root : -root));
      candidates.push_back(q / qa);
      if (std::abs(q) > 0.0) {
        candidates.push_back(qc / q);
      }
    }
  }

  std::vector<double> roots;
  for (double s : candidates) {
    if (s < -1e-9 || s > 1.0 + 1e-9) {
      continue;
    }
    s = std::clamp(s, 0.0, 1.0);
    const Vec3 p = a + s * d;
    const double rho = std::hypot(p.x(), p.z());
    // Unsquared cone condition; mirror-elevation roots fail it by ~2|se|rho.
    if (std::abs(ce * p.y() + se * rho) > 1e-6 * std::max(1.0, rho)) {
      continue;
    }
    bool duplicate = false;
    for (double t : roots) {
      if (std::abs(t - s) < 1e-9) {
        duplicate = true;
      }
    }
    if (!duplicate) {
      roots.push_back(s);
    }
  }
  return roots;
}

}  // namespace

LidarModel LidarModel::default_32ring() {
  LidarModel model;
  model.ring_elevations_deg.resize(32);
  for (int i = 0; i < 32; ++i) {
    model.ring_elevations_deg[i] = -25.0 + 40.0 * i / 31.0;
  }
  return model;
}

void validate(const SyntheticScene& scene) {
  if (scene.poses.empty()) {
    throw DataError("scene has no target poses");
  }
  if (scene.target.side_m <= 0.0) {
    throw DataError("target side length must be positive");
  }
  if (scene.lidar.ring_elevations_deg.empty()) {
    throw DataError("LIDAR model has no rings");
  }
  if (scene.lidar.azimuth_step_deg <= 0.0) {
    throw DataError("LIDAR azimuth step must be positive");
  }
  const Mat3 gt_rot = scene.gt_transform.rotation();
  for (std::size_t i = 0; i < scene.poses.size(); ++i) {
    const PosedTarget posed = pose_target(scene.target, scene.poses[i]);
    for (const Vec3& c : posed.corners) {
      if (c.norm() > scene.lidar.max_range_m) {
        throw DataError("pose " + std::to_string(i) +
                        " places the target beyond LIDAR range");
      }
      const Vec3 cam = gt_rot * c + scene.gt_transform.translation;
      if (cam.z() <= 1e-9) {
        throw DataError("pose " + std::to_string(i) +
                        " places a corner behind the camera");
      }
    }
  }
}

std::uint64_t frame_seed(std::uint64_t scene_seed, FrameId id) {
  // Hash the scene seed before adding the frame index so that nearby scene
  // seeds do not yield shifted copies of the same per-frame stream.
  return splitmix64(splitmix64(scene_seed) +
                    static_cast<std::uint64_t>(id) + 1);
}

PointCloud sample_target_lidar(const SyntheticScene& scene,
                               const RigidTransform& pose,
                               std::uint64_t rng_seed) {
  const PosedTarget posed = pose_target(scene.target, pose);
  const double h = scene.target.half_diagonal();
  const double margin = scene.window_margin_deg * kDeg;
  const double az_cap = scene.lidar.max_abs_azimuth_deg * kDeg;
  const double step = scene.lidar.azimuth_step_deg * kDeg;

  double az_lo = 1e9, az_hi = -1e9, el_lo = 1e9, el_hi = -1e9;
  for (const Vec3& c : posed.corners) {
    az_lo = std::min(az_lo, azimuth_of(c));
    az_hi = std::max(az_hi, azimuth_of(c));
    el_lo = std::min(el_lo, elevation_of(c));
    el_hi = std::max(el_hi, elevation_of(c));
  }
  az_lo = std::max(az_lo - margin, -az_cap);
  az_hi = std::min(az_hi + margin, az_cap);
  el_lo -= margin;
  el_hi += margin;

  const bool wall = scene.wall_offset_m > 0.0;
  const double wall_d = posed.plane.distance - scene.wall_offset_m;

  struct Sample {
    double azimuth;
    Vec3 position;
    bool on_target;
  };

  PointCloud cloud;
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> range_noise(0.0,
                                               scene.noise.lidar_range_sigma_m);
  std::size_t target_count = 0;

  for (std::size_t ring = 0; ring < scene.lidar.ring_elevations_deg.size();
       ++ring) {
    const double elevation = scene.lidar.ring_elevations_deg[ring] * kDeg;
    if (elevation < el_lo || elevation > el_hi || az_lo > az_hi) {
      continue;
    }
    std::vector<Sample> samples;

    // Grid rays on the sensor's azimuth raster.
    const auto k_lo = static_cast<long long>(std::ceil(az_lo / step));
    const auto k_hi = static_cast<long long>(std::floor(az_hi / step));
    for (long long k = k_lo; k <= k_hi; ++k) {
      const double azimuth = static_cast<double>(k) * step;
      const Vec3 dir = ray_direction(elevation, azimuth);
      const double denom = posed.plane.normal.dot(dir);
      if (std::abs(denom) < 1e-12) {
        continue;
      }
      const double r_target = posed.plane.distance / denom;
      bool hit_target = false;
      if (r_target > 0.0 && r_target <= scene.lidar.max_range_m) {
        const Vec3 p = r_target * dir;
        const Vec3 local =
            posed.rotation.transpose() * (p - posed.translation);
        if (std::abs(local.x()) + std::abs(local.y()) <= h + 1e-9) {
          samples.push_back({azimuth, p, true});
          hit_target = true;
        }
      }
      if (!hit_target && wall) {
        const double r_wall = wall_d / denom;
        if (r_wall > 0.0 && r_wall <= scene.lidar.max_range_m) {
          samples.push_back({azimuth, r_wall * dir, false});
        }
      }
    }

    // Exact intersections of this ring's elevation cone with each board
    // edge; these are the points boundary-line fits should recover.
    for (EdgeLabel label : kAllEdgeLabels) {
      const auto [ca, cb] = edge_corners(label);
      const Vec3& a = posed.corners[static_cast<int>(ca)];
      const Vec3& b = posed.corners[static_cast<int>(cb)];
      for (double s : cone_segment_roots(a, b, elevation)) {
        const Vec3 p = a + s * (b - a);
        const double azimuth = azimuth_of(p);
        if (azimuth < az_lo || azimuth > az_hi ||
            p.norm() > scene.lidar.max_range_m) {
          continue;
        }
        samples.push_back({azimuth, p, true});
      }
    }

    std::sort(samples.begin(), samples.end(),
              [](const Sample& a, const Sample& b) {
                if (a.azimuth != b.azimuth) {
                  return a.azimuth < b.azimuth;
                }
                return std::lexicographical_compare(
                    a.position.data(), a.position.data() + 3,
                    b.position.data(), b.position.data() + 3);
              });

    for (const Sample& s : samples) {
      Vec3 p = s.position;
      if (scene.noise.lidar_range_sigma_m > 0.0) {
        const double r = p.norm();
        if (r > 1e-12) {
          p += range_noise(rng) * (p / r);
        }
      }
      cloud.points.push_back({p, static_cast<int>(ring), std::nullopt});
      if (s.on_target) {
        ++target_count;
      }
    }
  }

  if (target_count == 0) {
    throw NoHitsError("no LIDAR ray reaches the target");
  }
  return cloud;
}

ImageLineSet sample_target_camera(const SyntheticScene& scene,
                                  const RigidTransform& pose,
                                  std::uint64_t rng_seed) {
  const Mat3 rotation = scene.gt_transform.rotation() * pose.rotation();
  const Vec3 translation =
      scene.gt_transform.rotation() * pose.translation +
      scene.gt_transform.translation;

  std::array<Pixel, 4> pixels;
  const auto model = scene.target.corners();
  for (int k = 0; k < 4; ++k) {
    const Vec3 cam = rotation * model[k] + translation;
    if (cam.z() <= 1e-9) {
      throw BehindCameraError("target corner " + std::to_string(k) +
                              " has non-positive camera depth");
    }
    pixels[k] = project_camera_point(scene.intrinsics, cam);
  }

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> px_noise(0.0, scene.noise.pixel_sigma_px);

  ImageLineSet out;
  for (EdgeLabel label : kAllEdgeLabels) {
    const auto [ca, cb] = edge_corners(label);
    ImageLine line;
    line.label = label;
    line.p0 = pixels[static_cast<int>(ca)];
    line.p1 = pixels[static_cast<int>(cb)];
    if (scene.noise.pixel_sigma_px > 0.0) {
      line.p0 += Pixel(px_noise(rng), px_noise(rng));
      line.p1 += Pixel(px_noise(rng), px_noise(rng));
    }
    out.lines.push_back(line);
  }
  return out;
}

int pose_normal_rank(const SyntheticScene& scene) {
  Eigen::MatrixXd normals(static_cast<Eigen::Index>(scene.poses.size()), 3);
  const Mat3 gt_rot = scene.gt_transform.rotation();
  for (std::size_t i = 0; i < scene.poses.size(); ++i) {
    normals.row(static_cast<Eigen::Index>(i)) =
        (gt_rot * scene.poses[i].rotation().col(2)).transpose();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(normals);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > 1e-6) {
      ++rank;
    }
  }
  return rank;
}

PassthroughBounds recommended_bounds(const SyntheticScene& scene) {
  PassthroughBounds bounds;
  bounds.min = Vec3::Constant(1e9);
  bounds.max = Vec3::Constant(-1e9);
  for (const RigidTransform& pose : scene.poses) {
    const PosedTarget posed = pose_target(scene.target, pose);
    for (const Vec3& c : posed.corners) {
      bounds.min = bounds.min.cwiseMin(c);
      bounds.max = bounds.max.cwiseMax(c);
    }
  }
  bounds.min -= Vec3::Constant(0.6);
  bounds.max += Vec3::Constant(0.6);
  return bounds;
}

std::vector<SyntheticFrame> generate_frames(const SyntheticScene& scene) {
  validate(scene);
  std::vector<SyntheticFrame> frames;
  frames.reserve(scene.poses.size());
  for (std::size_t i = 0; i < scene.poses.size(); ++i) {
    const auto id = static_cast<FrameId>(i);
    const std::uint64_t fs = frame_seed(scene.seed, id);
    SyntheticFrame frame;
    frame.id = id;
    frame.cloud = sample_target_lidar(scene, scene.poses[i], fs);
    frame.image_lines = sample_target_camera(scene, scene.poses[i],
                                             splitmix64(fs ^ 0x5DEECE66DULL));
    frames.push_back(std::move(frame));
  }
  return frames;
}

SyntheticScene make_default_scene(int n_views, std::uint64_t seed,
                                  const NoiseModel& noise) {
  SyntheticScene scene;
  scene.gt_transform.euler = Vec3(10.0 * kDeg, -5.0 * kDeg, 3.0 * kDeg);
  scene.gt_transform.translation = Vec3(0.1, -0.2, 0.05);
  scene.intrinsics = CameraIntrinsics{600.0, 600.0, 640.0, 360.0, 0.0};
  scene.target.side_m = 1.0;
  scene.lidar = LidarModel::default_32ring();
  scene.noise = noise;
  scene.seed = seed;

  const double golden = 0.6180339887498949;
  for (int i = 0; i < n_views; ++i) {
    // Tilt axis swept around the viewing direction: plane normals form a
    // cone about -z and together span rank 3. Tilts stay moderate, as they
    // would be when a person holds the board roughly facing the sensors.
    const double tau = 2.0 * std::numbers::pi * i / std::max(n_views, 1) + 0.35;
    const double amp = (10.0 + 8.0 * std::fmod(golden * (i + 1), 1.0)) * kDeg;
    RigidTransform pose;
    pose.euler = Vec3(amp * std::cos(tau), amp * std::sin(tau),
                      7.0 * kDeg * std::sin(2.399 * i + 0.8));
    pose.translation =
        Vec3(0.55 * std::sin(2.1 * i + 0.5),
             0.05 + 0.22 * std::sin(1.3 * i + 2.2),
             2.2 + 1.0 * std::fmod(golden * (i + 1), 1.0));
    scene.poses.push_back(pose);
  }
  return scene;
}

}  // namespace planecal
