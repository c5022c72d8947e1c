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

#include "planecal/calib_solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "planecal/errors.hpp"

namespace planecal {

namespace {

/// Frames sorted by id so accumulation order never depends on input order.
std::vector<const FramePair*> sorted_frames(
    const std::vector<FramePair>& frames) {
  std::vector<const FramePair*> out;
  out.reserve(frames.size());
  for (const FramePair& f : frames) {
    out.push_back(&f);
  }
  std::sort(out.begin(), out.end(),
            [](const FramePair* a, const FramePair* b) { return a->id < b->id; });
  return out;
}

std::vector<FramePair> select_frames(
    const std::vector<FramePair>& frames,
    const std::optional<std::vector<FrameId>>& subset) {
  if (!subset) {
    return frames;
  }
  const std::unordered_set<FrameId> wanted(subset->begin(), subset->end());
  std::vector<FramePair> out;
  for (const FramePair& f : frames) {
    if (wanted.count(f.id) > 0) {
      out.push_back(f);
    }
  }
  if (out.empty()) {
    throw DataError("stage frame subset selects no frames");
  }
  return out;
}

double weighted_cost(const std::vector<ResidualBlock>& blocks,
                     const RigidTransform& transform) {
  double cost = 0.0;
  for (const ResidualBlock& b : blocks) {
    const Plane plane{b.normal, b.distance};
    const double r = b.kind == ResidualBlock::Kind::PointPlane
                         ? residual_point_plane(transform, b.point, plane)
                         : residual_point_backplane(transform, b.point, plane);
    cost += b.weight * r * r;
  }
  return cost;
}

StageReport run_stage(const std::vector<ResidualBlock>& blocks,
                      Eigen::VectorXd& x, const SolverConfig& config) {
  LmConfig lm = config.lm;
  lm.check_jacobian = config.check_jacobian;
  const auto residual = [&blocks](const Eigen::VectorXd& p) {
    return residual_vector(blocks, p);
  };
  const auto jacobian = [&blocks](const Eigen::VectorXd& p) {
    return residual_jacobian(blocks, p);
  };
  const LmReport lm_report = levenberg_marquardt(residual, jacobian, x, lm);

  StageReport report;
  report.status = lm_report.status;
  report.iterations = lm_report.iterations;
  report.initial_cost = lm_report.initial_cost;
  report.final_cost = lm_report.final_cost;
  return report;
}

void validate_problem(const CalibrationProblem& problem) {
  if (problem.frames.empty()) {
    throw DataError("calibration problem holds no frames");
  }
  std::set<FrameId> ids;
  for (const FramePair& f : problem.frames) {
    if (!ids.insert(f.id).second) {
      throw DataError("duplicate frame id " + std::to_string(f.id));
    }
  }
  const LmConfig& lm = problem.config.lm;
  if (lm.max_iterations <= 0 || lm.gradient_tolerance <= 0.0 ||
      lm.step_tolerance <= 0.0 || lm.damping_initial <= 0.0 ||
      lm.damping_increase <= 1.0 || lm.damping_decrease <= 0.0 ||
      lm.damping_decrease >= 1.0) {
    throw DataError("solver configuration values out of range");
  }
}

}  // namespace

double residual_point_plane(const RigidTransform& lidar_to_camera,
                            const Vec3& point, const Plane& plane) {
  return plane.signed_distance(transform_point(lidar_to_camera, point));
}

double residual_point_backplane(const RigidTransform& lidar_to_camera,
                                const Vec3& point, const Plane& back_plane) {
  return back_plane.normal.dot(transform_point(lidar_to_camera, point));
}

std::vector<ResidualBlock> build_residual_blocks_p1(
    const std::vector<FramePair>& frames) {
  std::vector<ResidualBlock> blocks;
  for (const FramePair* f : sorted_frames(frames)) {
    if (f->lidar_plane.inliers.empty()) {
      throw DataError("frame " + std::to_string(f->id) +
                      " has no planar points");
    }
    const double weight = 1.0 / static_cast<double>(f->lidar_plane.inliers.size());
    for (const Vec3& p : f->lidar_plane.inliers) {
      ResidualBlock b;
      b.kind = ResidualBlock::Kind::PointPlane;
      b.frame = f->id;
      b.normal = f->camera.plane.normal;
      b.distance = f->camera.plane.distance;
      b.point = p;
      b.weight = weight;
      blocks.push_back(b);
    }
  }
  return blocks;
}

std::vector<ResidualBlock> build_residual_blocks_p2(
    const std::vector<FramePair>& frames) {
  std::vector<ResidualBlock> blocks;
  for (const FramePair* f : sorted_frames(frames)) {
    for (EdgeLabel label : kAllEdgeLabels) {
      const LabeledLine3* line = f->lidar_edges.find(label);
      if (line == nullptr || line->points.empty()) {
        continue;
      }
      const Plane& back_plane = f->camera.back_planes[static_cast<int>(label)];
      const double weight = 1.0 / static_cast<double>(line->points.size());
      for (const Vec3& q : line->points) {
        ResidualBlock b;
        b.kind = ResidualBlock::Kind::PointBackPlane;
        b.frame = f->id;
        b.normal = back_plane.normal;
        b.distance = 0.0;
        b.point = q;
        b.weight = weight;
        blocks.push_back(b);
      }
    }
  }
  return blocks;
}

Eigen::VectorXd residual_vector(const std::vector<ResidualBlock>& blocks,
                                const Eigen::VectorXd& x) {
  const Mat3 rotation = euler_to_matrix(x.head<3>());
  const Vec3 translation = x.tail<3>();
  Eigen::VectorXd r(static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const ResidualBlock& b = blocks[k];
    const double value =
        b.normal.dot(rotation * b.point + translation) - b.distance;
    r(static_cast<Eigen::Index>(k)) = std::sqrt(b.weight) * value;
  }
  return r;
}

Eigen::MatrixXd residual_jacobian(const std::vector<ResidualBlock>& blocks,
                                  const Eigen::VectorXd& x) {
  const RotationDerivatives deriv = rotation_derivatives(x.head<3>());
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(blocks.size()), 6);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const ResidualBlock& b = blocks[k];
    const double s = std::sqrt(b.weight);
    const auto row = static_cast<Eigen::Index>(k);
    jac(row, 0) = s * b.normal.dot(deriv.d_phi * b.point);
    jac(row, 1) = s * b.normal.dot(deriv.d_theta * b.point);
    jac(row, 2) = s * b.normal.dot(deriv.d_psi * b.point);
    jac.block<1, 3>(row, 3) = s * b.normal.transpose();
  }
  return jac;
}

double cost_p1(const RigidTransform& lidar_to_camera,
               const std::vector<FramePair>& frames) {
  return weighted_cost(build_residual_blocks_p1(frames), lidar_to_camera);
}

double cost_p2(const RigidTransform& lidar_to_camera,
               const std::vector<FramePair>& frames) {
  return weighted_cost(build_residual_blocks_p2(frames), lidar_to_camera);
}

Observability check_observability_p1(const std::vector<FramePair>& frames) {
  Observability result;
  Eigen::MatrixXd normals(static_cast<Eigen::Index>(frames.size()), 3);
  Eigen::Index row = 0;
  for (const FramePair* f : sorted_frames(frames)) {
    normals.row(row++) = f->camera.plane.normal.transpose();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(normals);
  result.rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > 1e-6) {
      ++result.rank;
    }
  }
  result.usable = result.rank == 3;
  result.message =
      result.usable
          ? "plane normals span 3-space"
          : "plane normals span rank " + std::to_string(result.rank) +
                "; need 3 views in general position";
  return result;
}

Observability check_observability_p2(const std::vector<FramePair>& frames) {
  Observability result;
  for (const FramePair& f : frames) {
    int usable_lines = 0;
    for (EdgeLabel label : kAllEdgeLabels) {
      const LabeledLine3* line = f.lidar_edges.find(label);
      if (line != nullptr && !line->points.empty()) {
        ++usable_lines;
      }
    }
    if (usable_lines > 0) {
      ++result.frame_count;
      result.line_count += usable_lines;
    }
  }
  result.usable = result.line_count >= 6 && result.frame_count >= 2;
  result.message = result.usable
                       ? "line correspondences sufficient"
                       : "have " + std::to_string(result.line_count) +
                             " line correspondences over " +
                             std::to_string(result.frame_count) +
                             " frames; need >= 6 over >= 2 frames";
  return result;
}

CalibrationResult calibrate(const CalibrationProblem& problem) {
  validate_problem(problem);

  const std::vector<FramePair> stage1_frames =
      select_frames(problem.frames, problem.config.stage1_frames);
  const Observability obs1 = check_observability_p1(stage1_frames);
  if (!obs1.ok()) {
    throw ObservabilityError("stage 1: " + obs1.message);
  }

  Eigen::VectorXd x(6);
  x.head<3>() = problem.initial_guess.euler;
  x.tail<3>() = problem.initial_guess.translation;

  CalibrationResult result;
  const std::vector<ResidualBlock> blocks1 =
      build_residual_blocks_p1(stage1_frames);
  result.stage1 = run_stage(blocks1, x, problem.config);
  if (result.stage1.status == LmStatus::NumericalFailure) {
    throw NumericalFailureError("stage 1 optimization failed");
  }
  result.stage1_transform = RigidTransform{x.head<3>(), x.tail<3>()};
  result.transform = result.stage1_transform;
  result.status = "stage1_only";

  if (problem.config.run_stage2) {
    const std::vector<FramePair> stage2_frames =
        select_frames(problem.frames, problem.config.stage2_frames);
    const Observability obs2 = check_observability_p2(stage2_frames);
    if (!obs2.ok()) {
      throw ObservabilityError("stage 2: " + obs2.message);
    }
    const std::vector<ResidualBlock> blocks2 =
        build_residual_blocks_p2(stage2_frames);
    Eigen::VectorXd x2 = x;
    const StageReport stage2 = run_stage(blocks2, x2, problem.config);
    result.stage2 = stage2;
    if (stage2.status == LmStatus::NumericalFailure) {
      result.stage2_failed = true;
      result.status = "stage2_failed";
    } else {
      result.transform = RigidTransform{x2.head<3>(), x2.tail<3>()};
      result.status = "ok";
    }
  }

  for (const FramePair* f : sorted_frames(problem.frames)) {
    FrameResidualStats stats;
    stats.id = f->id;
    stats.plane_points = static_cast<int>(f->lidar_plane.inliers.size());
    double sum2 = 0.0;
    for (const Vec3& p : f->lidar_plane.inliers) {
      const double r = residual_point_plane(result.transform, p,
                                            f->camera.plane);
      sum2 += r * r;
    }
    stats.plane_rms_m =
        stats.plane_points > 0 ? std::sqrt(sum2 / stats.plane_points) : 0.0;

    sum2 = 0.0;
    for (EdgeLabel label : kAllEdgeLabels) {
      const LabeledLine3* line = f->lidar_edges.find(label);
      if (line == nullptr) {
        continue;
      }
      const Plane& back_plane = f->camera.back_planes[static_cast<int>(label)];
      for (const Vec3& q : line->points) {
        const double r = residual_point_backplane(result.transform, q,
                                                  back_plane);
        sum2 += r * r;
        ++stats.edge_points;
      }
    }
    stats.backplane_rms_m =
        stats.edge_points > 0 ? std::sqrt(sum2 / stats.edge_points) : 0.0;
    result.per_frame.push_back(stats);
  }
  return result;
}

}  // namespace planecal
