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

#include <optional>
#include <string>
#include <vector>

#include "planecal/camera_features.hpp"
#include "planecal/geometry.hpp"
#include "planecal/levenberg_marquardt.hpp"
#include "planecal/lidar_features.hpp"
#include "planecal/types.hpp"

namespace planecal {

/// One observation of the target by both sensors. Cross-modal association
/// of boundary lines is by edge label; the LIDAR side may carry fewer than
/// four lines when extraction dropped some.
struct FramePair {
  FrameId id = 0;
  PlaneSegmentation lidar_plane;
  EdgeLines lidar_edges;
  CameraFrame camera;
};

/// Solver configuration for the two-stage pipeline.
struct SolverConfig {
  LmConfig lm;
  /// Run the line-based refinement stage after the plane-based stage.
  bool run_stage2 = true;
  /// Cross-check analytic Jacobians against finite differences each
  /// iteration (slow; intended for tests).
  bool check_jacobian = false;
  /// Optional frame-id subsets per stage; all frames when unset.
  std::optional<std::vector<FrameId>> stage1_frames;
  std::optional<std::vector<FrameId>> stage2_frames;
};

struct CalibrationProblem {
  std::vector<FramePair> frames;
  RigidTransform initial_guess;  // identity unless the mount is unusual
  SolverConfig config;
};

/// Outcome of one optimization stage.
struct StageReport {
  LmStatus status = LmStatus::MaxIterations;
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
};

/// Residual summary of one frame at the final transform.
struct FrameResidualStats {
  FrameId id = 0;
  int plane_points = 0;
  int edge_points = 0;
  double plane_rms_m = 0.0;
  double backplane_rms_m = 0.0;
};

struct CalibrationResult {
  RigidTransform transform;
  /// Transform after the plane stage alone; equals `transform` when stage 2
  /// was skipped or failed.
  RigidTransform stage1_transform;
  StageReport stage1;
  std::optional<StageReport> stage2;
  bool stage2_failed = false;
  /// "ok", "stage1_only", or "stage2_failed".
  std::string status = "ok";
  std::vector<FrameResidualStats> per_frame;
};

/// One weighted squared-residual term of either cost. The stored plane is
/// the camera-frame target plane (point-to-plane terms) or a back-projected
/// edge plane through the camera center (point-to-back-plane terms).
struct ResidualBlock {
  enum class Kind { PointPlane, PointBackPlane };
  Kind kind = Kind::PointPlane;
  FrameId frame = 0;
  Vec3 normal = Vec3::UnitZ();  // unit length
  double distance = 0.0;        // 0 for back-planes
  Vec3 point = Vec3::Zero();    // LIDAR-frame point
  double weight = 1.0;          // 1/(points in this frame's term)
};

/// Signed point-to-plane distance after mapping P into the camera frame:
/// n . (R P + t) - d.
double residual_point_plane(const RigidTransform& lidar_to_camera,
                            const Vec3& point, const Plane& plane);

/// Same for a plane through the camera center (d = 0): n . (R Q + t).
double residual_point_backplane(const RigidTransform& lidar_to_camera,
                                const Vec3& point, const Plane& back_plane);

/// Builds the residual blocks of the plane cost: every planar inlier of
/// every frame against that frame's camera-frame target plane, weighted by
/// one over the frame's inlier count. Deterministic (frame id, point) order.
std::vector<ResidualBlock> build_residual_blocks_p1(
    const std::vector<FramePair>& frames);

/// Residual blocks of the line cost: every member point of every labeled
/// LIDAR boundary line against the same-label back-projected plane,
/// weighted by one over the line's point count.
std::vector<ResidualBlock> build_residual_blocks_p2(
    const std::vector<FramePair>& frames);

/// Stacked weighted residuals r_k = sqrt(w_k) * (signed distance of block k)
/// at parameters x = (phi, theta, psi, tx, ty, tz).
Eigen::VectorXd residual_vector(const std::vector<ResidualBlock>& blocks,
                                const Eigen::VectorXd& x);

/// Analytic Jacobian of residual_vector at x.
Eigen::MatrixXd residual_jacobian(const std::vector<ResidualBlock>& blocks,
                                  const Eigen::VectorXd& x);

/// Plane cost: sum over frames of (1/p_i) * sum of squared point-to-plane
/// residuals. Zero at the true transform on exact data.
double cost_p1(const RigidTransform& lidar_to_camera,
               const std::vector<FramePair>& frames);

/// Line cost: sum over frames and labeled lines of (1/q_ij) * sum of
/// squared point-to-back-plane residuals.
double cost_p2(const RigidTransform& lidar_to_camera,
               const std::vector<FramePair>& frames);

/// Result of an observability check; `ok()` gates the solver stages.
struct Observability {
  bool usable = false;
  int rank = 0;         // rank of the stacked target-plane normals
  int line_count = 0;   // usable line correspondences (stage 2)
  int frame_count = 0;  // frames contributing lines (stage 2)
  std::string message;

  bool ok() const { return usable; }
};

/// Stage 1 needs target-plane normals spanning all of 3-space (at least 3
/// views in general position); rank is decided by singular values > 1e-6.
Observability check_observability_p1(const std::vector<FramePair>& frames);

/// Stage 2 needs at least 6 usable line correspondences drawn from at
/// least 2 distinct frames.
Observability check_observability_p2(const std::vector<FramePair>& frames);

/// Two-stage estimation of the LIDAR-to-camera transform: minimize the
/// plane cost from the initial guess, then refine on the line cost starting
/// at the stage-1 optimum. If stage 2 fails numerically the stage-1 result
/// is returned with stage2_failed set. Throws ObservabilityError when a
/// stage's geometry cannot constrain the solve, DataError on malformed
/// input.
CalibrationResult calibrate(const CalibrationProblem& problem);

}  // namespace planecal
