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

#include <Eigen/Geometry>

#include "planecal/errors.hpp"
#include "planecal/types.hpp"

namespace planecal {

/// Euler angle convention used everywhere in this library: intrinsic Z-Y-X,
///   R = Rz(psi) * Ry(theta) * Rx(phi).
/// This string is embedded in every JSON artifact that carries a rotation.
inline constexpr const char* kEulerConvention =
    "intrinsic ZYX: R = Rz(psi) * Ry(theta) * Rx(phi)";

/// Rotation matrix for intrinsic Z-Y-X Euler angles (roll phi about x,
/// pitch theta about y, yaw psi about z). Total function; always returns an
/// orthonormal matrix with determinant +1.
Mat3 euler_to_matrix(double phi, double theta, double psi);
Mat3 euler_to_matrix(const Vec3& euler_xyz);

/// Inverse of euler_to_matrix. At gimbal lock (|theta| = pi/2) the phi/psi
/// split is not unique; phi is pinned to 0 there.
Vec3 matrix_to_euler(const Mat3& rotation);

/// Partial derivatives of euler_to_matrix with respect to (phi, theta, psi).
struct RotationDerivatives {
  Mat3 d_phi;
  Mat3 d_theta;
  Mat3 d_psi;
};
RotationDerivatives rotation_derivatives(const Vec3& euler_xyz);

/// 6-DoF rigid transform parameterized by Euler angles and a translation,
/// the unknowns of the calibration problem.
struct RigidTransform {
  Vec3 euler = Vec3::Zero();        // (phi, theta, psi) [rad]
  Vec3 translation = Vec3::Zero();  // (x, y, z) [m]

  static RigidTransform identity() { return {}; }
  static RigidTransform from_matrix(const Mat4& m);

  Mat3 rotation() const { return euler_to_matrix(euler); }
  Mat4 matrix() const;
  RigidTransform inverse() const;

  /// this ∘ other: applies `other` first, then `this`.
  RigidTransform compose(const RigidTransform& other) const;
};

/// Applies R*P + t.
Vec3 transform_point(const RigidTransform& transform, const Vec3& point);

/// Plane in Hessian normal form: X lies on the plane iff normal . X == d.
/// The normal is kept at unit length.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double distance = 0.0;

  /// Normalizes the coefficients so that the stored normal has unit length.
  static Plane from_coefficients(const Vec3& normal, double distance);

  /// Signed distance of a point to the plane, meters.
  double signed_distance(const Vec3& point) const {
    return normal.dot(point) - distance;
  }
};

/// 3D line through `point` with unit `direction`.
struct Line3 {
  Vec3 point = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();

  double distance_to(const Vec3& p) const {
    return direction.cross(p - point).norm();
  }
};

/// Homogeneous 2D line in the image plane; l and lambda*l (lambda != 0)
/// denote the same line.
struct Line2 {
  HomPoint2 coeffs = HomPoint2(0, 1, 0);

  /// Line through two pixel points, l = p0~ x p1~.
  static Line2 through(const Pixel& p0, const Pixel& p1);
};

/// Pinhole camera intrinsics. K is upper triangular with positive diagonal.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  double skew = 0.0;

  Mat3 matrix() const;
  Mat3 inverse_matrix() const;
};

/// Dehomogenizes; throws PointAtInfinityError when |w| is below tolerance.
Pixel dehomogenize(const HomPoint2& p, double w_tol = 1e-12);
Vec3 dehomogenize(const HomPoint3& p, double w_tol = 1e-12);

/// Projects a camera-frame point through K. Throws NonPositiveDepthError
/// when the depth is at or below 1e-9.
Pixel project_camera_point(const CameraIntrinsics& intrinsics,
                           const Vec3& point_camera);

/// Full pinhole projection of a LIDAR-frame point: K (R*P + t), dehomogenized.
Pixel project_point(const CameraIntrinsics& intrinsics,
                    const RigidTransform& lidar_to_camera, const Vec3& point);

/// Plane through the camera center containing every 3D point that projects
/// onto image line l: normal = K^T l normalized to unit length, distance 0.
/// Unit normals make point-to-plane residuals metric distances.
Plane back_projected_plane(const CameraIntrinsics& intrinsics, const Line2& l);

/// Intersection line of two planes. Throws ParallelPlanesError when the
/// normals are parallel within 1e-9.
Line3 intersect_planes(const Plane& a, const Plane& b);

/// Common point of three planes. Throws DegenerateConfigurationError when
/// the stacked normals are near singular (|det| <= 1e-9).
Vec3 intersect_three_planes(const Plane& a, const Plane& b, const Plane& c);

/// Perpendicular pixel distance from a point to a homogeneous image line.
/// Throws DegenerateLineError when (l0, l1) vanishes.
double point_line_distance_2d(const Pixel& p, const Line2& l);

}  // namespace planecal
