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

#include "planecal/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace planecal {

namespace {

Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0,  //
      0, c, -s,  //
      0, s, c;
  return m;
}

Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s,  //
      0, 1, 0,   //
      -s, 0, c;
  return m;
}

Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0,  //
      s, c, 0,    //
      0, 0, 1;
  return m;
}

Mat3 drot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 0, 0, 0,   //
      0, -s, -c,  //
      0, c, -s;
  return m;
}

Mat3 drot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << -s, 0, c,  //
      0, 0, 0,    //
      -c, 0, -s;
  return m;
}

Mat3 drot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << -s, -c, 0,  //
      c, -s, 0,    //
      0, 0, 0;
  return m;
}

}  // namespace

Mat3 euler_to_matrix(double phi, double theta, double psi) {
  return rot_z(psi) * rot_y(theta) * rot_x(phi);
}

Mat3 euler_to_matrix(const Vec3& euler_xyz) {
  return euler_to_matrix(euler_xyz.x(), euler_xyz.y(), euler_xyz.z());
}

Vec3 matrix_to_euler(const Mat3& r) {
  const double sin_theta = -r(2, 0);
  if (std::abs(sin_theta) >= 1.0 - 1e-12) {
    // Gimbal lock: only psi - sign(theta)*phi is observable; pin phi = 0.
    const double theta = std::copysign(M_PI / 2.0, sin_theta);
    const double psi = std::atan2(-r(0, 1), r(1, 1));
    return {0.0, theta, psi};
  }
  const double theta = std::asin(sin_theta);
  const double phi = std::atan2(r(2, 1), r(2, 2));
  const double psi = std::atan2(r(1, 0), r(0, 0));
  return {phi, theta, psi};
}

RotationDerivatives rotation_derivatives(const Vec3& e) {
  const Mat3 rx = rot_x(e.x()), ry = rot_y(e.y()), rz = rot_z(e.z());
  return {rz * ry * drot_x(e.x()), rz * drot_y(e.y()) * rx,
          drot_z(e.z()) * ry * rx};
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
  RigidTransform t;
  t.euler = matrix_to_euler(m.topLeftCorner<3, 3>());
  t.translation = m.topRightCorner<3, 1>();
  return t;
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

RigidTransform RigidTransform::inverse() const {
  const Mat3 rt = rotation().transpose();
  RigidTransform inv;
  inv.euler = matrix_to_euler(rt);
  inv.translation = -(rt * translation);
  return inv;
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
  const Mat3 r1 = rotation();
  RigidTransform out;
  out.euler = matrix_to_euler(r1 * other.rotation());
  out.translation = r1 * other.translation + translation;
  return out;
}

Vec3 transform_point(const RigidTransform& transform, const Vec3& point) {
  return transform.rotation() * point + transform.translation;
}

Plane Plane::from_coefficients(const Vec3& normal, double distance) {
  const double n = normal.norm();
  if (n < 1e-12) {
    throw DegenerateConfigurationError("plane normal is the zero vector");
  }
  return {normal / n, distance / n};
}

Line2 Line2::through(const Pixel& p0, const Pixel& p1) {
  const HomPoint2 a(p0.x(), p0.y(), 1.0);
  const HomPoint2 b(p1.x(), p1.y(), 1.0);
  const HomPoint2 l = a.cross(b);
  if (l.norm() < 1e-12) {
    throw DegenerateLineError("line through coincident points");
  }
  return {l};
}

Mat3 CameraIntrinsics::matrix() const {
  Mat3 k;
  k << fx, skew, cx,  //
      0, fy, cy,      //
      0, 0, 1;
  return k;
}

Mat3 CameraIntrinsics::inverse_matrix() const {
  return matrix().inverse();
}

Pixel dehomogenize(const HomPoint2& p, double w_tol) {
  if (std::abs(p.z()) < w_tol) {
    throw PointAtInfinityError("homogeneous 2D point at infinity");
  }
  return p.head<2>() / p.z();
}

Vec3 dehomogenize(const HomPoint3& p, double w_tol) {
  if (std::abs(p.w()) < w_tol) {
    throw PointAtInfinityError("homogeneous 3D point at infinity");
  }
  return p.head<3>() / p.w();
}

Pixel project_camera_point(const CameraIntrinsics& intrinsics,
                           const Vec3& point_camera) {
  if (point_camera.z() <= 1e-9) {
    throw NonPositiveDepthError(point_camera.z());
  }
  const HomPoint2 h = intrinsics.matrix() * point_camera;
  return h.head<2>() / h.z();
}

Pixel project_point(const CameraIntrinsics& intrinsics,
                    const RigidTransform& lidar_to_camera, const Vec3& point) {
  return project_camera_point(intrinsics,
                              transform_point(lidar_to_camera, point));
}

Plane back_projected_plane(const CameraIntrinsics& intrinsics, const Line2& l) {
  const Vec3 n = intrinsics.matrix().transpose() * l.coeffs;
  if (n.norm() < 1e-12) {
    throw DegenerateLineError("back-projected plane normal vanishes");
  }
  return {n.normalized(), 0.0};
}

Line3 intersect_planes(const Plane& a, const Plane& b) {
  const Vec3 cross = a.normal.cross(b.normal);
  const double cross_norm = cross.norm();
  if (cross_norm < 1e-9) {
    throw ParallelPlanesError("planes are parallel");
  }
  // Point on both planes closest to the origin, from the 2x2 system in the
  // span of the two (unit) normals.
  const double dot = a.normal.dot(b.normal);
  const double denom = 1.0 - dot * dot;
  const double ca = (a.distance - b.distance * dot) / denom;
  const double cb = (b.distance - a.distance * dot) / denom;
  return {ca * a.normal + cb * b.normal, cross / cross_norm};
}

Vec3 intersect_three_planes(const Plane& a, const Plane& b, const Plane& c) {
  Mat3 normals;
  normals.row(0) = a.normal;
  normals.row(1) = b.normal;
  normals.row(2) = c.normal;
  if (std::abs(normals.determinant()) <= 1e-9) {
    throw DegenerateConfigurationError(
        "plane normals are linearly dependent");
  }
  return normals.partialPivLu().solve(
      Vec3(a.distance, b.distance, c.distance));
}

double point_line_distance_2d(const Pixel& p, const Line2& l) {
  const double norm2d = l.coeffs.head<2>().norm();
  if (norm2d < 1e-12) {
    throw DegenerateLineError("image line has zero direction component");
  }
  const HomPoint2 ph(p.x(), p.y(), 1.0);
  return std::abs(l.coeffs.dot(ph)) / norm2d;
}

}  // namespace planecal
