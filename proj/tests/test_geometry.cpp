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

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "planecal/errors.hpp"

namespace planecal {
namespace {

constexpr double kPi = std::numbers::pi;

// Hand-written single-axis rotation matrices, the textbook definitions the
// Euler composition is checked against.
Mat3 rot_x(double a) {
  Mat3 m;
  m << 1, 0, 0,  //
      0, std::cos(a), -std::sin(a),  //
      0, std::sin(a), std::cos(a);
  return m;
}

Mat3 rot_y(double a) {
  Mat3 m;
  m << std::cos(a), 0, std::sin(a),  //
      0, 1, 0,  //
      -std::sin(a), 0, std::cos(a);
  return m;
}

Mat3 rot_z(double a) {
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0,  //
      std::sin(a), std::cos(a), 0,  //
      0, 0, 1;
  return m;
}

TEST_CASE("euler_to_matrix equals Rz*Ry*Rx built from axis matrices") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const double phi = angle(rng), theta = angle(rng), psi = angle(rng);
    const Mat3 expected = rot_z(psi) * rot_y(theta) * rot_x(phi);
    const Mat3 actual = euler_to_matrix(phi, theta, psi);
    CHECK((actual - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("euler_to_matrix single-axis cases reduce to the axis matrices") {
  CHECK((euler_to_matrix(0.37, 0, 0) - rot_x(0.37)).norm() < 1e-15);
  CHECK((euler_to_matrix(0, -0.81, 0) - rot_y(-0.81)).norm() < 1e-15);
  CHECK((euler_to_matrix(0, 0, 2.2) - rot_z(2.2)).norm() < 1e-15);
  CHECK((euler_to_matrix(0, 0, 0) - Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("euler_to_matrix always returns a proper rotation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-2 * kPi, 2 * kPi);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r = euler_to_matrix(angle(rng), angle(rng), angle(rng));
    CHECK((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("matrix_to_euler inverts euler_to_matrix away from gimbal lock") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> full(-kPi + 1e-3, kPi - 1e-3);
  std::uniform_real_distribution<double> pitch(-kPi / 2 + 1e-2,
                                               kPi / 2 - 1e-2);
  for (int i = 0; i < 200; ++i) {
    const Vec3 euler(full(rng), pitch(rng), full(rng));
    const Vec3 back = matrix_to_euler(euler_to_matrix(euler));
    CHECK((back - euler).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("matrix_to_euler at gimbal lock pins phi and preserves the matrix") {
  const Mat3 locked = euler_to_matrix(0.3, kPi / 2, 0.4);
  const Vec3 euler = matrix_to_euler(locked);
  CHECK(euler.x() == 0.0);  // phi pinned
  // The (phi, psi) split is not unique there, but the matrix must survive.
  CHECK((euler_to_matrix(euler) - locked).cwiseAbs().maxCoeff() < 1e-12);

  const Mat3 locked_down = euler_to_matrix(-0.2, -kPi / 2, 1.1);
  const Vec3 euler_down = matrix_to_euler(locked_down);
  CHECK(euler_down.x() == 0.0);
  CHECK((euler_to_matrix(euler_down) - locked_down).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("rotation_derivatives matches central finite differences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(-1.4, 1.4);
  const double h = 1e-7;
  for (int i = 0; i < 50; ++i) {
    const Vec3 e(angle(rng), angle(rng), angle(rng));
    const RotationDerivatives d = rotation_derivatives(e);
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 plus = e, minus = e;
      plus(axis) += h;
      minus(axis) -= h;
      const Mat3 fd =
          (euler_to_matrix(plus) - euler_to_matrix(minus)) / (2 * h);
      const Mat3& analytic =
          axis == 0 ? d.d_phi : (axis == 1 ? d.d_theta : d.d_psi);
      CHECK((analytic - fd).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("RigidTransform matrix/from_matrix round trip") {
  const RigidTransform t{Vec3(0.31, -0.62, 1.45), Vec3(1.5, -2.5, 0.25)};
  const RigidTransform back = RigidTransform::from_matrix(t.matrix());
  CHECK((back.euler - t.euler).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((back.translation - t.translation).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("RigidTransform compose matches homogeneous matrix product") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> angle(-1.2, 1.2);
  std::uniform_real_distribution<double> shift(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const RigidTransform a{Vec3(angle(rng), angle(rng), angle(rng)),
                           Vec3(shift(rng), shift(rng), shift(rng))};
    const RigidTransform b{Vec3(angle(rng), angle(rng), angle(rng)),
                           Vec3(shift(rng), shift(rng), shift(rng))};
    const Mat4 expected = a.matrix() * b.matrix();
    CHECK((a.compose(b).matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("RigidTransform inverse composes to the identity") {
  const RigidTransform t{Vec3(0.4, -0.9, 0.2), Vec3(0.3, 1.0, -2.0)};
  const Mat4 round = t.compose(t.inverse()).matrix();
  CHECK((round - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  const Mat4 other = t.inverse().compose(t).matrix();
  CHECK((other - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("transform_point applies R*p + t") {
  const RigidTransform t{Vec3(0.2, 0.3, -0.4), Vec3(1, 2, 3)};
  const Vec3 p(0.5, -1.5, 2.0);
  const Vec3 expected = t.rotation() * p + t.translation;
  CHECK((transform_point(t, p) - expected).norm() == 0.0);
  // Homogeneous oracle.
  const Eigen::Vector4d hom = t.matrix() * Eigen::Vector4d(p.x(), p.y(), p.z(), 1.0);
  CHECK((transform_point(t, p) - hom.head<3>()).norm() < 1e-14);
}

TEST_CASE("Plane::from_coefficients normalizes and keeps the geometry") {
  const Plane p = Plane::from_coefficients(Vec3(0, 0, 3), 6.0);
  CHECK(p.normal.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.distance == doctest::Approx(2.0));
  CHECK(p.signed_distance(Vec3(0, 0, 2)) == doctest::Approx(0.0));
  CHECK(p.signed_distance(Vec3(5, -7, 2)) == doctest::Approx(0.0));
  CHECK(p.signed_distance(Vec3(0, 0, 2.5)) == doctest::Approx(0.5));
}

TEST_CASE("Line3 distance is the perpendicular point-line distance") {
  const Line3 x_axis{Vec3::Zero(), Vec3::UnitX()};
  CHECK(x_axis.distance_to(Vec3(7.5, 0, 0)) == doctest::Approx(0.0));
  CHECK(x_axis.distance_to(Vec3(1, 2, 3)) ==
        doctest::Approx(std::sqrt(13.0)));
  const Line3 diag{Vec3(1, 1, 1), Vec3(1, 1, 1).normalized()};
  CHECK(diag.distance_to(Vec3(2, 2, 2)) == doctest::Approx(0.0));
}

TEST_CASE("Line2 through two points contains both and between them") {
  const Line2 l = Line2::through(Pixel(2, 3), Pixel(10, 7));
  const auto on = [&](const Pixel& p) {
    return std::abs(l.coeffs.dot(HomPoint2(p.x(), p.y(), 1.0)));
  };
  CHECK(on(Pixel(2, 3)) < 1e-12);
  CHECK(on(Pixel(10, 7)) < 1e-12);
  CHECK(on(Pixel(6, 5)) < 1e-12);  // midpoint
}

TEST_CASE("point_line_distance_2d against hand geometry") {
  const Line2 x_axis = Line2::through(Pixel(0, 0), Pixel(1, 0));
  CHECK(point_line_distance_2d(Pixel(4, 1), x_axis) == doctest::Approx(1.0));
  CHECK(point_line_distance_2d(Pixel(-3, -2.5), x_axis) ==
        doctest::Approx(2.5));
  // Distance is invariant to the scale of the homogeneous coefficients.
  Line2 scaled = x_axis;
  scaled.coeffs *= -17.0;
  CHECK(point_line_distance_2d(Pixel(4, 1), scaled) == doctest::Approx(1.0));
  Line2 degenerate;
  degenerate.coeffs = HomPoint2(0, 0, 1);
  CHECK_THROWS_AS(point_line_distance_2d(Pixel(0, 0), degenerate),
                  DegenerateLineError);
}

TEST_CASE("CameraIntrinsics matrix and inverse") {
  const CameraIntrinsics k{600.0, 580.0, 640.0, 360.0, 2.5};
  Mat3 expected;
  expected << 600.0, 2.5, 640.0,  //
      0.0, 580.0, 360.0,  //
      0.0, 0.0, 1.0;
  CHECK((k.matrix() - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK((k.matrix() * k.inverse_matrix() - Mat3::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("dehomogenize divides by the last coordinate") {
  CHECK((dehomogenize(HomPoint2(2, 4, 2)) - Pixel(1, 2)).norm() == 0.0);
  CHECK((dehomogenize(HomPoint3(2, 4, 6, 2)) - Vec3(1, 2, 3)).norm() == 0.0);
  CHECK_THROWS_AS(dehomogenize(HomPoint2(1, 1, 0)), PointAtInfinityError);
  CHECK_THROWS_AS(dehomogenize(HomPoint3(1, 1, 1, 1e-13)),
                  PointAtInfinityError);
}

TEST_CASE("project_camera_point matches the pinhole equations") {
  const CameraIntrinsics k{600.0, 600.0, 640.0, 360.0, 0.0};
  CHECK((project_camera_point(k, Vec3(0, 0, 2)) - Pixel(640, 360)).norm() ==
        0.0);
  // u = fx*x/z + cx, v = fy*y/z + cy.
  const Pixel p = project_camera_point(k, Vec3(0.1, -0.2, 2.0));
  CHECK(p.x() == doctest::Approx(640.0 + 600.0 * 0.05));
  CHECK(p.y() == doctest::Approx(360.0 - 600.0 * 0.1));
  CHECK_THROWS_AS(project_camera_point(k, Vec3(0, 0, 0)),
                  NonPositiveDepthError);
  CHECK_THROWS_AS(project_camera_point(k, Vec3(1, 1, -2)),
                  NonPositiveDepthError);
}

TEST_CASE("project_point is projection after the rigid transform") {
  const CameraIntrinsics k{500.0, 500.0, 320.0, 240.0, 0.0};
  const RigidTransform t{Vec3(0.1, -0.2, 0.3), Vec3(0.05, 0.1, 0.2)};
  const Vec3 p(0.4, -0.3, 3.0);
  const Pixel direct = project_point(k, t, p);
  const Pixel composed = project_camera_point(k, transform_point(t, p));
  CHECK((direct - composed).norm() < 1e-12);
}

TEST_CASE("back_projected_plane contains every point imaging onto the line") {
  const CameraIntrinsics k{600.0, 580.0, 640.0, 360.0, 0.0};
  const Line2 l = Line2::through(Pixel(100, 50), Pixel(700, 500));
  const Plane plane = back_projected_plane(k, l);
  CHECK(plane.distance == 0.0);
  CHECK(plane.normal.norm() == doctest::Approx(1.0).epsilon(1e-15));
  // Points on the viewing rays of pixels on the line must lie on the plane.
  const Mat3 k_inv = k.inverse_matrix();
  for (double s : {0.0, 0.25, 0.7, 1.0}) {
    const Pixel pix = (1 - s) * Pixel(100, 50) + s * Pixel(700, 500);
    for (double depth : {0.5, 2.0, 10.0}) {
      const Vec3 point = depth * (k_inv * HomPoint2(pix.x(), pix.y(), 1.0));
      CHECK(std::abs(plane.normal.dot(point)) < 1e-9);
    }
  }
}

TEST_CASE("intersect_planes yields the common line") {
  const Plane a{Vec3(0, 0, 1), 1.0};  // z = 1
  const Plane b{Vec3(1, 0, 0), 2.0};  // x = 2
  const Line3 l = intersect_planes(a, b);
  CHECK(std::abs(a.signed_distance(l.point)) < 1e-12);
  CHECK(std::abs(b.signed_distance(l.point)) < 1e-12);
  CHECK(std::abs(l.direction.dot(a.normal)) < 1e-12);
  CHECK(std::abs(l.direction.dot(b.normal)) < 1e-12);
  CHECK(l.direction.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(intersect_planes(a, Plane{Vec3(0, 0, -1), 5.0}),
                  ParallelPlanesError);
}

TEST_CASE("intersect_three_planes against a Cramer's-rule oracle") {
  const Plane px{Vec3(1, 0, 0), 1.0};
  const Plane py{Vec3(0, 1, 0), 2.0};
  const Plane pz{Vec3(0, 0, 1), 3.0};
  CHECK((intersect_three_planes(px, py, pz) - Vec3(1, 2, 3)).norm() < 1e-12);

  // Generic case: solve the 3x3 system independently.
  const Plane a = Plane::from_coefficients(Vec3(1, 2, 2), 3.0);
  const Plane b = Plane::from_coefficients(Vec3(-2, 1, 0.5), 1.0);
  const Plane c = Plane::from_coefficients(Vec3(0.3, -1, 1), -0.5);
  Mat3 n;
  n.row(0) = a.normal.transpose();
  n.row(1) = b.normal.transpose();
  n.row(2) = c.normal.transpose();
  const Vec3 rhs(a.distance, b.distance, c.distance);
  const Vec3 expected = n.fullPivLu().solve(rhs);
  CHECK((intersect_three_planes(a, b, c) - expected).norm() < 1e-10);

  CHECK_THROWS_AS(
      intersect_three_planes(px, Plane{Vec3(1, 0, 0), 5.0}, pz),
      DegenerateConfigurationError);
}

}  // namespace
}  // namespace planecal
