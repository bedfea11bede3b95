/*
 * Copyright 2026 The tsgait Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Minimal spatial-vector algebra. Motion vectors are [angular; linear],
// force vectors are [moment; force], both expressed at a frame origin in
// that frame's coordinates.

#include <Eigen/Dense>

namespace tsgait {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Mat3X = Eigen::Matrix<double, 3, Eigen::Dynamic>;

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

// Pose of a child frame in its parent: rot maps child coordinates to parent
// coordinates, pos is the child origin in parent coordinates.
struct SpatialTransform {
  Mat3 rot = Mat3::Identity();
  Vec3 pos = Vec3::Zero();

  SpatialTransform operator*(const SpatialTransform& child) const {
    return {rot * child.rot, pos + rot * child.pos};
  }

  Vec3 apply(const Vec3& p_child) const { return pos + rot * p_child; }

  SpatialTransform inverse() const {
    return {rot.transpose(), -(rot.transpose() * pos)};
  }

  // Parent-coordinate motion vector re-expressed at the child origin.
  Vec6 motion_to_child(const Vec6& m) const {
    Vec6 out;
    const Vec3 w = m.head<3>();
    out.head<3>() = rot.transpose() * w;
    out.tail<3>() = rot.transpose() * (m.tail<3>() - pos.cross(w));
    return out;
  }

  Vec6 force_to_parent(const Vec6& f) const {
    Vec6 out;
    out.tail<3>() = rot * f.tail<3>();
    out.head<3>() = rot * f.head<3>() + pos.cross(out.tail<3>());
    return out;
  }

  // 6x6 matrix X with X * m == motion_to_child(m).
  Mat6 motion_matrix() const {
    Mat6 x = Mat6::Zero();
    const Mat3 rt = rot.transpose();
    x.topLeftCorner<3, 3>() = rt;
    x.bottomRightCorner<3, 3>() = rt;
    x.bottomLeftCorner<3, 3>() = -rt * skew(pos);
    return x;
  }
};

// Spatial cross product for motion vectors: crm(v) * m.
inline Vec6 cross_motion(const Vec6& v, const Vec6& m) {
  Vec6 out;
  const Vec3 w = v.head<3>();
  out.head<3>() = w.cross(m.head<3>());
  out.tail<3>() = w.cross(m.tail<3>()) + v.tail<3>().cross(m.head<3>());
  return out;
}

// Spatial cross product for force vectors: crf(v) * f.
inline Vec6 cross_force(const Vec6& v, const Vec6& f) {
  Vec6 out;
  const Vec3 w = v.head<3>();
  out.head<3>() = w.cross(f.head<3>()) + v.tail<3>().cross(f.tail<3>());
  out.tail<3>() = w.cross(f.tail<3>());
  return out;
}

// Spatial inertia at the body origin for a body with CoM offset c and
// rotational inertia ic about the CoM.
inline Mat6 spatial_inertia(double mass, const Vec3& com, const Mat3& ic) {
  Mat6 out;
  const Mat3 c = skew(com);
  out.topLeftCorner<3, 3>() = ic + mass * c * c.transpose();
  out.topRightCorner<3, 3>() = mass * c;
  out.bottomLeftCorner<3, 3>() = mass * c.transpose();
  out.bottomRightCorner<3, 3>() = mass * Mat3::Identity();
  return out;
}

// Rotation by angle about a unit axis.
inline Mat3 axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

// SO(3) exponential of a rotation vector.
inline Mat3 exp_so3(const Vec3& w) {
  const double theta = w.norm();
  if (theta < 1e-12) return Mat3::Identity() + skew(w);
  return Eigen::AngleAxisd(theta, w / theta).toRotationMatrix();
}

}  // namespace tsgait
