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

#include <array>
#include <vector>

#include "tsgait/model/robot_model.hpp"

namespace tsgait {

// Body poses of one configuration. Relative poses are in the base frame and
// depend only on the joint angles; world poses compose the base pose on top.
struct Kinematics {
  std::vector<SpatialTransform> relative;  // body i in base frame
  std::vector<SpatialTransform> world;     // body i in world frame
  std::array<Vec3, 2> foot_relative{};     // foot point, base frame
  std::array<Vec3, 2> foot_world{};
  std::array<Mat3, 2> foot_rotation_world{};

  const SpatialTransform& base() const { return world[0]; }
};

Kinematics forward_kinematics(const RobotModel& model, const GeneralizedState& state);

// Relative-only variant; world poses equal the relative ones (base at origin).
Kinematics forward_kinematics(const RobotModel& model, const VecX& joint_angles);

// 3 x n translational Jacobian of the foot point relative to the base, in
// base coordinates. Base columns are identically zero.
Mat3X foot_jacobian(const RobotModel& model, const GeneralizedState& state, Foot foot);
Mat3X foot_jacobian(const RobotModel& model, const Kinematics& kin, Foot foot);

// 3 x n world-frame Jacobian of a point fixed in `body` (point in body
// coordinates) with respect to the generalized velocity.
Mat3X point_jacobian_world(const RobotModel& model, const Kinematics& kin, int body,
                           const Vec3& point);

// Relative foot velocity (base frame) and world foot velocity.
Vec3 foot_velocity_relative(const RobotModel& model, const Kinematics& kin, Foot foot,
                            const VecX& nu);
Vec3 point_velocity_world(const RobotModel& model, const Kinematics& kin, int body,
                          const Vec3& point, const VecX& nu);

}  // namespace tsgait
