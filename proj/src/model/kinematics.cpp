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

#include "tsgait/model/kinematics.hpp"

namespace tsgait {
namespace {

void fill_feet(const RobotModel& model, Kinematics& kin) {
  for (size_t f = 0; f < model.feet().size() && f < 2; ++f) {
    const FootFrame& ff = model.feet()[f];
    kin.foot_relative[f] = kin.relative[ff.body].apply(ff.offset);
    kin.foot_world[f] = kin.world[ff.body].apply(ff.offset);
    kin.foot_rotation_world[f] = kin.world[ff.body].rot;
  }
}

void fill_relative(const RobotModel& model, const VecX& q, Kinematics& kin) {
  const int n = model.num_bodies();
  kin.relative.resize(n);
  kin.relative[0] = SpatialTransform{};
  for (int i = 1; i < n; ++i) {
    const JointSpec& j = model.joints()[i];
    SpatialTransform joint;
    joint.rot = axis_angle(j.axis, q(i - 1));
    kin.relative[i] = kin.relative[j.parent] * j.origin * joint;
  }
}

}  // namespace

Kinematics forward_kinematics(const RobotModel& model, const GeneralizedState& state) {
  Kinematics kin;
  fill_relative(model, state.joint_angles, kin);
  const SpatialTransform base{state.base_rotation(), state.base_position};
  kin.world.resize(kin.relative.size());
  for (size_t i = 0; i < kin.relative.size(); ++i) kin.world[i] = base * kin.relative[i];
  fill_feet(model, kin);
  return kin;
}

Kinematics forward_kinematics(const RobotModel& model, const VecX& joint_angles) {
  Kinematics kin;
  fill_relative(model, joint_angles, kin);
  kin.world = kin.relative;
  fill_feet(model, kin);
  return kin;
}

Mat3X foot_jacobian(const RobotModel& model, const Kinematics& kin, Foot foot) {
  const FootFrame& ff = model.foot(foot);
  const Vec3 p = kin.foot_relative[static_cast<int>(foot)];
  Mat3X jac = Mat3X::Zero(3, model.num_dofs());
  for (int b = ff.body; b > 0; b = model.joints()[b].parent) {
    const Vec3 axis = kin.relative[b].rot * model.joints()[b].axis;
    jac.col(RobotModel::dof_index(b)) = axis.cross(p - kin.relative[b].pos);
  }
  return jac;
}

Mat3X foot_jacobian(const RobotModel& model, const GeneralizedState& state, Foot foot) {
  return foot_jacobian(model, forward_kinematics(model, state.joint_angles), foot);
}

Mat3X point_jacobian_world(const RobotModel& model, const Kinematics& kin, int body,
                           const Vec3& point) {
  const Mat3& rb = kin.base().rot;
  const Vec3 r = kin.relative[body].apply(point);
  Mat3X jac = Mat3X::Zero(3, model.num_dofs());
  jac.block<3, 3>(0, 0) = -rb * skew(r);
  jac.block<3, 3>(0, 3) = rb;
  for (int b = body; b > 0; b = model.joints()[b].parent) {
    const Vec3 axis = kin.relative[b].rot * model.joints()[b].axis;
    jac.col(RobotModel::dof_index(b)) = rb * axis.cross(r - kin.relative[b].pos);
  }
  return jac;
}

Vec3 foot_velocity_relative(const RobotModel& model, const Kinematics& kin, Foot foot,
                            const VecX& nu) {
  const FootFrame& ff = model.foot(foot);
  const Vec3 p = kin.foot_relative[static_cast<int>(foot)];
  Vec3 v = Vec3::Zero();
  for (int b = ff.body; b > 0; b = model.joints()[b].parent) {
    const Vec3 axis = kin.relative[b].rot * model.joints()[b].axis;
    v += axis.cross(p - kin.relative[b].pos) * nu(RobotModel::dof_index(b));
  }
  return v;
}

Vec3 point_velocity_world(const RobotModel& model, const Kinematics& kin, int body,
                          const Vec3& point, const VecX& nu) {
  const Vec3 r = kin.relative[body].apply(point);
  Vec3 v = nu.segment<3>(3) + nu.head<3>().cross(r);
  for (int b = body; b > 0; b = model.joints()[b].parent) {
    const Vec3 axis = kin.relative[b].rot * model.joints()[b].axis;
    v += axis.cross(r - kin.relative[b].pos) * nu(RobotModel::dof_index(b));
  }
  return kin.base().rot * v;
}

}  // namespace tsgait
