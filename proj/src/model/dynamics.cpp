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

#include "tsgait/model/dynamics.hpp"

#include <vector>

namespace tsgait {
namespace {

// Parent-to-child pose of body i (joint origin composed with joint rotation).
SpatialTransform link_transform(const Kinematics& kin, const RobotModel& model, int i) {
  return kin.relative[model.joints()[i].parent].inverse() * kin.relative[i];
}

Vec6 joint_axis(const RobotModel& model, int i) {
  Vec6 s = Vec6::Zero();
  s.head<3>() = model.joints()[i].axis;
  return s;
}

}  // namespace

MatX mass_matrix(const RobotModel& model, const Kinematics& kin) {
  const int n = model.num_bodies();
  const int dofs = model.num_dofs();
  std::vector<Mat6> composite(n);
  std::vector<SpatialTransform> link(n);
  for (int i = 0; i < n; ++i) {
    composite[i] = model.spatial_inertia(i);
    if (i > 0) link[i] = link_transform(kin, model, i);
  }
  for (int i = n - 1; i > 0; --i) {
    const Mat6 x = link[i].motion_matrix();
    composite[model.joints()[i].parent] += x.transpose() * composite[i] * x;
  }

  MatX m = MatX::Zero(dofs, dofs);
  m.topLeftCorner<6, 6>() = composite[0];
  for (int i = 1; i < n; ++i) {
    const Vec6 s = joint_axis(model, i);
    Vec6 f = composite[i] * s;
    const int di = RobotModel::dof_index(i);
    m(di, di) = s.dot(f);
    int j = i;
    while (model.joints()[j].parent > 0) {
      f = link[j].force_to_parent(f);
      j = model.joints()[j].parent;
      const int dj = RobotModel::dof_index(j);
      m(di, dj) = m(dj, di) = joint_axis(model, j).dot(f);
    }
    f = link[j].force_to_parent(f);
    m.block<6, 1>(0, di) = f;
    m.block<1, 6>(di, 0) = f.transpose();
  }
  return m;
}

MatX mass_matrix(const RobotModel& model, const GeneralizedState& state) {
  return mass_matrix(model, forward_kinematics(model, state.joint_angles));
}

VecX inverse_dynamics(const RobotModel& model, const Kinematics& kin, const VecX& nu,
                      const VecX& accel) {
  const int n = model.num_bodies();
  std::vector<Vec6> v(n), a(n), f(n);
  std::vector<SpatialTransform> link(n);

  v[0] = nu.head<6>();
  a[0] = accel.head<6>();
  // Gravity enters as a fictitious upward acceleration of the base.
  a[0].tail<3>() -= kin.base().rot.transpose() * model.gravity();
  const Mat6& i0 = model.spatial_inertia(0);
  f[0] = i0 * a[0] + cross_force(v[0], i0 * v[0]);

  for (int i = 1; i < n; ++i) {
    const int p = model.joints()[i].parent;
    const int di = RobotModel::dof_index(i);
    link[i] = link_transform(kin, model, i);
    const Vec6 s = joint_axis(model, i);
    const Vec6 vj = s * nu(di);
    v[i] = link[i].motion_to_child(v[p]) + vj;
    a[i] = link[i].motion_to_child(a[p]) + s * accel(di) + cross_motion(v[i], vj);
    const Mat6& ii = model.spatial_inertia(i);
    f[i] = ii * a[i] + cross_force(v[i], ii * v[i]);
  }

  VecX tau(model.num_dofs());
  for (int i = n - 1; i > 0; --i) {
    tau(RobotModel::dof_index(i)) = joint_axis(model, i).dot(f[i]);
    f[model.joints()[i].parent] += link[i].force_to_parent(f[i]);
  }
  tau.head<6>() = f[0];
  return tau;
}

VecX inverse_dynamics(const RobotModel& model, const GeneralizedState& state,
                      const VecX& accel) {
  return inverse_dynamics(model, forward_kinematics(model, state), state.velocity(), accel);
}

VecX bias_forces(const RobotModel& model, const Kinematics& kin, const VecX& nu) {
  return inverse_dynamics(model, kin, nu, VecX::Zero(model.num_dofs()));
}

VecX bias_forces(const RobotModel& model, const GeneralizedState& state) {
  return bias_forces(model, forward_kinematics(model, state), state.velocity());
}

VecX gravity_vector(const RobotModel& model, const Kinematics& kin) {
  const VecX zero = VecX::Zero(model.num_dofs());
  return inverse_dynamics(model, kin, zero, zero);
}

VecX gravity_vector(const RobotModel& model, const GeneralizedState& state) {
  return gravity_vector(model, forward_kinematics(model, state));
}

VecX forward_dynamics(const RobotModel& model, const GeneralizedState& state,
                      const VecX& generalized_force) {
  const Kinematics kin = forward_kinematics(model, state);
  const MatX m = mass_matrix(model, kin);
  return m.llt().solve(generalized_force - bias_forces(model, kin, state.velocity()));
}

double kinetic_energy(const RobotModel& model, const GeneralizedState& state) {
  const VecX nu = state.velocity();
  return 0.5 * nu.dot(mass_matrix(model, state) * nu);
}

Vec3 center_of_mass(const RobotModel& model, const Kinematics& kin) {
  Vec3 acc = Vec3::Zero();
  for (int i = 0; i < model.num_bodies(); ++i) {
    acc += model.bodies()[i].mass * kin.world[i].apply(model.bodies()[i].com);
  }
  return acc / model.total_mass();
}

double potential_energy(const RobotModel& model, const GeneralizedState& state) {
  const Kinematics kin = forward_kinematics(model, state);
  return -model.total_mass() * model.gravity().dot(center_of_mass(model, kin));
}

Vec3 linear_momentum(const RobotModel& model, const Kinematics& kin, const VecX& nu) {
  Vec3 p = Vec3::Zero();
  for (int i = 0; i < model.num_bodies(); ++i) {
    p += model.bodies()[i].mass *
         point_velocity_world(model, kin, i, model.bodies()[i].com, nu);
  }
  return p;
}

Vec3 linear_momentum(const RobotModel& model, const GeneralizedState& state) {
  return linear_momentum(model, forward_kinematics(model, state), state.velocity());
}

}  // namespace tsgait
