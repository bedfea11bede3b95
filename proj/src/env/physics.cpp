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

#include "tsgait/env/physics.hpp"

#include <cmath>
#include <sstream>

#include "tsgait/error.hpp"
#include "tsgait/model/dynamics.hpp"

namespace tsgait {

void ContactParams::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0)) {
      std::ostringstream os;
      os << "contact." << name << " = " << v << " violates >= 0";
      throw DomainError(os.str());
    }
  };
  nonneg(normal_stiffness, "normal_stiffness");
  nonneg(normal_damping, "normal_damping");
  nonneg(friction_coefficient, "friction_coefficient");
  nonneg(tangential_damping, "tangential_damping");
}

bool ContactResult::in_contact(int foot) const {
  for (const ContactPoint& p : points) {
    if (p.foot == foot && p.penetration > 0.0) return true;
  }
  return false;
}

ContactResult contact_forces(const RobotModel& model, const Kinematics& kin, const VecX& nu,
                             const ContactParams& params) {
  ContactResult out;
  out.foot_force.assign(model.feet().size(), Vec3::Zero());
  for (size_t f = 0; f < model.feet().size(); ++f) {
    const FootFrame& ff = model.feet()[f];
    for (const Vec3& local : ff.contact_points) {
      ContactPoint c;
      c.foot = static_cast<int>(f);
      c.body = ff.body;
      c.local = local;
      c.position = kin.world[ff.body].apply(local);
      c.force.setZero();
      c.penetration = params.ground_height - c.position.z();
      if (c.penetration > 0.0) {
        const Vec3 v = point_velocity_world(model, kin, ff.body, local, nu);
        const double normal =
            std::max(0.0, params.normal_stiffness * c.penetration -
                              params.normal_damping * v.z());
        Vec3 tangential(-params.tangential_damping * v.x(), -params.tangential_damping * v.y(),
                        0.0);
        const double cap = params.friction_coefficient * normal;
        const double mag = tangential.norm();
        if (mag > cap) tangential *= cap / mag;
        c.force = tangential + Vec3(0.0, 0.0, normal);
        out.foot_force[f] += c.force;
      }
      out.points.push_back(c);
    }
  }
  return out;
}

ContactResult contact_forces(const RobotModel& model, const GeneralizedState& state,
                             const ContactParams& params) {
  return contact_forces(model, forward_kinematics(model, state), state.velocity(), params);
}

VecX contact_generalized_force(const RobotModel& model, const Kinematics& kin,
                               const ContactResult& contacts) {
  VecX gen = VecX::Zero(model.num_dofs());
  for (const ContactPoint& c : contacts.points) {
    if (c.penetration <= 0.0) continue;
    gen += point_jacobian_world(model, kin, c.body, c.local).transpose() * c.force;
  }
  return gen;
}

StepResult step_physics(const RobotModel& model, const GeneralizedState& state, const VecX& tau,
                        const ContactParams& params, double dt, long step_index) {
  const Kinematics kin = forward_kinematics(model, state);
  return step_physics(model, state, kin, mass_matrix(model, kin), tau, params, dt, step_index);
}

StepResult step_physics(const RobotModel& model, const GeneralizedState& state,
                        const Kinematics& kin, const MatX& mass, const VecX& tau,
                        const ContactParams& params, double dt, long step_index) {
  const VecX nu = state.velocity();
  StepResult out;
  out.contacts = contact_forces(model, kin, nu, params);

  VecX rhs = contact_generalized_force(model, kin, out.contacts) - bias_forces(model, kin, nu);
  rhs.tail(model.num_joints()) += tau;
  out.accel = mass.llt().solve(rhs);

  // Base linear acceleration in body coordinates excludes the transport term
  // omega x v of the rotating frame; the world velocity picks it back up.
  const Mat3 rot = kin.base().rot;
  const Vec3 omega = nu.head<3>();
  const Vec3 v_body = nu.segment<3>(3);
  const Vec3 a_world = rot * (out.accel.segment<3>(3) + omega.cross(v_body));

  GeneralizedState& next = out.state;
  next = state;
  next.base_ang_vel = omega + dt * out.accel.head<3>();
  next.base_lin_vel = state.base_lin_vel + dt * a_world;
  next.joint_rates = state.joint_rates + dt * out.accel.tail(model.num_joints());

  next.base_position = state.base_position + dt * next.base_lin_vel;
  next.joint_angles = state.joint_angles + dt * next.joint_rates;
  const Vec3 w = dt * next.base_ang_vel;
  const double angle = w.norm();
  Eigen::Quaterniond dq = Eigen::Quaterniond::Identity();
  if (angle > 0.0) dq = Eigen::Quaterniond(Eigen::AngleAxisd(angle, w / angle));
  next.base_orientation = state.base_orientation * dq;
  next.canonicalize();

  // Project the base velocity so world linear momentum follows the external
  // impulse exactly; plain semi-implicit Euler leaks O(dt^2) per step.
  Vec3 external = model.total_mass() * model.gravity();
  for (const Vec3& f : out.contacts.foot_force) external += f;
  const Vec3 target = linear_momentum(model, kin, nu) + dt * external;
  const Vec3 reached =
      linear_momentum(model, forward_kinematics(model, next), next.velocity());
  next.base_lin_vel += (target - reached) / model.total_mass();

  if (!next.finite()) {
    std::ostringstream os;
    os << "simulation diverged at step " << step_index;
    throw DivergenceError(os.str(), step_index);
  }
  return out;
}

double total_energy(const RobotModel& model, const GeneralizedState& state) {
  return kinetic_energy(model, state) + potential_energy(model, state);
}

}  // namespace tsgait
