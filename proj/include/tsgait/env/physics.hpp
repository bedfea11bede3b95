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

#include <vector>

#include "tsgait/model/kinematics.hpp"

namespace tsgait {

struct ContactParams {
  double ground_height = 0.0;        // m
  double normal_stiffness = 5e4;     // N/m
  double normal_damping = 5e3;       // Ns/m
  double friction_coefficient = 1.0;
  double tangential_damping = 5e3;   // Ns/m

  // Throws DomainError on negative coefficients.
  void validate() const;
};

struct ContactPoint {
  int foot = 0;      // index into model.feet()
  int body = 0;
  Vec3 local;        // point in body coordinates
  Vec3 position;     // world
  Vec3 force;        // world, ground on foot
  double penetration = 0.0;
};

struct ContactResult {
  std::vector<ContactPoint> points;
  std::vector<Vec3> foot_force;  // per foot, sum over its points

  bool in_contact(int foot) const;
};

// Penalty contact on every foot contact point of the model.
ContactResult contact_forces(const RobotModel& model, const Kinematics& kin, const VecX& nu,
                             const ContactParams& params);
ContactResult contact_forces(const RobotModel& model, const GeneralizedState& state,
                             const ContactParams& params);

// Generalized force sum_k J_k^T F_k of the contact forces.
VecX contact_generalized_force(const RobotModel& model, const Kinematics& kin,
                               const ContactResult& contacts);

struct StepResult {
  GeneralizedState state;
  ContactResult contacts;  // evaluated at the start of the step
  VecX accel;              // generalized acceleration used
};

// One semi-implicit Euler step: velocities first, then positions with the new
// velocities. The base orientation advances by the exponential map of the
// new body angular velocity. `tau` holds one torque per revolute joint.
// Throws DivergenceError (carrying `step_index`) if the result is not finite.
StepResult step_physics(const RobotModel& model, const GeneralizedState& state, const VecX& tau,
                        const ContactParams& params, double dt, long step_index = 0);

// Same step given configuration-dependent terms already evaluated at `state`.
StepResult step_physics(const RobotModel& model, const GeneralizedState& state,
                        const Kinematics& kin, const MatX& mass, const VecX& tau,
                        const ContactParams& params, double dt, long step_index = 0);

// Total mechanical energy (kinetic + gravitational potential).
double total_energy(const RobotModel& model, const GeneralizedState& state);

}  // namespace tsgait
