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

#include "tsgait/model/kinematics.hpp"

namespace tsgait {

// Joint-space mass matrix M(q) by the composite-rigid-body algorithm.
MatX mass_matrix(const RobotModel& model, const GeneralizedState& state);
MatX mass_matrix(const RobotModel& model, const Kinematics& kin);

// Recursive Newton-Euler: M(q) accel + C(q, qdot) qdot + G(q).
VecX inverse_dynamics(const RobotModel& model, const GeneralizedState& state,
                      const VecX& accel);
VecX inverse_dynamics(const RobotModel& model, const Kinematics& kin, const VecX& nu,
                      const VecX& accel);

// C(q, qdot) qdot + G(q).
VecX bias_forces(const RobotModel& model, const GeneralizedState& state);
VecX bias_forces(const RobotModel& model, const Kinematics& kin, const VecX& nu);

// G(q).
VecX gravity_vector(const RobotModel& model, const GeneralizedState& state);
VecX gravity_vector(const RobotModel& model, const Kinematics& kin);

// Solves M accel = tau - bias for the generalized acceleration.
VecX forward_dynamics(const RobotModel& model, const GeneralizedState& state,
                      const VecX& generalized_force);

double kinetic_energy(const RobotModel& model, const GeneralizedState& state);
// Gravitational potential relative to the world origin.
double potential_energy(const RobotModel& model, const GeneralizedState& state);
// Total linear momentum in world coordinates.
Vec3 linear_momentum(const RobotModel& model, const GeneralizedState& state);
Vec3 linear_momentum(const RobotModel& model, const Kinematics& kin, const VecX& nu);
// Whole-body centre of mass in world coordinates.
Vec3 center_of_mass(const RobotModel& model, const Kinematics& kin);

}  // namespace tsgait
