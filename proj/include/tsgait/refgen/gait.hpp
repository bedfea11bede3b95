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
#include <ostream>
#include <utility>

#include "tsgait/model/robot_model.hpp"

namespace tsgait {

// Parameters of the analytic periodic walking reference.
//
// Each foot runs the same local cycle shifted by half a period. In local
// phase s the foot is in stance on [0, 0.5 + d) and swings on [0.5 + d, 1),
// d = double_support_fraction. The transition weight ramps up on [0, d)
// (touchdown) and down on [0.5, 0.5 + d) (toe-off).
struct GaitParams {
  double cycle_period = 0.8;            // s
  double double_support_fraction = 0.1;
  double swing_apex = 0.15;             // m above stance ground level
  double speed_min = 0.0;               // m/s
  double speed_max = 1.0;
  double base_height_ref = 0.95;        // m
  double total_mass = 33.0;             // kg
  double lateral_offset = 0.1;          // m, left foot +y, right foot -y
  // Peak horizontal stance force per unit commanded speed, as a fraction of
  // body weight.
  double horizontal_force_gain = 0.15;
  double gravity = 9.81;
  // Neutral hip-yaw and foot-pitch angles (theta_ref).
  double neutral_hip_yaw = 0.0;
  double neutral_foot_pitch = 0.0;

  double stance_fraction() const { return 0.5 + double_support_fraction; }
  // Throws DomainError when an invariant fails.
  void validate() const;
};

// Fills total_mass and gravity from the model and solves the flat-foot
// neutral foot pitch at the nominal stance posture.
GaitParams default_gait_params(const RobotModel& model);

// Fraction through one gait cycle, always in [0, 1).
class CyclePhase {
 public:
  CyclePhase() = default;
  explicit CyclePhase(double value);
  double value() const { return value_; }
  // Advances by dt / period and wraps.
  CyclePhase advanced(double dt, double period) const;

 private:
  double value_ = 0.0;
};

struct ReferenceSample {
  double phase = 0.0;
  std::array<Vec3, 2> x_ref{Vec3::Zero(), Vec3::Zero()};  // foot relative to base, base frame
  std::array<Vec3, 2> F_ref{Vec3::Zero(), Vec3::Zero()};  // ground reaction force on each foot
  std::array<double, 2> phi{};
  double base_xvel_ref = 0.0;
  double base_zvel_ref = 0.0;
  double base_zpos_ref = 0.0;
  // [left hip yaw, left foot pitch, right hip yaw, right foot pitch]
  Eigen::Vector4d theta_ref = Eigen::Vector4d::Zero();
};

// Throws DomainError for speeds outside [speed_min, speed_max].
ReferenceSample sample(const GaitParams& params, double speed, CyclePhase phase);

double transition_weight(const GaitParams& params, CyclePhase phase, Foot foot);

// Phase of one foot's own cycle; the right foot lags by half a period.
double foot_local_phase(CyclePhase phase, Foot foot);

std::pair<double, double> phase_encoding(CyclePhase phase);

// Joint angles whose foot positions reproduce x_ref, with hip yaw and foot
// pitch pinned to theta_ref. Solved per leg by damped least squares from
// `seed` (or a bent-knee default). Throws WorkspaceError when the residual
// stays above 1e-3 m.
VecX joint_reference(const RobotModel& model, const ReferenceSample& sample);
VecX joint_reference(const RobotModel& model, const ReferenceSample& sample,
                     const VecX& seed);

struct IkResult {
  VecX joint_angles;
  std::array<double, 2> residual{};
  int iterations = 0;
};

// Unchecked solver used by joint_reference.
IkResult solve_feet_ik(const RobotModel& model, const std::array<Vec3, 2>& targets,
                       const Eigen::Vector4d& pinned, const VecX& seed);

// Bent-knee posture used as the default IK seed.
VecX nominal_joint_seed(const RobotModel& model);

// One full cycle sampled at rate_hz, one CSV row per sample. Returns the row
// count (rate_hz * cycle_period, rounded).
int write_reference_cycle(std::ostream& out, const GaitParams& params, double speed,
                          double rate_hz);

}  // namespace tsgait
