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

#include "tsgait/model/kinematics.hpp"
#include "tsgait/refgen/gait.hpp"

namespace tsgait {

// Per-axis gains are ordered forward / lateral / vertical in the base frame.
struct TaskGains {
  Vec3 kp_swing{300.0, 150.0, 400.0};  // 1/s^2
  Vec3 kd_swing{10.0, 3.0, 10.0};      // 1/s
  Vec3 kp_stance{300.0, 150.0, 400.0}; // N/m
  Vec3 kd_stance{10.0, 3.0, 10.0};     // Ns/m
  Eigen::Vector2d kp_joint{100.0, 50.0};  // hip yaw, foot pitch; Nm/rad
  Eigen::Vector2d kd_joint{10.0, 5.0};    // Nm s/rad

  // Throws DomainError unless every gain is positive.
  void validate() const;
};

struct JointPdGains {
  VecX kp;  // per actuated joint, Nm/rad
  VecX kd;  // Nm s/rad

  static JointPdGains uniform(double kp, double kd);
};

struct ControlCommand {
  std::array<Vec3, 2> x_delta{Vec3::Zero(), Vec3::Zero()};
  // [left hip yaw, left foot pitch, right hip yaw, right foot pitch]
  Eigen::Vector4d theta_delta = Eigen::Vector4d::Zero();
  ReferenceSample reference;
};

struct TorqueCommand {
  VecX tau;  // actuated joints, Nm
  std::array<bool, 2> singular{false, false};
};

// Configuration-dependent quantities shared by both legs within one tick.
struct DynamicsContext {
  Kinematics kin;
  VecX nu;
  MatX mass;
  Eigen::LLT<MatX> mass_llt;
  VecX gravity;              // G(q)
  VecX minv_gravity;         // M^-1 G
  std::array<Mat3X, 2> jac;  // relative foot Jacobians
  std::array<Vec3, 2> foot_vel;

  DynamicsContext(const RobotModel& model, const GeneralizedState& state);
};

// Condition number above which J M^-1 J^T is treated as singular.
inline constexpr double kSingularCondition = 1e8;
inline constexpr double kLambdaRegularization = 1e-6;

struct LegTorque {
  VecX tau;  // actuated joints, zero outside the leg
  bool singular = false;
};

// Swing law: ẍ_des = Kp (x_ref + x_delta - x) - Kd ẋ and
// tau = J^T (Λ ẍ_des + Λ J M^-1 G), Λ = (J M^-1 J^T)^-1. Velocity product
// terms are dropped. When J M^-1 J^T is singular the leg falls back to the
// regularized gravity term alone.
LegTorque swing_torque(const RobotModel& model, const DynamicsContext& ctx,
                       const ControlCommand& command, Foot foot, const TaskGains& gains);
LegTorque swing_torque(const RobotModel& model, const GeneralizedState& state,
                       const ControlCommand& command, Foot foot, const TaskGains& gains);

// Desired stance force on the foot (base frame). The reference force is the
// ground reaction on the foot, so the leg pushes with its negative.
Vec3 stance_force(const DynamicsContext& ctx, const ControlCommand& command, Foot foot,
                  const TaskGains& gains);

// Stance law: tau = J^T F_des.
LegTorque stance_torque(const RobotModel& model, const DynamicsContext& ctx,
                        const ControlCommand& command, Foot foot, const TaskGains& gains);
LegTorque stance_torque(const RobotModel& model, const GeneralizedState& state,
                        const ControlCommand& command, Foot foot, const TaskGains& gains);

// phi * stance + (1 - phi) * swing. Throws DomainError for phi outside [0, 1].
VecX blend(const VecX& tau_stance, const VecX& tau_swing, double phi);

// Joint PD on hip yaw and foot pitch toward theta_ref + theta_delta.
VecX orientation_torque(const GeneralizedState& state, const ControlCommand& command,
                        const TaskGains& gains);

// Blended leg torques plus orientation torques, clamped to the model limits.
TorqueCommand compute_command(const RobotModel& model, const DynamicsContext& ctx,
                              const GeneralizedState& state, const ControlCommand& command,
                              const TaskGains& gains);
TorqueCommand compute_command(const RobotModel& model, const GeneralizedState& state,
                              const ControlCommand& command, const TaskGains& gains);

// tau_j = kp_j (ref_j + delta_j - q_j) - kd_j qdot_j, clamped to the limits.
TorqueCommand joint_pd_baseline(const RobotModel& model, const GeneralizedState& state,
                                const VecX& joint_ref, const VecX& joint_delta,
                                const JointPdGains& gains);

// Elementwise clamp to +-limits.
VecX clamp_torque(const RobotModel& model, const VecX& tau);

}  // namespace tsgait
