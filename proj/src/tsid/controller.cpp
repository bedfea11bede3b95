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

#include "tsgait/tsid/controller.hpp"

#include <sstream>

#include "tsgait/error.hpp"
#include "tsgait/model/dynamics.hpp"

namespace tsgait {
namespace {

VecX actuated(const VecX& generalized) { return generalized.tail(kActuated); }

// Orientation joints in theta order.
constexpr std::array<std::pair<Foot, LegJoint>, 4> kOrientJoints{{
    {Foot::kLeft, LegJoint::kHipYaw},
    {Foot::kLeft, LegJoint::kFootPitch},
    {Foot::kRight, LegJoint::kHipYaw},
    {Foot::kRight, LegJoint::kFootPitch},
}};

}  // namespace

void TaskGains::validate() const {
  auto positive = [](const auto& v, const char* name) {
    if (!(v.array() > 0.0).all()) {
      std::ostringstream os;
      os << "controller." << name << " = [" << v.transpose() << "] violates gains > 0";
      throw DomainError(os.str());
    }
  };
  positive(kp_swing, "kp_swing");
  positive(kd_swing, "kd_swing");
  positive(kp_stance, "kp_stance");
  positive(kd_stance, "kd_stance");
  positive(kp_joint, "kp_joint");
  positive(kd_joint, "kd_joint");
}

JointPdGains JointPdGains::uniform(double kp, double kd) {
  return {VecX::Constant(kActuated, kp), VecX::Constant(kActuated, kd)};
}

DynamicsContext::DynamicsContext(const RobotModel& model, const GeneralizedState& state)
    : kin(forward_kinematics(model, state)), nu(state.velocity()) {
  mass = mass_matrix(model, kin);
  mass_llt.compute(mass);
  gravity = gravity_vector(model, kin);
  minv_gravity = mass_llt.solve(gravity);
  for (Foot f : kFeet) {
    const int i = static_cast<int>(f);
    jac[i] = foot_jacobian(model, kin, f);
    foot_vel[i] = jac[i] * nu;
  }
}

LegTorque swing_torque(const RobotModel& model, const DynamicsContext& ctx,
                       const ControlCommand& command, Foot foot, const TaskGains& gains) {
  (void)model;
  const int i = static_cast<int>(foot);
  const Mat3X& j = ctx.jac[i];
  const Vec3 target = command.reference.x_ref[i] + command.x_delta[i];
  const Vec3 xdd = gains.kp_swing.cwiseProduct(target - ctx.kin.foot_relative[i]) -
                   gains.kd_swing.cwiseProduct(ctx.foot_vel[i]);

  const MatX minv_jt = ctx.mass_llt.solve(MatX(j.transpose()));
  const Mat3 a = j * minv_jt;
  const Vec3 jg = j * ctx.minv_gravity;

  Eigen::SelfAdjointEigenSolver<Mat3> eig(a, Eigen::EigenvaluesOnly);
  const Vec3 ev = eig.eigenvalues();
  const bool singular = !(ev(0) > 0.0) || ev(2) / ev(0) > kSingularCondition;

  LegTorque out;
  out.singular = singular;
  if (singular) {
    const Mat3 lambda = (a + kLambdaRegularization * Mat3::Identity()).inverse();
    out.tau = actuated(j.transpose() * (lambda * jg));
  } else {
    const Eigen::LDLT<Mat3> ldlt(a);
    out.tau = actuated(j.transpose() * ldlt.solve(xdd + jg));
  }
  return out;
}

LegTorque swing_torque(const RobotModel& model, const GeneralizedState& state,
                       const ControlCommand& command, Foot foot, const TaskGains& gains) {
  return swing_torque(model, DynamicsContext(model, state), command, foot, gains);
}

Vec3 stance_force(const DynamicsContext& ctx, const ControlCommand& command, Foot foot,
                  const TaskGains& gains) {
  const int i = static_cast<int>(foot);
  const Vec3 target = command.reference.x_ref[i] + command.x_delta[i];
  return gains.kp_stance.cwiseProduct(target - ctx.kin.foot_relative[i]) -
         gains.kd_stance.cwiseProduct(ctx.foot_vel[i]) - command.reference.F_ref[i];
}

LegTorque stance_torque(const RobotModel& model, const DynamicsContext& ctx,
                        const ControlCommand& command, Foot foot, const TaskGains& gains) {
  (void)model;
  const int i = static_cast<int>(foot);
  return {actuated(ctx.jac[i].transpose() * stance_force(ctx, command, foot, gains)), false};
}

LegTorque stance_torque(const RobotModel& model, const GeneralizedState& state,
                        const ControlCommand& command, Foot foot, const TaskGains& gains) {
  return stance_torque(model, DynamicsContext(model, state), command, foot, gains);
}

VecX blend(const VecX& tau_stance, const VecX& tau_swing, double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) {
    std::ostringstream os;
    os << "transition weight " << phi << " outside [0, 1]";
    throw DomainError(os.str());
  }
  if (phi == 1.0) return tau_stance;
  if (phi == 0.0) return tau_swing;
  return phi * tau_stance + (1.0 - phi) * tau_swing;
}

VecX orientation_torque(const GeneralizedState& state, const ControlCommand& command,
                        const TaskGains& gains) {
  VecX tau = VecX::Zero(kActuated);
  for (int k = 0; k < 4; ++k) {
    const int j = actuated_index(kOrientJoints[k].first, kOrientJoints[k].second);
    const int family = k % 2;
    const double target = command.reference.theta_ref(k) + command.theta_delta(k);
    tau(j) = gains.kp_joint(family) * (target - state.joint_angles(j)) -
             gains.kd_joint(family) * state.joint_rates(j);
  }
  return tau;
}

VecX clamp_torque(const RobotModel& model, const VecX& tau) {
  const VecX& lim = model.torque_limits();
  return tau.cwiseMax(-lim).cwiseMin(lim);
}

TorqueCommand compute_command(const RobotModel& model, const DynamicsContext& ctx,
                              const GeneralizedState& state, const ControlCommand& command,
                              const TaskGains& gains) {
  TorqueCommand out;
  VecX tau = orientation_torque(state, command, gains);
  for (Foot f : kFeet) {
    const int i = static_cast<int>(f);
    const double phi = command.reference.phi[i];
    // Skip the law whose weight is zero; swing needs a 3x3 factorization.
    const LegTorque st = phi > 0.0 ? stance_torque(model, ctx, command, f, gains)
                                   : LegTorque{VecX::Zero(kActuated), false};
    const LegTorque sw = phi < 1.0 ? swing_torque(model, ctx, command, f, gains)
                                   : LegTorque{VecX::Zero(kActuated), false};
    tau += blend(st.tau, sw.tau, phi);
    out.singular[i] = sw.singular;
  }
  out.tau = clamp_torque(model, tau);
  return out;
}

TorqueCommand compute_command(const RobotModel& model, const GeneralizedState& state,
                              const ControlCommand& command, const TaskGains& gains) {
  return compute_command(model, DynamicsContext(model, state), state, command, gains);
}

TorqueCommand joint_pd_baseline(const RobotModel& model, const GeneralizedState& state,
                                const VecX& joint_ref, const VecX& joint_delta,
                                const JointPdGains& gains) {
  const VecX err = joint_ref + joint_delta - state.joint_angles;
  const VecX tau =
      gains.kp.cwiseProduct(err) - gains.kd.cwiseProduct(state.joint_rates);
  return {clamp_torque(model, tau), {false, false}};
}

}  // namespace tsgait
