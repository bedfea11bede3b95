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

#include "tsgait/refgen/gait.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tsgait/error.hpp"
#include "tsgait/model/kinematics.hpp"

namespace tsgait {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double v) {
  double w = v - std::floor(v);
  return w >= 1.0 ? 0.0 : w;
}

double local_phase(double phase, Foot foot) {
  return wrap(phase + (foot == Foot::kRight ? 0.5 : 0.0));
}

// Minimum-jerk rise 0 -> 1 on t in [0, 1].
double min_jerk(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }

// Quintic Hermite with zero end accelerations.
double hermite5(double p0, double v0, double p1, double v1, double u) {
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  const double h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
  const double h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
  const double h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
  const double h5 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
  return p0 * h0 + v0 * h1 + v1 * h4 + p1 * h5;
}

double weight_local(double s, double d) {
  if (d <= 0.0) return s < 0.5 ? 1.0 : 0.0;
  if (s < d) return s / d;
  if (s < 0.5) return 1.0;
  if (s < 0.5 + d) return 1.0 - (s - 0.5) / d;
  return 0.0;
}

int leg_body(Foot f, LegJoint j) { return actuated_index(f, j) + 1; }

}  // namespace

void GaitParams::validate() const {
  auto bad = [](const std::string& field, double v, const char* rule) {
    std::ostringstream os;
    os << "gait." << field << " = " << v << " violates " << rule;
    throw DomainError(os.str());
  };
  if (!(cycle_period > 0.0)) bad("cycle_period", cycle_period, "cycle_period > 0");
  if (!(double_support_fraction >= 0.0 && double_support_fraction < 0.3)) {
    bad("double_support_fraction", double_support_fraction, "0 <= d < 0.3");
  }
  if (!(swing_apex > 0.0)) bad("swing_apex", swing_apex, "swing_apex > 0");
  if (!(speed_max >= speed_min)) bad("speed_max", speed_max, "speed_max >= speed_min");
  if (!(base_height_ref > 0.0)) bad("base_height_ref", base_height_ref, "> 0");
  if (!(total_mass > 0.0)) bad("total_mass", total_mass, "> 0");
}

GaitParams default_gait_params(const RobotModel& model) {
  GaitParams p;
  p.total_mass = model.total_mass();
  p.gravity = -model.gravity().z();
  const std::array<Vec3, 2> targets{Vec3(0.0, p.lateral_offset, -p.base_height_ref),
                                    Vec3(0.0, -p.lateral_offset, -p.base_height_ref)};
  VecX q = nominal_joint_seed(model);
  double pitch = 0.0;
  for (int it = 0; it < 50; ++it) {
    const IkResult r = solve_feet_ik(model, targets, Eigen::Vector4d(0.0, pitch, 0.0, pitch), q);
    q = r.joint_angles;
    const int hp = actuated_index(Foot::kLeft, LegJoint::kHipPitch);
    const int kn = actuated_index(Foot::kLeft, LegJoint::kKnee);
    const double next = -(q(hp) + q(kn));
    if (std::abs(next - pitch) < 1e-13) break;
    pitch = next;
  }
  p.neutral_foot_pitch = pitch;
  return p;
}

CyclePhase::CyclePhase(double value) : value_(wrap(value)) {}

CyclePhase CyclePhase::advanced(double dt, double period) const {
  return CyclePhase(value_ + dt / period);
}

double foot_local_phase(CyclePhase phase, Foot foot) {
  return local_phase(phase.value(), foot);
}

double transition_weight(const GaitParams& params, CyclePhase phase, Foot foot) {
  return weight_local(local_phase(phase.value(), foot), params.double_support_fraction);
}

std::pair<double, double> phase_encoding(CyclePhase phase) {
  const double a = kTwoPi * phase.value();
  return {std::sin(a), std::cos(a)};
}

ReferenceSample sample(const GaitParams& params, double speed, CyclePhase phase) {
  if (!(speed >= params.speed_min && speed <= params.speed_max)) {
    std::ostringstream os;
    os << "speed " << speed << " outside [" << params.speed_min << ", " << params.speed_max
       << "]";
    throw DomainError(os.str());
  }
  const double period = params.cycle_period;
  const double tau = params.stance_fraction();
  const double weight = params.total_mass * params.gravity;
  const double amplitude = weight / tau;  // impulse balance over two feet
  const double stroke = speed * period * tau;

  ReferenceSample out;
  out.phase = phase.value();
  for (Foot f : kFeet) {
    const int i = static_cast<int>(f);
    const double s = local_phase(phase.value(), f);
    const double side = f == Foot::kLeft ? 1.0 : -1.0;
    Vec3 x(0.0, side * params.lateral_offset, -params.base_height_ref);
    Vec3 force = Vec3::Zero();
    if (s < tau) {
      const double u = s / tau;
      x.x() = -speed * period * (s - 0.5 * tau);
      force.z() = 0.5 * amplitude * (1.0 - std::cos(kTwoPi * u));
      force.x() = -params.horizontal_force_gain * weight * speed * std::sin(kTwoPi * u);
    } else {
      const double u = (s - tau) / (1.0 - tau);
      const double v = -speed * period * (1.0 - tau);  // d x / d u at both ends
      x.x() = hermite5(-0.5 * stroke, v, 0.5 * stroke, v, u);
      const double rise = u < 0.5 ? min_jerk(2.0 * u) : min_jerk(2.0 * (1.0 - u));
      x.z() += params.swing_apex * rise;
    }
    out.x_ref[i] = x;
    out.F_ref[i] = force;
    out.phi[i] = weight_local(s, params.double_support_fraction);
  }
  out.base_xvel_ref = speed;
  out.base_zvel_ref = 0.0;
  out.base_zpos_ref = params.base_height_ref;
  out.theta_ref << params.neutral_hip_yaw, params.neutral_foot_pitch, params.neutral_hip_yaw,
      params.neutral_foot_pitch;
  return out;
}

VecX nominal_joint_seed(const RobotModel& model) {
  VecX q = VecX::Zero(model.num_joints());
  for (Foot f : kFeet) {
    q(actuated_index(f, LegJoint::kHipPitch)) = -0.3;
    q(actuated_index(f, LegJoint::kKnee)) = 0.6;
    q(actuated_index(f, LegJoint::kFootPitch)) = -0.3;
  }
  return q;
}

IkResult solve_feet_ik(const RobotModel& model, const std::array<Vec3, 2>& targets,
                       const Eigen::Vector4d& pinned, const VecX& seed) {
  constexpr int kMaxIter = 100;
  constexpr double kDamping2 = 1e-8;
  IkResult out;
  out.joint_angles = seed;
  VecX& q = out.joint_angles;
  for (Foot f : kFeet) {
    const int i = static_cast<int>(f);
    q(actuated_index(f, LegJoint::kHipYaw)) = pinned(2 * i);
    q(actuated_index(f, LegJoint::kFootPitch)) = pinned(2 * i + 1);
  }
  const std::array<LegJoint, 3> free{LegJoint::kHipRoll, LegJoint::kHipPitch, LegJoint::kKnee};
  for (Foot f : kFeet) {
    const int i = static_cast<int>(f);
    for (int it = 0; it < kMaxIter; ++it) {
      const Kinematics kin = forward_kinematics(model, q);
      const Vec3 err = targets[i] - kin.foot_relative[i];
      out.residual[i] = err.norm();
      if (out.residual[i] < 1e-13) break;
      const Mat3X jac = foot_jacobian(model, kin, f);
      Mat3 j;
      for (int c = 0; c < 3; ++c) {
        j.col(c) = jac.col(RobotModel::dof_index(leg_body(f, free[c])));
      }
      const Vec3 step =
          j.transpose() * (j * j.transpose() + kDamping2 * Mat3::Identity()).ldlt().solve(err);
      for (int c = 0; c < 3; ++c) q(actuated_index(f, free[c])) += step(c);
      out.iterations = std::max(out.iterations, it + 1);
    }
    out.residual[i] = (targets[i] - forward_kinematics(model, q).foot_relative[i]).norm();
  }
  return out;
}

VecX joint_reference(const RobotModel& model, const ReferenceSample& sample) {
  return joint_reference(model, sample, nominal_joint_seed(model));
}

VecX joint_reference(const RobotModel& model, const ReferenceSample& sample,
                     const VecX& seed) {
  const IkResult r = solve_feet_ik(model, sample.x_ref, sample.theta_ref, seed);
  for (Foot f : kFeet) {
    const double res = r.residual[static_cast<int>(f)];
    if (!(res <= 1e-3)) {
      std::ostringstream os;
      os << foot_name(f) << " foot target unreachable at phase " << sample.phase
         << " (residual " << res << " m)";
      throw WorkspaceError(os.str());
    }
  }
  return r.joint_angles;
}

}  // namespace tsgait
