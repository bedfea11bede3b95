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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "tsgait/model/spatial.hpp"

namespace tsgait {

inline constexpr int kBaseDofs = 6;
inline constexpr int kLegJoints = 5;
inline constexpr int kActuated = 10;
inline constexpr int kBipedDofs = kBaseDofs + kActuated;

enum class Foot { kLeft = 0, kRight = 1 };
inline constexpr std::array<Foot, 2> kFeet{Foot::kLeft, Foot::kRight};

// Per-leg joint order, identical for both legs.
enum class LegJoint { kHipYaw = 0, kHipRoll, kHipPitch, kKnee, kFootPitch };

inline int actuated_index(Foot foot, LegJoint joint) {
  return kLegJoints * static_cast<int>(foot) + static_cast<int>(joint);
}

inline const char* foot_name(Foot f) { return f == Foot::kLeft ? "left" : "right"; }

struct RigidBody {
  std::string name;
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia = Mat3::Identity();  // about the CoM, body frame
};

enum class JointKind { kFloating, kRevolute };

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::kRevolute;
  int parent = -1;
  Vec3 axis = Vec3::UnitZ();
  SpatialTransform origin;  // joint frame in parent body frame
  double torque_limit = 0.0;
  std::string role;  // "<side>_<leg joint>" for biped layouts, free-form otherwise
};

struct FootFrame {
  int body = -1;
  Vec3 offset = Vec3::Zero();  // task-space point in the foot body frame
  std::vector<Vec3> contact_points;
};

enum class Layout { kCassieLite, kAnyTree };

class RobotModel {
 public:
  RobotModel(std::string name, std::vector<RigidBody> bodies,
             std::vector<JointSpec> joints, std::vector<FootFrame> feet,
             Vec3 gravity, Layout layout);

  const std::string& name() const { return name_; }
  const std::vector<RigidBody>& bodies() const { return bodies_; }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const std::vector<FootFrame>& feet() const { return feet_; }
  const FootFrame& foot(Foot f) const { return feet_.at(static_cast<size_t>(f)); }
  const Vec3& gravity() const { return gravity_; }
  Layout layout() const { return layout_; }

  int num_bodies() const { return static_cast<int>(bodies_.size()); }
  // Revolute joint count == generalized velocity size minus 6.
  int num_joints() const { return num_bodies() - 1; }
  int num_dofs() const { return kBaseDofs + num_joints(); }
  // Velocity index of body i's joint (i >= 1).
  static int dof_index(int body) { return kBaseDofs + body - 1; }

  double total_mass() const;
  const Mat6& spatial_inertia(int body) const { return inertia_[body]; }
  const VecX& torque_limits() const { return torque_limits_; }
  // True when body `ancestor` lies on the path from the root to `body`.
  bool is_ancestor(int ancestor, int body) const;

  // Returns a copy with gravity replaced (used by oracles and fixtures).
  RobotModel with_gravity(const Vec3& g) const;

 private:
  std::string name_;
  std::vector<RigidBody> bodies_;
  std::vector<JointSpec> joints_;
  std::vector<FootFrame> feet_;
  Vec3 gravity_;
  Layout layout_;
  std::vector<Mat6> inertia_;
  VecX torque_limits_;
};

// Parses and validates a model description document. Throws ModelError naming
// the offending field and value.
RobotModel model_from_json(const nlohmann::json& doc,
                           Layout layout = Layout::kCassieLite);
RobotModel load_model(const std::filesystem::path& path,
                      Layout layout = Layout::kCassieLite);

// Bundled default biped, compiled from models/cassie_lite.json.
const RobotModel& default_model();
const nlohmann::json& default_model_json();

// (q, qdot) of the floating-base tree.
struct GeneralizedState {
  Vec3 base_position = Vec3::Zero();
  Eigen::Quaterniond base_orientation = Eigen::Quaterniond::Identity();
  VecX joint_angles;
  Vec3 base_lin_vel = Vec3::Zero();  // world frame
  Vec3 base_ang_vel = Vec3::Zero();  // body frame
  VecX joint_rates;

  static GeneralizedState zero(const RobotModel& model);

  Mat3 base_rotation() const { return base_orientation.toRotationMatrix(); }
  // Generalized velocity [omega_body; v_body; joint rates].
  VecX velocity() const;
  void set_velocity(const VecX& nu);
  // Normalizes the quaternion and flips it to w >= 0.
  void canonicalize();
  bool finite() const;
};

Eigen::Quaterniond canonical(const Eigen::Quaterniond& q);

}  // namespace tsgait
