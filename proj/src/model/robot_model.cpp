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

#include "tsgait/model/robot_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tsgait/error.hpp"

namespace tsgait {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ModelError(field + ": " + msg);
}

template <typename T>
std::string str(const T& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string vec_str(const Vec3& v) {
  std::ostringstream os;
  os << "[" << v.x() << ", " << v.y() << ", " << v.z() << "]";
  return os.str();
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) fail(where + "." + key, "missing");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number, got " + v.dump());
  return v.get<double>();
}

Vec3 vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where, "expected a 3-vector, got " + v.dump());
  return {number(v[0], where), number(v[1], where), number(v[2], where)};
}

Mat3 mat3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where, "expected a 3x3 matrix");
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = vec3(v[r], where).transpose();
  return m;
}

Mat3 rpy_rotation(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

void check_body(const RigidBody& b, const std::string& where) {
  if (!(b.mass > 0.0) || !std::isfinite(b.mass)) {
    fail(where + ".mass", "= " + str(b.mass) + " violates mass > 0");
  }
  if (!b.com.allFinite()) fail(where + ".com", "non-finite");
  const double scale = std::max(1.0, b.inertia.cwiseAbs().maxCoeff());
  if ((b.inertia - b.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    fail(where + ".inertia", "not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(b.inertia);
  const Vec3 p = eig.eigenvalues();  // ascending
  if (!(p.minCoeff() > 0.0)) {
    fail(where + ".inertia", "not positive definite (min principal moment " +
                                 str(p.minCoeff()) + ")");
  }
  if (p(0) + p(1) < p(2) * (1.0 - 1e-12)) {
    fail(where + ".inertia", "principal moments " + vec_str(p) +
                                 " violate the triangle inequality");
  }
}

constexpr std::array<const char*, kLegJoints> kLegRoles{
    "hip_yaw", "hip_roll", "hip_pitch", "knee", "foot_pitch"};

void check_cassie_layout(const std::vector<RigidBody>& bodies,
                         const std::vector<JointSpec>& joints,
                         const std::vector<FootFrame>& feet) {
  const int actuated = static_cast<int>(joints.size()) - 1;
  if (actuated != kActuated) {
    fail("joints", "Cassie-lite layout needs 10 actuated joints, found " + str(actuated));
  }
  for (Foot f : kFeet) {
    for (int k = 0; k < kLegJoints; ++k) {
      const int body = 1 + actuated_index(f, static_cast<LegJoint>(k));
      const std::string role = std::string(foot_name(f)) + "_" + kLegRoles[k];
      const JointSpec& j = joints[body];
      if (j.role != role) {
        fail("joints[" + str(body) + "].role",
             "= '" + j.role + "', Cassie-lite layout expects '" + role + "'");
      }
      const int expected_parent = k == 0 ? 0 : body - 1;
      if (j.parent != expected_parent) {
        fail("joints[" + str(body) + "].parent",
             "= " + str(j.parent) + ", leg chain expects " + str(expected_parent));
      }
    }
  }
  if (feet.size() != 2) fail("feet", "left and right foot frames required");
  for (Foot f : kFeet) {
    const int expected = 1 + actuated_index(f, LegJoint::kFootPitch);
    if (feet[static_cast<int>(f)].body != expected) {
      fail(std::string("feet.") + foot_name(f) + ".body",
           "must be the foot-pitch link '" + bodies[expected].name + "'");
    }
  }
}

}  // namespace

RobotModel::RobotModel(std::string name, std::vector<RigidBody> bodies,
                       std::vector<JointSpec> joints, std::vector<FootFrame> feet,
                       Vec3 gravity, Layout layout)
    : name_(std::move(name)),
      bodies_(std::move(bodies)),
      joints_(std::move(joints)),
      feet_(std::move(feet)),
      gravity_(gravity),
      layout_(layout) {
  if (bodies_.empty()) fail("bodies", "empty");
  if (bodies_.size() != joints_.size()) {
    fail("joints", "length " + str(joints_.size()) + " != bodies length " +
                       str(bodies_.size()));
  }
  for (size_t i = 0; i < bodies_.size(); ++i) {
    check_body(bodies_[i], "bodies[" + str(i) + "]");
  }
  if (joints_[0].kind != JointKind::kFloating) {
    fail("joints[0].kind", "root joint must be floating-base");
  }
  for (size_t i = 1; i < joints_.size(); ++i) {
    const JointSpec& j = joints_[i];
    const std::string where = "joints[" + str(i) + "]";
    if (j.kind == JointKind::kFloating) {
      fail(where, "'" + j.name + "' is a second floating-base joint; exactly one allowed");
    }
    if (j.parent < 0 || j.parent >= static_cast<int>(i)) {
      fail(where + ".parent", "= " + str(j.parent) + " breaks topological order");
    }
    if (std::abs(j.axis.norm() - 1.0) > 1e-12) {
      fail(where + ".axis", "= " + vec_str(j.axis) + " is not unit norm");
    }
    if (!(j.torque_limit > 0.0)) {
      fail(where + ".torque_limit", "= " + str(j.torque_limit) + " must be > 0");
    }
  }
  for (size_t f = 0; f < feet_.size(); ++f) {
    if (feet_[f].body <= 0 || feet_[f].body >= num_bodies()) {
      fail("feet[" + str(f) + "].body", "out of range");
    }
  }
  if (!gravity_.allFinite()) fail("gravity", "non-finite");
  if (layout_ == Layout::kCassieLite) check_cassie_layout(bodies_, joints_, feet_);

  inertia_.reserve(bodies_.size());
  for (const RigidBody& b : bodies_) {
    inertia_.push_back(tsgait::spatial_inertia(b.mass, b.com, b.inertia));
  }
  torque_limits_.resize(num_joints());
  for (int i = 1; i < num_bodies(); ++i) torque_limits_(i - 1) = joints_[i].torque_limit;
}

double RobotModel::total_mass() const {
  double m = 0.0;
  for (const RigidBody& b : bodies_) m += b.mass;
  return m;
}

bool RobotModel::is_ancestor(int ancestor, int body) const {
  for (int b = body; b >= 0; b = joints_[b].parent) {
    if (b == ancestor) return true;
    if (b == 0) break;
  }
  return false;
}

RobotModel RobotModel::with_gravity(const Vec3& g) const {
  RobotModel copy = *this;
  copy.gravity_ = g;
  return copy;
}

RobotModel model_from_json(const json& doc, Layout layout) {
  if (!doc.is_object()) fail("<root>", "expected an object");
  const json& version = require(doc, "format_version", "<root>");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    fail("format_version", "= " + version.dump() + ", supported: 1");
  }
  const std::string name = doc.value("name", std::string("unnamed"));
  const Vec3 gravity =
      doc.contains("gravity") ? vec3(doc["gravity"], "gravity") : Vec3(0.0, 0.0, -9.81);

  const json& jb = require(doc, "bodies", "<root>");
  const json& jj = require(doc, "joints", "<root>");
  if (!jb.is_array() || !jj.is_array()) fail("bodies/joints", "expected arrays");

  std::vector<RigidBody> bodies;
  std::map<std::string, int> index;
  for (size_t i = 0; i < jb.size(); ++i) {
    const std::string where = "bodies[" + str(i) + "]";
    RigidBody b;
    b.name = jb[i].value("name", "body" + str(i));
    b.mass = number(require(jb[i], "mass", where), where + ".mass");
    b.com = jb[i].contains("com") ? vec3(jb[i]["com"], where + ".com") : Vec3::Zero();
    b.inertia = mat3(require(jb[i], "inertia", where), where + ".inertia");
    index[b.name] = static_cast<int>(i);
    bodies.push_back(std::move(b));
  }

  std::vector<JointSpec> joints;
  for (size_t i = 0; i < jj.size(); ++i) {
    const std::string where = "joints[" + str(i) + "]";
    const json& e = jj[i];
    JointSpec j;
    j.name = e.value("name", "joint" + str(i));
    j.role = e.value("role", std::string());
    const std::string kind = require(e, "kind", where).get<std::string>();
    if (kind == "floating") {
      j.kind = JointKind::kFloating;
      j.parent = -1;
    } else if (kind == "revolute") {
      j.kind = JointKind::kRevolute;
      const json& p = require(e, "parent", where);
      if (p.is_string()) {
        auto it = index.find(p.get<std::string>());
        if (it == index.end()) fail(where + ".parent", "unknown body '" + p.get<std::string>() + "'");
        j.parent = it->second;
      } else {
        j.parent = static_cast<int>(number(p, where + ".parent"));
      }
      j.axis = vec3(require(e, "axis", where), where + ".axis");
      if (e.contains("origin")) {
        const json& o = e["origin"];
        j.origin.pos = o.contains("xyz") ? vec3(o["xyz"], where + ".origin.xyz") : Vec3::Zero();
        j.origin.rot = o.contains("rpy") ? rpy_rotation(vec3(o["rpy"], where + ".origin.rpy"))
                                         : Mat3::Identity();
      }
      j.torque_limit = number(require(e, "torque_limit", where), where + ".torque_limit");
    } else {
      fail(where + ".kind", "unknown joint kind '" + kind + "'");
    }
    joints.push_back(std::move(j));
  }

  std::vector<FootFrame> feet;
  if (doc.contains("feet")) {
    for (const char* side : {"left", "right"}) {
      const std::string where = std::string("feet.") + side;
      const json& e = require(doc["feet"], side, "feet");
      FootFrame ff;
      const std::string body = require(e, "body", where).get<std::string>();
      auto it = index.find(body);
      if (it == index.end()) fail(where + ".body", "unknown body '" + body + "'");
      ff.body = it->second;
      ff.offset = e.contains("offset") ? vec3(e["offset"], where + ".offset") : Vec3::Zero();
      if (e.contains("contact_points")) {
        for (const json& c : e["contact_points"]) {
          ff.contact_points.push_back(vec3(c, where + ".contact_points"));
        }
      }
      feet.push_back(std::move(ff));
    }
  }
  return RobotModel(name, std::move(bodies), std::move(joints), std::move(feet),
                    gravity, layout);
}

RobotModel load_model(const std::filesystem::path& path, Layout layout) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelError("parse failure in " + path.string() + ": " + e.what());
  }
  return model_from_json(doc, layout);
}

GeneralizedState GeneralizedState::zero(const RobotModel& model) {
  GeneralizedState s;
  s.joint_angles = VecX::Zero(model.num_joints());
  s.joint_rates = VecX::Zero(model.num_joints());
  return s;
}

VecX GeneralizedState::velocity() const {
  VecX nu(kBaseDofs + joint_rates.size());
  nu.head<3>() = base_ang_vel;
  nu.segment<3>(3) = base_rotation().transpose() * base_lin_vel;
  nu.tail(joint_rates.size()) = joint_rates;
  return nu;
}

void GeneralizedState::set_velocity(const VecX& nu) {
  base_ang_vel = nu.head<3>();
  base_lin_vel = base_rotation() * nu.segment<3>(3);
  joint_rates = nu.tail(nu.size() - kBaseDofs);
}

Eigen::Quaterniond canonical(const Eigen::Quaterniond& q) {
  Eigen::Quaterniond n = q.normalized();
  if (n.w() < 0.0) n.coeffs() = -n.coeffs();
  return n;
}

void GeneralizedState::canonicalize() { base_orientation = canonical(base_orientation); }

bool GeneralizedState::finite() const {
  return base_position.allFinite() && base_orientation.coeffs().allFinite() &&
         joint_angles.allFinite() && base_lin_vel.allFinite() &&
         base_ang_vel.allFinite() && joint_rates.allFinite();
}

}  // namespace tsgait
