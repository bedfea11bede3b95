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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "support/oracles.hpp"
#include "tsgait/error.hpp"
#include "tsgait/model/kinematics.hpp"
#include "tsgait/refgen/gait.hpp"

using namespace tsgait;

namespace {

const GaitParams& params() {
  static const GaitParams p = default_gait_params(default_model());
  return p;
}

}  // namespace

TEST_CASE("transition weight endpoints and ramps") {
  const GaitParams& p = params();
  // Left single-support midpoint sits halfway between the end of touchdown
  // ramp (d) and toe-off start (0.5).
  const double mid_stance = 0.5 * (p.double_support_fraction + 0.5);
  const ReferenceSample s = sample(p, 0.5, CyclePhase(mid_stance));
  CHECK(s.phi[0] == 1.0);
  CHECK(s.phi[1] == 0.0);
  CHECK(s.F_ref[1] == Vec3::Zero());

  // Left mid-swing.
  const double mid_swing = 0.5 * (p.stance_fraction() + 1.0);
  CHECK(transition_weight(p, CyclePhase(mid_swing), Foot::kLeft) == 0.0);

  // Ramp midpoints.
  const double d = p.double_support_fraction;
  CHECK(transition_weight(p, CyclePhase(0.5 * d), Foot::kLeft) == doctest::Approx(0.5));
  CHECK(transition_weight(p, CyclePhase(0.5 + 0.5 * d), Foot::kLeft) == doctest::Approx(0.5));
  CHECK(transition_weight(p, CyclePhase(0.5 * d), Foot::kRight) == doctest::Approx(0.5));

  double worst_gap = 0.0;
  double prev = transition_weight(p, CyclePhase(0.0), Foot::kLeft);
  for (int k = 0; k <= 10000; ++k) {
    const CyclePhase ph(k * 1e-4);
    const double l = transition_weight(p, ph, Foot::kLeft);
    const double r = transition_weight(p, ph, Foot::kRight);
    CHECK(l >= 0.0);
    CHECK(l <= 1.0);
    const double sum = l + r;
    CHECK(sum >= 1.0 - 1e-12);
    CHECK(sum <= 2.0);
    worst_gap = std::max(worst_gap, std::abs(l - prev));
    prev = l;
  }
  // Continuity: a 1e-4 step moves a ramp of width d by at most 1e-4 / d.
  CHECK(worst_gap <= 1e-4 / d + 1e-12);
}

TEST_CASE("phase encoding") {
  auto [s0, c0] = phase_encoding(CyclePhase(0.0));
  CHECK(s0 == 0.0);
  CHECK(c0 == 1.0);
  auto [s1, c1] = phase_encoding(CyclePhase(0.25));
  CHECK(s1 == doctest::Approx(1.0));
  CHECK(std::abs(c1) < 1e-15);
  for (int k = 0; k < 1000; ++k) {
    auto [s, c] = phase_encoding(CyclePhase(k / 1000.0));
    CHECK(std::abs(s * s + c * c - 1.0) < 1e-12);
  }
  CHECK(CyclePhase(1.25).value() == doctest::Approx(0.25));
  CHECK(CyclePhase(-0.25).value() == doctest::Approx(0.75));
  CHECK(CyclePhase(0.9).advanced(0.16, 0.8).value() == doctest::Approx(0.1));
}

TEST_CASE("swing apex clearance") {
  const GaitParams& p = params();
  const double apex = p.stance_fraction() + 0.5 * (1.0 - p.stance_fraction());
  for (double speed : {0.0, 0.5, 1.0}) {
    const ReferenceSample s = sample(p, speed, CyclePhase(apex));
    CHECK(s.x_ref[0].z() == doctest::Approx(-p.base_height_ref + 0.15).epsilon(1e-14));
    // Stance ground level is -base_height_ref throughout stance.
    CHECK(s.x_ref[1].z() == -p.base_height_ref);
  }
}

TEST_CASE("impulse balance over one cycle") {
  const GaitParams& p = params();
  for (double speed : {0.0, 0.3, 0.7, 1.0}) {
    const int n = static_cast<int>(std::lround(2000.0 * p.cycle_period));
    const double dt = p.cycle_period / n;
    double impulse = 0.0;
    for (int k = 0; k < n; ++k) {
      const ReferenceSample s = sample(p, speed, CyclePhase(static_cast<double>(k) / n));
      impulse += (s.F_ref[0].z() + s.F_ref[1].z()) * dt;
    }
    const double expect = p.total_mass * 9.81 * p.cycle_period;
    CHECK(std::abs(impulse - expect) / expect < 0.01);
  }
  CHECK(p.total_mass == doctest::Approx(33.0));
}

TEST_CASE("force profile invariants and shape") {
  const GaitParams& p = params();
  for (int k = 0; k < 4000; ++k) {
    const ReferenceSample s = sample(p, 0.8, CyclePhase(k / 4000.0));
    for (int f = 0; f < 2; ++f) {
      CHECK(s.F_ref[f].z() >= 0.0);
      if (s.phi[f] == 0.0) CHECK(s.F_ref[f] == Vec3::Zero());
    }
  }
  // Braking then propulsion, antisymmetric about mid-stance.
  const double tau = p.stance_fraction();
  const double a = sample(p, 0.8, CyclePhase(0.25 * tau)).F_ref[0].x();
  const double b = sample(p, 0.8, CyclePhase(0.75 * tau)).F_ref[0].x();
  CHECK(a < 0.0);
  CHECK(b == doctest::Approx(-a));
  // No horizontal force when standing in place.
  CHECK(sample(p, 0.0, CyclePhase(0.25 * tau)).F_ref[0].x() == 0.0);
}

TEST_CASE("stance foot moves backward at commanded speed") {
  const GaitParams& p = params();
  const double speed = 0.6;
  const double h = 1e-4;
  for (double s : {0.05, 0.2, 0.35, 0.55}) {
    const double x1 = sample(p, speed, CyclePhase(s + h)).x_ref[0].x();
    const double x0 = sample(p, speed, CyclePhase(s - h)).x_ref[0].x();
    const double vel = (x1 - x0) / (2.0 * h * p.cycle_period);
    CHECK(vel == doctest::Approx(-speed).epsilon(1e-9));
  }
}

TEST_CASE("left/right symmetry and continuity") {
  const GaitParams& p = params();
  for (int k = 0; k < 1000; ++k) {
    const double ph = k / 1000.0;
    const ReferenceSample a = sample(p, 0.5, CyclePhase(ph));
    const ReferenceSample b = sample(p, 0.5, CyclePhase(ph + 0.5));
    Vec3 mirrored = b.x_ref[1];
    mirrored.y() = -mirrored.y();
    CHECK((a.x_ref[0] - mirrored).norm() < 1e-12);
    Vec3 fm = b.F_ref[1];
    fm.y() = -fm.y();
    CHECK((a.F_ref[0] - fm).norm() < 1e-9);
    CHECK(a.phi[0] == doctest::Approx(b.phi[1]));
  }
  // C1: slope stays bounded and the step-to-step slope change is small
  // everywhere, including the stance/swing boundaries.
  const double h = 1e-5;
  double max_slope = 0.0, max_jump = 0.0, max_force_step = 0.0;
  Vec3 prev_slope = Vec3::Zero();
  Vec3 prev_force = sample(p, 1.0, CyclePhase(0.0)).F_ref[0];
  for (int k = 1; k <= 100000; ++k) {
    const double ph = k * h;
    const Vec3 x0 = sample(p, 1.0, CyclePhase(ph - h)).x_ref[0];
    const ReferenceSample s1 = sample(p, 1.0, CyclePhase(ph));
    const Vec3 slope = (s1.x_ref[0] - x0) / h;
    max_slope = std::max(max_slope, slope.norm());
    if (k > 1) max_jump = std::max(max_jump, (slope - prev_slope).norm());
    max_force_step = std::max(max_force_step, (s1.F_ref[0] - prev_force).norm());
    prev_slope = slope;
    prev_force = s1.F_ref[0];
  }
  CHECK(max_slope < 10.0);
  CHECK(max_jump < 1e-2);
  CHECK(max_force_step < 1.0);
}

TEST_CASE("speed outside range is rejected") {
  CHECK_THROWS_AS(sample(params(), 1.5, CyclePhase(0.0)), DomainError);
  CHECK_THROWS_AS(sample(params(), -0.1, CyclePhase(0.0)), DomainError);
  GaitParams bad = params();
  bad.double_support_fraction = 0.3;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = params();
  bad.swing_apex = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_NOTHROW(params().validate());
}

TEST_CASE("neutral foot pitch keeps the foot flat at nominal stance") {
  const RobotModel& model = default_model();
  const GaitParams& p = params();
  // Mid-stance of each foot in turn.
  for (Foot f : kFeet) {
    const double ph = 0.3 + (f == Foot::kRight ? 0.5 : 0.0);
    const VecX q = joint_reference(model, sample(p, 0.0, CyclePhase(ph)));
    const Kinematics kin = forward_kinematics(model, q);
    CHECK((kin.relative[model.foot(f).body].rot - Mat3::Identity()).norm() < 1e-9);
  }
}

TEST_CASE("joint reference round trip and workspace") {
  const RobotModel& model = default_model();
  const GaitParams& p = params();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    VecX q = nominal_joint_seed(model);
    for (Foot f : kFeet) {
      q(actuated_index(f, LegJoint::kHipRoll)) = 0.1 * u(rng);
      q(actuated_index(f, LegJoint::kHipPitch)) = -0.4 + 0.3 * u(rng);
      q(actuated_index(f, LegJoint::kKnee)) = 0.9 + 0.3 * u(rng);
      q(actuated_index(f, LegJoint::kHipYaw)) = 0.0;
      q(actuated_index(f, LegJoint::kFootPitch)) = p.neutral_foot_pitch;
    }
    ReferenceSample s = sample(p, 0.5, CyclePhase(0.0));
    for (Foot f : kFeet) {
      s.x_ref[static_cast<int>(f)] = testing::oracle_foot_relative(model, q, f);
    }
    VecX seed = q;
    for (int i = 0; i < seed.size(); ++i) seed(i) += 0.05 * u(rng);
    const VecX got = joint_reference(model, s, seed);
    CHECK((got - q).cwiseAbs().maxCoeff() < 1e-6);
  }

  ReferenceSample far = sample(p, 0.5, CyclePhase(0.1));
  far.x_ref[1] = Vec3(0.0, -0.1, -1.5);
  try {
    joint_reference(model, far);
    FAIL("expected a workspace error");
  } catch (const WorkspaceError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("right") != std::string::npos);
    CHECK(msg.find("phase 0.1") != std::string::npos);
  }
}

TEST_CASE("full cycle IK sweep") {
  const RobotModel& model = default_model();
  const GaitParams& p = params();
  double worst = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const ReferenceSample s = sample(p, 0.5, CyclePhase(k / 2000.0));
    const VecX q = joint_reference(model, s);
    for (Foot f : kFeet) {
      const int i = static_cast<int>(f);
      worst = std::max(worst, (testing::oracle_foot_relative(model, q, f) - s.x_ref[i]).norm());
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("refdump row count") {
  std::ostringstream os;
  const int rows = write_reference_cycle(os, params(), 0.5, 2000.0);
  CHECK(rows == 1600);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 1600 + 2);
}
