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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "support/oracles.hpp"
#include "tsgait/env/env.hpp"
#include "tsgait/error.hpp"
#include "tsgait/model/dynamics.hpp"

using namespace tsgait;

namespace {

std::shared_ptr<const RobotModel> shared_default() {
  return std::make_shared<RobotModel>(default_model());
}

// Both feet flat on the ground in double support at zero speed, base placed so
// the contact points sit `depth` below the ground.
GeneralizedState standing(const RobotModel& m, double depth) {
  const GaitParams g = default_gait_params(m);
  GeneralizedState s = GeneralizedState::zero(m);
  s.joint_angles = joint_reference(m, sample(g, 0.0, CyclePhase(0.55)));
  const Kinematics kin = forward_kinematics(m, s.joint_angles);
  const FootFrame& ff = m.feet()[0];
  const double z = kin.relative[ff.body].apply(ff.contact_points[0]).z();
  s.base_position = Vec3(0.0, 0.0, -z - depth);
  return s;
}

// Base plus one swinging link, no feet.
RobotModel pendulum() {
  return model_from_json(nlohmann::json::parse(R"({
    "format_version": 1, "name": "pendulum",
    "bodies": [
      {"name": "base", "mass": 4.0, "com": [0.0, 0.0, 0.0],
       "inertia": [[0.05, 0.0, 0.0], [0.0, 0.06, 0.0], [0.0, 0.0, 0.04]]},
      {"name": "arm", "mass": 1.5, "com": [0.0, 0.0, -0.3],
       "inertia": [[0.02, 0.0, 0.0], [0.0, 0.02, 0.0], [0.0, 0.0, 0.002]]}],
    "joints": [
      {"name": "free", "kind": "floating"},
      {"name": "swing", "kind": "revolute", "parent": "base", "axis": [0.0, 1.0, 0.0],
       "origin": {"xyz": [0.0, 0.0, -0.1], "rpy": [0.0, 0.0, 0.0]}, "torque_limit": 10.0}]
  })"), Layout::kAnyTree);
}

ContactParams no_ground() {
  ContactParams p;
  p.ground_height = -100.0;
  return p;
}

// Environment with gravity off and the ground far below, so nothing falls.
EnvConfig floating_config(const RobotModel& m) {
  EnvConfig c = default_env_config(m);
  c.contact = no_ground();
  c.episode.termination_height = -50.0;
  return c;
}

}  // namespace

TEST_CASE("contact law") {
  const RobotModel& m = default_model();
  ContactParams p;

  SUBCASE("foot above ground gives zero force") {
    const ContactResult r = contact_forces(m, standing(m, -0.01), p);
    for (const ContactPoint& c : r.points) CHECK(c.force.norm() == 0.0);
    CHECK_FALSE(r.in_contact(0));
    CHECK_FALSE(r.in_contact(1));
  }

  SUBCASE("static penetration is a linear spring") {
    p.normal_stiffness = 1e5;
    const ContactResult r = contact_forces(m, standing(m, 0.001), p);
    REQUIRE(r.points.size() == 4);
    for (const ContactPoint& c : r.points) {
      CHECK(c.force.z() == doctest::Approx(1e5 * c.penetration).epsilon(1e-12));
      CHECK(c.force.z() == doctest::Approx(100.0).epsilon(1e-3));
      CHECK(c.force.head<2>().norm() == 0.0);
    }
  }

  SUBCASE("body weight sinks the feet by less than a centimetre") {
    const double weight = m.total_mass() * 9.81;
    const double depth = weight / (4.0 * p.normal_stiffness);
    CHECK(depth < 0.01);
    const ContactResult r = contact_forces(m, standing(m, depth), p);
    CHECK((r.foot_force[0] + r.foot_force[1]).z() == doctest::Approx(weight).epsilon(1e-3));
  }

  SUBCASE("scripted slide stays inside the friction cone") {
    GeneralizedState s = standing(m, 0.003);
    int sliding = 0;
    for (int k = 0; k <= 400; ++k) {
      const double t = k / 400.0;
      s.base_lin_vel = Vec3(2.0 * std::sin(9.0 * t), 1.5 * std::cos(7.0 * t), 0.2 * std::sin(13.0 * t));
      s.joint_rates = VecX::Constant(m.num_joints(), std::sin(5.0 * t));
      const ContactResult r = contact_forces(m, s, p);
      for (const ContactPoint& c : r.points) {
        const double n = c.force.z();
        const double tangential = c.force.head<2>().norm();
        CHECK(n >= 0.0);
        CHECK(tangential <= p.friction_coefficient * n * (1.0 + 1e-12));
        if (n > 0.0 && tangential >= p.friction_coefficient * n * (1.0 - 1e-12)) ++sliding;
      }
    }
    CHECK(sliding > 0);
  }

  SUBCASE("separating contact exerts no pull") {
    GeneralizedState s = standing(m, 0.001);
    s.base_lin_vel = Vec3(0.0, 0.0, 1.0);
    for (const ContactPoint& c : contact_forces(m, s, p).points) CHECK(c.force.norm() == 0.0);
  }

  SUBCASE("invalid parameters") {
    p.normal_stiffness = -1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
  }
}

TEST_CASE("integrator") {
  const RobotModel& m = default_model();
  const double dt = 5e-4;
  const VecX zero_tau = VecX::Zero(m.num_joints());

  SUBCASE("free fall") {
    GeneralizedState s = standing(m, -5.0);
    for (int k = 0; k < 200; ++k) s = step_physics(m, s, zero_tau, no_ground(), dt).state;
    CHECK(std::abs(s.base_lin_vel.z() + 0.981) < 1e-9);
  }

  SUBCASE("momentum is conserved without gravity or contact") {
    const RobotModel free = m.with_gravity(Vec3::Zero());
    std::mt19937_64 rng(5);
    GeneralizedState s = testing::random_state(free, rng);
    const Vec3 p0 = linear_momentum(free, s);
    for (int k = 0; k < 1000; ++k) s = step_physics(free, s, zero_tau, no_ground(), dt).state;
    CHECK((linear_momentum(free, s) - p0).norm() < 1e-8);
  }

  SUBCASE("passive energy drift under 2% over 1 s") {
    const RobotModel pend = pendulum();
    GeneralizedState s = GeneralizedState::zero(pend);
    s.base_position = Vec3(0.0, 0.0, 3.0);
    s.joint_angles(0) = 1.2;
    s.base_ang_vel = Vec3(0.3, -0.2, 0.5);
    const double e0 = total_energy(pend, s);
    double worst = 0.0;
    for (int k = 0; k < 2000; ++k) {
      s = step_physics(pend, s, VecX::Zero(1), no_ground(), dt).state;
      worst = std::max(worst, std::abs(total_energy(pend, s) - e0) / std::abs(e0));
    }
    CHECK(worst < 0.02);

    std::mt19937_64 rng(6);
    GeneralizedState b = testing::random_state(m, rng, 0.6, 0.5);
    b.base_position.z() = 5.0;
    const double eb = total_energy(m, b);
    for (int k = 0; k < 2000; ++k) b = step_physics(m, b, zero_tau, no_ground(), dt).state;
    CHECK(std::abs(total_energy(m, b) - eb) / std::abs(eb) < 0.02);
  }

  SUBCASE("quaternion stays unit and canonical") {
    std::mt19937_64 rng(7);
    GeneralizedState s = testing::random_state(m, rng);
    s.base_ang_vel = Vec3(4.0, -3.0, 6.0);
    for (int k = 0; k < 500; ++k) {
      s = step_physics(m, s, zero_tau, no_ground(), dt).state;
      CHECK(std::abs(s.base_orientation.norm() - 1.0) < 1e-12);
      CHECK(s.base_orientation.w() >= 0.0);
    }
  }

  SUBCASE("divergence carries the step index") {
    GeneralizedState s = standing(m, 0.0);
    s.base_lin_vel.x() = std::nan("");
    try {
      step_physics(m, s, zero_tau, ContactParams{}, dt, 42);
      FAIL("expected divergence");
    } catch (const DivergenceError& e) {
      CHECK(e.step() == 42);
    }
  }
}

TEST_CASE("episode configuration") {
  EpisodeConfig c;
  CHECK(c.ticks_per_step() == 50);
  CHECK(c.horizon / c.policy_rate == doctest::Approx(3.75));
  c.control_rate = 2010.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = EpisodeConfig{};
  c.horizon = 0;
  c.substeps = 0;
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("horizon") != std::string::npos);
    CHECK(what.find("substeps") != std::string::npos);
  }
  CHECK(parse_action_space("joint") == ActionSpace::kJoint);
  CHECK_THROWS_AS(parse_action_space("cartesian"), ConfigError);
}

TEST_CASE("observation layout") {
  const auto model = shared_default();
  BipedEnv env(model, default_env_config(*model));

  const Observation o = env.reset_to(0.7, 0.0);
  CHECK(o[obs::kSpeedCommand] == 0.7);
  CHECK(o[obs::kPhase] == 0.0);
  CHECK(o[obs::kPhase + 1] == 1.0);

  std::mt19937_64 rng(11);
  const GeneralizedState s = testing::random_state(*model, rng);
  env.set_state(s);
  const Kinematics kin = forward_kinematics(*model, s.joint_angles);
  std::vector<double> expect{0.7};
  for (int k = 0; k < 3; ++k) expect.push_back(s.base_lin_vel(k));
  for (int k = 0; k < 3; ++k) expect.push_back(s.base_ang_vel(k));
  expect.insert(expect.end(), {s.base_orientation.w(), s.base_orientation.x(),
                               s.base_orientation.y(), s.base_orientation.z()});
  for (int k = 0; k < 10; ++k) expect.push_back(s.joint_angles(k));
  for (int k = 0; k < 10; ++k) expect.push_back(s.joint_rates(k));
  for (int f = 0; f < 2; ++f) {
    for (int k = 0; k < 3; ++k) expect.push_back(kin.foot_relative[f](k));
  }
  expect.insert(expect.end(), {0.0, 1.0});
  REQUIRE(expect.size() == static_cast<size_t>(kObsDim));
  const Observation got = env.observe();
  for (int i = 0; i < kObsDim; ++i) CHECK(got[i] == expect[i]);
}

TEST_CASE("reset") {
  const auto model = shared_default();

  SUBCASE("fixed phase and zero perturbation is canonical") {
    EnvConfig c = default_env_config(*model);
    c.episode.randomize_speed = false;
    c.episode.init_phase_random = false;
    c.episode.init_phase = 0.25;
    c.episode.init_velocity_perturbation = 0.0;
    BipedEnv a(model, c), b(model, c);
    const Observation oa = a.reset(1), ob = b.reset(99);
    for (int i = 0; i < kObsDim; ++i) CHECK(oa[i] == ob[i]);
    CHECK(a.state().base_lin_vel.isApprox(Vec3(0.5, 0.0, 0.0)));
    // Feet start on their references.
    const ReferenceSample ref = sample(c.gait, 0.5, CyclePhase(0.25));
    const Kinematics kin = forward_kinematics(*model, a.state().joint_angles);
    for (int f = 0; f < 2; ++f) CHECK((kin.foot_relative[f] - ref.x_ref[f]).norm() < 1e-6);
  }

  SUBCASE("same seed, same state; perturbation within bounds") {
    const EnvConfig c = default_env_config(*model);
    BipedEnv a(model, c), b(model, c);
    for (std::uint64_t seed : {3u, 4u, 5u}) {
      a.reset(seed);
      b.reset(seed);
      CHECK(a.state().base_lin_vel == b.state().base_lin_vel);
      CHECK(a.state().joint_angles == b.state().joint_angles);
      CHECK(a.phase().value() == b.phase().value());
      const Vec3 dv = a.state().base_lin_vel - Vec3(a.speed_command(), 0.0, 0.0);
      CHECK(dv.cwiseAbs().maxCoeff() <= c.episode.init_velocity_perturbation);
    }
  }

  SUBCASE("phase distribution is uniform") {
    BipedEnv env(model, default_env_config(*model));
    std::vector<double> phases;
    for (int k = 0; k < 10000; ++k) {
      env.reset();
      phases.push_back(env.phase().value());
    }
    std::sort(phases.begin(), phases.end());
    double ks = 0.0;
    const double n = static_cast<double>(phases.size());
    for (size_t i = 0; i < phases.size(); ++i) {
      ks = std::max({ks, (i + 1) / n - phases[i], phases[i] - i / n});
    }
    CHECK(ks < 0.02);
  }
}

TEST_CASE("policy step") {
  const auto model = shared_default();
  const std::vector<double> zero(kActDim, 0.0);

  SUBCASE("rate contract and timeout") {
    const RobotModel floating = model->with_gravity(Vec3::Zero());
    auto fm = std::make_shared<RobotModel>(floating);
    BipedEnv env(fm, floating_config(floating));
    env.reset(1);
    const double p0 = env.phase().value();
    StepOutcome out;
    for (int k = 1; k <= 150; ++k) {
      out = env.step(zero);
      CHECK(out.ticks == 50);
      if (k < 150) CHECK_FALSE(out.done);
    }
    CHECK(out.done);
    CHECK(out.termination == Termination::kTimeout);
    CHECK(env.time() == doctest::Approx(3.75).epsilon(1e-12));
    const double cycles = 3.75 / 0.8;
    const double expect = std::fmod(p0 + cycles, 1.0);
    CHECK(std::abs(env.phase().value() - expect) < 1e-9);
  }

  SUBCASE("failure on the first tick below the termination height") {
    const RobotModel floating = model->with_gravity(Vec3::Zero());
    auto fm = std::make_shared<RobotModel>(floating);
    EnvConfig c = floating_config(floating);
    c.episode.termination_height = 0.6;
    BipedEnv env(fm, c);
    env.reset_to(0.5, 0.0);
    GeneralizedState s = env.state();
    s.base_position.z() = 0.62;
    s.base_lin_vel = Vec3(0.0, 0.0, -1.0);
    s.joint_rates.setZero();
    env.set_state(s);
    env.set_tick_logging(true);
    const StepOutcome out = env.step(zero);
    CHECK(out.done);
    CHECK(out.termination == Termination::kFailure);
    REQUIRE(out.ticks < 50);
    REQUIRE(out.tick_log.size() == static_cast<size_t>(out.ticks));
    CHECK(out.tick_log.back().base_position.z() < 0.6);
    for (int k = 0; k + 1 < out.ticks; ++k) CHECK(out.tick_log[k].base_position.z() >= 0.6);
    CHECK(out.ticks == doctest::Approx(41).epsilon(0.1));
  }

  SUBCASE("determinism") {
    for (ActionSpace space : {ActionSpace::kTask, ActionSpace::kJoint}) {
      EnvConfig c = default_env_config(*model);
      c.action_space = space;
      BipedEnv a(model, c), b(model, c);
      a.reset(17);
      b.reset(17);
      std::mt19937_64 rng(3);
      std::normal_distribution<double> n(0.0, 0.3);
      for (int k = 0; k < 12; ++k) {
        std::vector<double> act(kActDim);
        for (double& v : act) v = n(rng);
        const StepOutcome ra = a.step(act), rb = b.step(act);
        CHECK(ra.reward == rb.reward);
        CHECK(ra.observation == rb.observation);
        if (ra.done) break;
      }
    }
  }

  SUBCASE("rewards and logged forces are valid") {
    EnvConfig c = default_env_config(*model);
    BipedEnv env(model, c);
    env.set_tick_logging(true);
    env.reset(2);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, std::exp(-2.5));
    for (int k = 0; k < 40; ++k) {
      std::vector<double> act(kActDim);
      for (double& v : act) v = n(rng);
      const StepOutcome out = env.step(act);
      CHECK(out.reward > 0.0);
      CHECK(out.reward <= 1.0);
      for (const TickRecord& t : out.tick_log) {
        for (int f = 0; f < 2; ++f) {
          CHECK(t.grf[f].z() >= 0.0);
          CHECK(t.grf[f].head<2>().norm() <= c.contact.friction_coefficient * t.grf[f].z() + 1e-9);
        }
      }
      if (out.done) break;
    }
  }

  SUBCASE("action mapping") {
    BipedEnv env(model, default_env_config(*model));
    std::vector<double> act(kActDim);
    for (int k = 0; k < kActDim; ++k) act[k] = 0.1 * (k + 1) - 0.5;
    const ReferenceSample ref = sample(env.config().gait, 0.5, CyclePhase(0.0));
    const ControlCommand cmd = env.task_command(act, ref);
    CHECK(cmd.x_delta[0].isApprox(0.1 * Vec3(-0.4, -0.3, -0.2)));
    CHECK(cmd.x_delta[1].isApprox(0.1 * Vec3(-0.1, 0.0, 0.1)));
    CHECK(cmd.theta_delta(3) == doctest::Approx(0.3 * 0.5));
    CHECK(env.joint_delta(act)(9) == doctest::Approx(0.15));
    CHECK_THROWS_AS(env.step(std::vector<double>(3, 0.0)), DomainError);
  }
}

TEST_CASE("trace writer") {
  const auto model = shared_default();
  BipedEnv env(model, default_env_config(*model));
  env.reset(4);
  std::ostringstream os;
  TraceWriter w(os);
  const std::vector<double> zero(kActDim, 0.0);
  for (int k = 0; k < 3; ++k) w.write(env, zero, env.step(zero));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# schema_version=1");
  std::getline(in, line);
  const auto columns = std::count(line.begin(), line.end(), ',');
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == columns);
    ++rows;
  }
  CHECK(rows == 3);
}
