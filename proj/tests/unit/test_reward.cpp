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
#include <random>
#include <vector>

#include "tsgait/error.hpp"
#include "tsgait/reward/reward.hpp"

using namespace tsgait;

namespace {

// Every reference met: stance foot flat on the ground, swing foot at
// clearance height, base on its references.
TickSample perfect_tick(double phi_left) {
  TickSample s;
  s.phi = {phi_left, 1.0 - phi_left};
  for (int f = 0; f < 2; ++f) s.foot_height[f] = s.phi[f] == 1.0 ? 0.0 : 0.15;
  s.base_xvel_ref = 0.6;
  s.base_zpos_ref = 0.95;
  s.base_velocity = Vec3(0.6, 0.0, 0.0);
  s.base_position = Vec3(3.0, 0.0, 0.95);
  return s;
}

}  // namespace

TEST_CASE("weights") {
  const RewardWeights w;
  double sum = 0.0;
  for (double v : w.w) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.w[0] == 0.1);
  CHECK(w.w[2] == 0.15);
  CHECK(w.w[6] == 0.15);
  CHECK(w.w[7] == 0.05);
  CHECK(w.w[8] == 0.025);
  CHECK(w.w[9] == 0.025);
  CHECK(w.w[10] == 0.1);
  CHECK(reward_term_name(RewardTerm::kActionSmooth) == "action_smooth");
}

TEST_CASE("kernel") {
  CHECK(kernel(0.0) == 1.0);
  CHECK(kernel(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(kernel(-1e-9), DomainError);
  CHECK(kernel(1e6) > 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng), b = u(rng);
    if (a < b) CHECK(kernel(a) > kernel(b));
    CHECK(kernel(a) <= 1.0);
    CHECK(kernel(a) > 0.0);
  }
}

TEST_CASE("per-term costs") {
  const std::vector<double> zero(10, 0.0);

  SUBCASE("flat stance foot at rest costs nothing") {
    TickSample s;
    s.phi = {1.0, 1.0};
    const RewardVector c = eval_terms(std::span(&s, 1), zero, zero);
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 0.0);
  }

  SUBCASE("swing foot at clearance height costs nothing") {
    TickSample s;
    s.phi = {0.0, 0.0};
    s.foot_height = {0.15, 0.15};
    s.foot_velocity = {Vec3(1, 2, 3), Vec3(-1, 0, 0)};
    const RewardVector c = eval_terms(std::span(&s, 1), zero, zero);
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 0.0);
  }

  SUBCASE("neutral base orientation costs nothing, flipped sign too") {
    TickSample s;
    s.base_orientation = Eigen::Quaterniond(1, 0, 0, 0);
    CHECK(eval_terms(std::span(&s, 1), zero, zero)[5] == 0.0);
    s.base_orientation = Eigen::Quaterniond(-1, 0, 0, 0);
    CHECK(eval_terms(std::span(&s, 1), zero, zero)[5] == 0.0);
  }

  SUBCASE("hand-computed fixtures") {
    // Fixture 1: stance/swing blend and base tracking errors.
    TickSample a;
    a.phi = {0.25, 1.0};
    a.foot_height = {0.05, 0.01};
    a.foot_velocity = {Vec3(0.3, 0.0, 0.4), Vec3(0.0, 0.0, 0.0)};
    a.base_velocity = Vec3(0.4, -0.1, 0.05);
    a.base_position = Vec3(1.0, 0.02, 0.9);
    a.base_xvel_ref = 0.5;
    a.base_zpos_ref = 0.95;
    a.base_acceleration = Vec3(3.0, 0.0, 4.0);
    a.base_angular_velocity = Vec3(0.0, 0.6, 0.8);
    std::vector<double> act(10, 0.0), prev(10, 0.0);
    act[0] = 0.3;
    act[1] = 0.4;
    const RewardVector c = eval_terms(std::span(&a, 1), act, prev);
    // left: 0.25 (0.05^2 + 0.5) + 0.75 * 40 * 0.1^2
    CHECK(c[0] == doctest::Approx(0.25 * (0.0025 + 0.5) + 0.75 * 40.0 * 0.01).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(0.0001).epsilon(1e-12));
    CHECK(c[2] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(c[3] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(c[4] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(c[6] == doctest::Approx(5.0 * 0.02 + 3.0 * 0.1).epsilon(1e-12));
    CHECK(c[8] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(c[9] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c[10] == doctest::Approx(1.5).epsilon(1e-12));

    // Fixture 2: orientation terms.
    TickSample b;
    b.base_orientation = Eigen::Quaterniond(Eigen::AngleAxisd(0.2, Vec3::UnitX()));
    b.foot_orientation = {Eigen::Quaterniond(Eigen::AngleAxisd(0.4, Vec3::UnitY())),
                          Eigen::Quaterniond::Identity()};
    const RewardVector d = eval_terms(std::span(&b, 1), prev, prev);
    CHECK(d[5] == doctest::Approx(50.0 * (1.0 - std::cos(0.1))).epsilon(1e-12));
    CHECK(d[7] == doctest::Approx(15.0 * (1.0 - std::cos(0.2))).epsilon(1e-12));

    // Fixture 3: averaging over a two-tick window.
    TickSample e1, e2;
    e1.base_velocity = Vec3(1.0, 0.0, 0.0);
    e2.base_velocity = Vec3(0.0, 0.0, 0.0);
    e1.base_xvel_ref = e2.base_xvel_ref = 0.5;
    const TickSample two[2] = {e1, e2};
    CHECK(eval_terms(two, prev, prev)[2] == doctest::Approx(1.5).epsilon(1e-12));
  }

  SUBCASE("foot blend is linear in phi at the cost level") {
    TickSample s;
    s.foot_height = {0.07, 0.02};
    s.foot_velocity = {Vec3(0.1, 0.2, 0.3), Vec3(0.0, 0.5, 0.0)};
    s.phi = {1.0, 1.0};
    const RewardVector st = eval_terms(std::span(&s, 1), zero, zero);
    s.phi = {0.0, 0.0};
    const RewardVector sw = eval_terms(std::span(&s, 1), zero, zero);
    for (double phi : {0.0, 0.2, 0.5, 0.9, 1.0}) {
      s.phi = {phi, phi};
      const RewardVector c = eval_terms(std::span(&s, 1), zero, zero);
      CHECK(c[0] == doctest::Approx(phi * st[0] + (1 - phi) * sw[0]).epsilon(1e-14));
      CHECK(c[1] == doctest::Approx(phi * st[1] + (1 - phi) * sw[1]).epsilon(1e-14));
    }
    s.phi = {1.0, 0.0};
    const RewardVector ends = eval_terms(std::span(&s, 1), zero, zero);
    CHECK(ends[0] == st[0]);
    CHECK(ends[1] == sw[1]);
  }

  CHECK_THROWS_AS(eval_terms({}, zero, zero), DomainError);
}

TEST_CASE("total reward") {
  const RewardWeights w;
  RewardVector ones;
  ones.fill(1.0);
  CHECK(total(ones, w).total == doctest::Approx(1.0).epsilon(1e-15));
  RewardVector tiny;
  tiny.fill(1e-300);
  CHECK(total(tiny, w).total > 0.0);
  CHECK(total(tiny, w).total < 1e-299);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    RewardVector r;
    for (double& v : r) v = u(rng);
    double expect = 0.0;
    for (int i = 0; i < kRewardTerms; ++i) expect += w.w[i] * r[i];
    CHECK(total(r, w).total == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("perfect tracking yields unit reward") {
  const RewardWeights w;
  std::vector<TickSample> window;
  for (int k = 0; k < 50; ++k) window.push_back(perfect_tick(k < 25 ? 1.0 : 0.0));
  const std::vector<double> act(10, 0.2);
  const RewardBreakdown r = evaluate_reward(window, act, act, w);
  CHECK(std::abs(r.total - 1.0) < 1e-12);
  for (double t : r.terms) CHECK(t == 1.0);
}

TEST_CASE("kernelized terms stay in (0, 1]") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 3.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const RewardWeights w;
  for (int k = 0; k < 500; ++k) {
    std::vector<TickSample> window(50);
    for (TickSample& s : window) {
      s.phi = {u(rng), u(rng)};
      s.foot_height = {n(rng), n(rng)};
      s.foot_velocity = {Vec3::Random() * 10.0, Vec3::Random() * 10.0};
      s.base_velocity = Vec3::Random() * 5.0;
      s.base_position = Vec3::Random() * 5.0;
      s.base_acceleration = Vec3::Random() * 1e4;
      s.base_angular_velocity = Vec3::Random() * 20.0;
      s.base_orientation = Eigen::Quaterniond::UnitRandom();
      s.foot_orientation = {Eigen::Quaterniond::UnitRandom(), Eigen::Quaterniond::UnitRandom()};
    }
    std::vector<double> a(10), b(10);
    for (int i = 0; i < 10; ++i) {
      a[i] = 2.0 * u(rng) - 1.0;
      b[i] = 2.0 * u(rng) - 1.0;
    }
    const RewardBreakdown r = evaluate_reward(window, a, b, w);
    for (double t : r.terms) {
      CHECK(t > 0.0);
      CHECK(t <= 1.0);
    }
    CHECK(r.total > 0.0);
    CHECK(r.total <= 1.0);
  }
}
