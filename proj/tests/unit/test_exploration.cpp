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

#include "tsgait/error.hpp"
#include "tsgait/exploration/exploration.hpp"

using namespace tsgait;

namespace {

std::shared_ptr<const RobotModel> shared_default() {
  return std::make_shared<RobotModel>(default_model());
}

}  // namespace

TEST_CASE("convex hull area") {
  CHECK(convex_hull_area({{0, 0}, {1, 0}, {1, 1}, {0, 1}}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(convex_hull_area({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.2, 0.9}}) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(convex_hull_area({{0, 0}, {1, 1}, {2, 2}}) == 0.0);
  CHECK(convex_hull_area({{0, 0}, {1, 1}}) == 0.0);
  CHECK(convex_hull_area({}) == 0.0);
  CHECK(convex_hull_area({{0, 0}, {2, 0}, {0, 3}}) == doctest::Approx(3.0).epsilon(1e-15));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = 0.3;
  std::vector<std::array<double, 2>> disk;
  while (disk.size() < 1000) {
    const double x = r * (2 * u(rng) - 1), y = r * (2 * u(rng) - 1);
    if (x * x + y * y <= r * r) disk.push_back({x + 1.0, y - 2.0});
  }
  const double a = convex_hull_area(disk);
  CHECK(a <= std::numbers::pi * r * r);
  CHECK(a == doctest::Approx(std::numbers::pi * r * r).epsilon(0.05));
}

TEST_CASE("occupancy") {
  const std::vector<std::array<double, 2>> pts{
      {0.001, 0.001}, {0.009, 0.002}, {0.011, 0.0}, {-0.001, 0.0}, {0.5, -0.5}};
  CHECK(occupancy_count(pts) == 4);
  CHECK(occupancy_count(std::span<const std::array<double, 2>>{}) == 0);

  // Non-decreasing as samples accumulate.
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 0.1);
  std::vector<std::array<double, 2>> acc;
  long prev = 0;
  for (int k = 0; k < 500; ++k) {
    acc.push_back({n(rng), n(rng)});
    const long c = occupancy_count(acc);
    CHECK(c >= prev);
    CHECK(c <= static_cast<long>(acc.size()));
    prev = c;
  }
}

TEST_CASE("noise study") {
  const auto model = shared_default();
  const EnvConfig env = default_env_config(*model);

  SUBCASE("zero-noise single steps collapse onto the reference-tracking feet") {
    NoiseStudyConfig c;
    c.mode = NoiseMode::kSingleStep;
    c.log_sigma = -40.0;
    c.n_samples = 16;
    const CoverageReport r = run_noise_study(model, env, c);
    REQUIRE(r.samples.size() == 32);
    BipedEnv e(model, env);
    const std::vector<double> zero(kActDim, 0.0);
    for (int k = 0; k < 16; ++k) {
      e.reset_to(c.speed, c.init_phases[k % 8]);
      e.step(zero);
      const Kinematics kin = forward_kinematics(*model, e.state().joint_angles);
      for (int f = 0; f < 2; ++f) {
        CHECK((r.samples[2 * k + f].position - kin.foot_relative[f]).norm() < 1e-9);
        CHECK_FALSE(r.samples[2 * k + f].terminated);
      }
    }
    CHECK(r.failures == 0);
  }

  SUBCASE("episode mode records exactly n samples per foot and is deterministic") {
    NoiseStudyConfig c;
    c.n_samples = 60;
    c.action_space = ActionSpace::kJoint;
    c.log_sigma = -1.0;
    const CoverageReport a = run_noise_study(model, env, c);
    const CoverageReport b = run_noise_study(model, env, c);
    CHECK(a.samples.size() == 120);
    std::ostringstream sa, sb;
    write_samples_header(sa);
    write_samples(sa, a);
    write_samples_header(sb);
    write_samples(sb, b);
    CHECK(sa.str() == sb.str());
    CHECK(a.metrics.hull_area_xz > 0.0);
    CHECK(a.metrics.occupancy_cells <= 120);
    // Every finished episode contributes its terminal step.
    int flagged = 0;
    for (const FootSample& s : a.samples) flagged += s.terminated;
    CHECK(flagged == 2 * a.failures);
    std::istringstream in(sa.str());
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "mode,action_space,seed,episode_id,step,foot,x,y,z,terminated_flag");
    std::getline(in, line);
    CHECK(line.rfind("episode,joint,1,0,1,left,", 0) == 0);
  }

  SUBCASE("configuration errors") {
    NoiseStudyConfig c;
    c.n_samples = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(parse_noise_mode("burst"), ConfigError);
    CHECK(parse_noise_mode("single_step") == NoiseMode::kSingleStep);
  }
}
