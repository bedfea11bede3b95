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

// Velocity-tracking point mass: a known-solvable control task for PPO.

#include <cmath>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "tsgait/ppo/ppo.hpp"

namespace tsgait::testing {

class PointMassEnv : public RlEnvironment {
 public:
  PointMassEnv(std::uint64_t seed, int horizon) : rng_(seed), horizon_(horizon) {}

  int observation_dim() const override { return 2; }
  int action_dim() const override { return 1; }

  std::vector<double> reset() override {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    target_ = u(rng_);
    v_ = 0.0;
    t_ = 0;
    return {target_, v_};
  }

  // v <- v + a, reward exp(-|v - target|).
  EnvTransition step(std::span<const double> action) override {
    v_ += action[0];
    ++t_;
    EnvTransition tr;
    tr.observation = {target_, v_};
    tr.reward = std::exp(-std::abs(v_ - target_));
    if (t_ >= horizon_) tr.termination = Termination::kTimeout;
    return tr;
  }

 private:
  std::mt19937_64 rng_;
  int horizon_;
  double target_ = 0.0;
  double v_ = 0.0;
  int t_ = 0;
};

inline EnvFactory point_mass_factory(std::uint64_t seed, int horizon = 20) {
  return [seed, horizon](int worker) {
    return std::make_unique<PointMassEnv>(seed * 1000 + worker, horizon);
  };
}

}  // namespace tsgait::testing
