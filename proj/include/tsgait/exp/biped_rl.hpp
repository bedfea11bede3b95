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

#include <cstdint>
#include <memory>

#include "tsgait/env/env.hpp"
#include "tsgait/ppo/ppo.hpp"

namespace tsgait {

// BipedEnv behind the trainer's environment interface.
class BipedRlEnv : public RlEnvironment {
 public:
  BipedRlEnv(std::shared_ptr<const RobotModel> model, const EnvConfig& config);

  int observation_dim() const override { return kObsDim; }
  int action_dim() const override { return kActDim; }
  std::vector<double> reset() override;
  EnvTransition step(std::span<const double> action) override;

  BipedEnv& env() { return env_; }

 private:
  BipedEnv env_;
};

// Worker w gets an environment seeded from (seed, w).
EnvFactory biped_env_factory(std::shared_ptr<const RobotModel> model, const EnvConfig& config,
                             std::uint64_t seed);

// Seed of stream `index` derived from a run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace tsgait
