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

#include "tsgait/exp/biped_rl.hpp"

#include <random>

namespace tsgait {

BipedRlEnv::BipedRlEnv(std::shared_ptr<const RobotModel> model, const EnvConfig& config)
    : env_(std::move(model), config) {}

std::vector<double> BipedRlEnv::reset() {
  const Observation o = env_.reset();
  return {o.begin(), o.end()};
}

EnvTransition BipedRlEnv::step(std::span<const double> action) {
  const StepOutcome out = env_.step(action);
  EnvTransition tr;
  tr.observation.assign(out.observation.begin(), out.observation.end());
  tr.reward = out.reward;
  tr.termination = out.termination;
  return tr;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{seed, index, std::uint64_t{0xb1bed}};
  std::mt19937_64 g(seq);
  return g();
}

EnvFactory biped_env_factory(std::shared_ptr<const RobotModel> model, const EnvConfig& config,
                             std::uint64_t seed) {
  return [model, config, seed](int worker) {
    EnvConfig c = config;
    c.episode.seed = derive_seed(seed, static_cast<std::uint64_t>(worker));
    return std::make_unique<BipedRlEnv>(model, c);
  };
}

}  // namespace tsgait
