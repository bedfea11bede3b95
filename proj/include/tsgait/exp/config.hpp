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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsgait/env/env.hpp"
#include "tsgait/exploration/exploration.hpp"
#include "tsgait/ppo/ppo.hpp"

namespace tsgait {

struct ExploreScenario {
  NoiseMode mode = NoiseMode::kEpisode;
  ActionSpace action_space = ActionSpace::kTask;
  double log_sigma = -2.5;
};

struct ExperimentSettings {
  std::string output_dir = "runs";
  std::string run_id = "default";
  ActionSpace action_space = ActionSpace::kTask;
  int workers = 0;  // 0: TSGAIT_WORKERS or hardware concurrency

  std::vector<double> eval_speeds{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int eval_episodes = 1;
  double eval_warmup_s = 2.0;
  double eval_window_s = 8.0;
  int grf_bins = 20;

  int explore_samples = 50000;
  std::vector<std::uint64_t> explore_seeds{1};
  std::vector<ExploreScenario> explore_scenarios{
      {NoiseMode::kSingleStep, ActionSpace::kTask, -2.5},
      {NoiseMode::kSingleStep, ActionSpace::kJoint, -1.5},
      {NoiseMode::kEpisode, ActionSpace::kTask, -2.5},
      {NoiseMode::kEpisode, ActionSpace::kJoint, -1.5}};
  double explore_speed = 0.5;

  double refdump_speed = 0.5;
  double refdump_rate = 2000.0;
};

// Unified experiment document with sections model, gait, controller, env,
// ppo and experiment.
struct ExperimentConfig {
  std::optional<std::string> model_path;  // bundled model when empty
  nlohmann::json gait_overrides = nlohmann::json::object();
  EnvConfig env;  // gait filled once the model is known
  PpoConfig ppo;
  bool log_sigma_explicit = false;  // otherwise follows the action space
  ExperimentSettings experiment;
};

// Default exploration log sigma per action space.
double default_log_sigma(ActionSpace space);

// Parses a config document over the defaults. Unknown keys, wrong types and
// invalid values are all collected and reported in one ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Loads the model named by the config. Throws ModelError.
std::shared_ptr<const RobotModel> load_config_model(const ExperimentConfig& config);

// Fills derived gait parameters from the model, applies overrides and
// validates everything that depends on the model. Throws ConfigError.
void resolve(ExperimentConfig& config, const RobotModel& model);

// Every field explicit; parse_experiment_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace tsgait
