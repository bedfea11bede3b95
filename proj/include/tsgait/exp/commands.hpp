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
#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "tsgait/exp/config.hpp"
#include "tsgait/exp/evaluation.hpp"
#include "tsgait/ppo/trainer.hpp"

namespace tsgait {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitInvariant = 2,
  kExitRuntime = 3,  // divergence or non-finite training values
};

// Writes the resolved config as config.json in `dir`.
void write_resolved_config(const std::filesystem::path& dir, const ExperimentConfig& config);

using TrainProgress = std::function<void(std::uint64_t seed, const IterationStats&)>;

// One subdirectory seed_<s> per seed holding training_log.csv, checkpoints
// (checkpoint_<iter>.ckpt every checkpoint_every iterations plus final.ckpt)
// and metadata.json, then learning_curve.csv with one mean episode reward
// column per seed.
void run_training(const ExperimentConfig& config, std::shared_ptr<const RobotModel> model,
                  const std::filesystem::path& out_dir, int workers,
                  const TrainProgress& progress = {});

// Evaluates a checkpoint over the configured speeds; writes
// speed_tracking.csv and grf_profile.csv. Throws ConfigError when the
// checkpoint does not match the configuration.
EvalReport run_evaluation(const ExperimentConfig& config, std::shared_ptr<const RobotModel> model,
                          const std::filesystem::path& checkpoint,
                          const std::filesystem::path& out_dir, std::uint64_t seed);

struct ExploreOutput {
  ExploreScenario scenario;
  std::uint64_t seed = 0;
  std::filesystem::path csv;
  CoverageReport report;  // samples cleared after writing
};

// One samples CSV per scenario and seed plus coverage_report.json.
std::vector<ExploreOutput> run_exploration(const ExperimentConfig& config,
                                           std::shared_ptr<const RobotModel> model,
                                           const std::filesystem::path& out_dir);

// reference_cycle.csv at the configured speed and rate. Returns the row count.
int run_refdump(const ExperimentConfig& config, const std::filesystem::path& out_dir);

// File name of one exploration scenario, e.g. episode_task_m2.5_seed1.csv.
std::string explore_file_name(const ExploreScenario& s, std::uint64_t seed);

}  // namespace tsgait
