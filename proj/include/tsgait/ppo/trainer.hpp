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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "tsgait/ppo/ppo.hpp"

namespace tsgait {

struct IterationStats {
  int iteration = 0;          // 1-based; rollouts were collected before this update
  long env_steps = 0;         // cumulative
  int episodes = 0;
  double mean_ep_reward = 0.0;
  double mean_ep_len = 0.0;
  double mean_step_reward = 0.0;
  UpdateStats update;
  double wall_time_s = 0.0;   // cumulative
};

// Collect, estimate advantages, update; one iteration per call.
class Trainer {
 public:
  Trainer(const PpoConfig& config, const EnvFactory& factory, int obs_dim, int act_dim,
          int workers, std::uint64_t seed);

  IterationStats iterate();

  const GaussianPolicy& policy() const { return policy_; }
  const Mlp& critic() const { return critic_; }
  int iteration() const { return iteration_; }
  long env_steps() const { return env_steps_; }

 private:
  PpoConfig config_;
  std::mt19937_64 rng_;
  GaussianPolicy policy_;
  Mlp critic_;
  Adam actor_opt_, critic_opt_;
  RolloutCollector collector_;
  int iteration_ = 0;
  long env_steps_ = 0;
  std::chrono::steady_clock::time_point start_;
};

// Per-iteration training log, CSV with a schema comment line.
class TrainingLog {
 public:
  explicit TrainingLog(std::ostream& out);
  void write(const IterationStats& s);

 private:
  std::ostream& out_;
};

struct Checkpoint {
  GaussianPolicy policy;
  Mlp critic;
  int iteration = 0;
  nlohmann::json metadata;  // caller-supplied, stored verbatim
};

// One JSON header line (format, version, dims, iteration, metadata and the
// array layout) followed by little-endian float64 arrays: actor params,
// log_sigma, critic params.
void save_checkpoint(const std::filesystem::path& path, const GaussianPolicy& policy,
                     const Mlp& critic, int iteration, const nlohmann::json& metadata);
// Throws ConfigError on malformed or truncated files.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// FNV-1a 64 of a string, rendered as 16 hex digits.
std::string config_hash(const std::string& text);

}  // namespace tsgait
