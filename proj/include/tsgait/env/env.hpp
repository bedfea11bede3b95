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

#include <array>
#include <cstdint>
#include <memory>
#include <ostream>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "tsgait/env/physics.hpp"
#include "tsgait/env/termination.hpp"
#include "tsgait/refgen/gait.hpp"
#include "tsgait/reward/reward.hpp"
#include "tsgait/tsid/controller.hpp"

namespace tsgait {

inline constexpr int kObsDim = 39;
inline constexpr int kActDim = 10;

using Observation = std::array<double, kObsDim>;

// Observation index map.
namespace obs {
inline constexpr int kSpeedCommand = 0;  // 1
inline constexpr int kBaseLinVel = 1;    // 3, world frame
inline constexpr int kBaseAngVel = 4;    // 3, body frame
inline constexpr int kBaseQuat = 7;      // 4, w x y z
inline constexpr int kJointPos = 11;     // 10
inline constexpr int kJointVel = 21;     // 10
inline constexpr int kFeetRel = 31;      // 6, left xyz then right xyz, base frame
inline constexpr int kPhase = 37;        // 2, sin then cos
}  // namespace obs

enum class ActionSpace { kTask, kJoint };
std::string_view action_space_name(ActionSpace a);
// Throws ConfigError for anything other than "task" or "joint".
ActionSpace parse_action_space(std::string_view s);

struct EpisodeConfig {
  int horizon = 150;             // policy steps
  double policy_rate = 40.0;     // Hz
  double control_rate = 2000.0;  // Hz
  double termination_height = 0.6;
  double speed_command = 0.5;    // m/s, used when randomize_speed is off
  bool randomize_speed = true;   // draw the command per episode from the gait range
  bool init_phase_random = true;
  double init_phase = 0.0;       // used when init_phase_random is off
  double init_velocity_perturbation = 0.3;  // m/s, per component bound
  std::uint64_t seed = 0;
  int substeps = 1;              // physics steps per control tick
  double sensor_noise = 0.0;     // observation noise stddev, 0 disables

  // Control ticks per policy step (the reward averaging window T).
  int ticks_per_step() const;
  // Throws ConfigError.
  void validate() const;
};

struct ActionScaling {
  double task_bound = 0.1;   // m per axis
  double joint_bound = 0.3;  // rad
};

struct EnvConfig {
  GaitParams gait;
  TaskGains gains;
  JointPdGains joint_pd = JointPdGains::uniform(100.0, 5.0);
  ContactParams contact;
  EpisodeConfig episode;
  RewardWeights weights;
  RewardParams reward;
  ActionScaling scaling;
  ActionSpace action_space = ActionSpace::kTask;
};

// Defaults with the gait parameters derived from `model`.
EnvConfig default_env_config(const RobotModel& model);

// One control tick as logged for ground-reaction-force analysis.
struct TickRecord {
  double time = 0.0;
  double phase = 0.0;
  std::array<double, 2> phi{};
  std::array<Vec3, 2> grf{Vec3::Zero(), Vec3::Zero()};  // world, ground on foot
  Vec3 base_position = Vec3::Zero();
};

struct StepOutcome {
  Observation observation{};
  double reward = 0.0;
  bool done = false;
  Termination termination = Termination::kNone;
  RewardBreakdown breakdown;
  std::array<Vec3, 2> mean_grf{Vec3::Zero(), Vec3::Zero()};  // over the window
  int ticks = 0;                  // control ticks executed
  bool diverged = false;
  std::vector<TickRecord> tick_log;  // filled when tick logging is on
};

class BipedEnv {
 public:
  BipedEnv(std::shared_ptr<const RobotModel> model, EnvConfig config);

  // Reset drawing from the environment's own stream (seeded by
  // config.episode.seed at construction).
  Observation reset();
  // Reseeds the stream first.
  Observation reset(std::uint64_t seed);
  // Reset to an explicit speed and phase with no velocity perturbation.
  Observation reset_to(double speed, double phase);

  // Advances one policy step. Actions are clamped to [-1, 1].
  StepOutcome step(std::span<const double> action);

  Observation observe() const;

  const GeneralizedState& state() const { return state_; }
  void set_state(const GeneralizedState& s) { state_ = s; }
  const RobotModel& model() const { return *model_; }
  const EnvConfig& config() const { return config_; }
  double speed_command() const { return speed_; }
  CyclePhase phase() const { return phase_; }
  int steps() const { return steps_; }
  double time() const { return time_; }
  void set_tick_logging(bool on) { log_ticks_ = on; }

  // Residual command for a policy action in the configured action space.
  ControlCommand task_command(std::span<const double> action, const ReferenceSample& ref) const;
  VecX joint_delta(std::span<const double> action) const;

 private:
  Observation start(double speed, double phase, const Vec3& velocity_perturbation);
  VecX joint_target(const ReferenceSample& ref);

  std::shared_ptr<const RobotModel> model_;
  EnvConfig config_;
  std::mt19937_64 rng_;
  GeneralizedState state_;
  CyclePhase phase_;
  double speed_ = 0.0;
  double time_ = 0.0;
  int steps_ = 0;
  long ticks_ = 0;
  bool log_ticks_ = false;
  std::array<double, kActDim> previous_action_{};
  Vec3 previous_base_velocity_ = Vec3::Zero();
  VecX ik_seed_;
};

// Per-policy-step episode trace.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out);
  void write(const BipedEnv& env, std::span<const double> action, const StepOutcome& step);

 private:
  std::ostream& out_;
};

}  // namespace tsgait
