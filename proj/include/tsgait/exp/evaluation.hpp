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
#include <functional>
#include <ostream>
#include <vector>

#include "tsgait/env/env.hpp"
#include "tsgait/ppo/ppo.hpp"

namespace tsgait {

// Per-tick log of one evaluation episode.
struct EvalTrajectory {
  std::vector<TickRecord> ticks;
  bool fell = false;
  long steps = 0;  // policy steps executed
};

// Produces episode `episode` at commanded `speed`.
using EvalRollout = std::function<EvalTrajectory(double speed, int episode)>;

struct EvalSettings {
  std::vector<double> speeds;
  int episodes = 1;
  double warmup_s = 2.0;
  double window_s = 8.0;
  int grf_bins = 20;

  double duration_s() const { return warmup_s + window_s; }
};

// Forward displacement over the measurement window divided by its length:
// (x(t1) - x(t0)) / (t1 - t0), t0 the first logged tick at or after warmup_s
// and t1 the last at or before warmup_s + window_s. NaN when the log does
// not reach the end of the window.
double achieved_speed(const std::vector<TickRecord>& ticks, double warmup_s, double window_s);

struct GrfBin {
  double stance_start = 0.0;  // fraction of stance
  double stance_end = 0.0;
  long samples = 0;
  Vec3 grf = Vec3::Zero();  // mean over samples, world frame
};

// Per foot, bins partitioning stance progress [0, 1]. Only ticks with the
// foot's transition weight above 0.5 count; progress is the foot's local
// phase divided by the stance fraction.
using GrfProfile = std::array<std::vector<GrfBin>, 2>;

class GrfAccumulator {
 public:
  GrfAccumulator(const GaitParams& gait, int bins);
  void add(const TickRecord& tick);
  void add(const std::vector<TickRecord>& ticks);
  GrfProfile profile() const;

 private:
  double stance_fraction_;
  int bins_;
  std::array<std::vector<Vec3>, 2> sum_;
  std::array<std::vector<long>, 2> count_;
};

struct SpeedRow {
  double commanded = 0.0;
  double achieved_mean = 0.0;  // over episodes that finished the window
  double achieved_std = 0.0;   // population stddev
  int episodes = 0;
  int falls = 0;
  long steps = 0;
};

struct EvalReport {
  std::vector<SpeedRow> speeds;
  std::vector<GrfProfile> grf;  // per commanded speed
};

// Throws ConfigError for invalid settings.
EvalReport evaluate(const EvalRollout& rollout, const GaitParams& gait,
                    const EvalSettings& settings);

// Deterministic policy (actor mean) on the biped; `policy` must outlive the
// returned rollout. Episode e resets from
// derive_seed(seed, e) with the commanded speed fixed; the horizon is
// stretched to cover the warm-up and measurement windows.
EvalRollout policy_rollout(std::shared_ptr<const RobotModel> model, const EnvConfig& config,
                           const GaussianPolicy& policy, const EvalSettings& settings,
                           std::uint64_t seed);

// commanded_speed,achieved_speed,achieved_speed_std,episodes,falls,steps
void write_speed_tracking(std::ostream& out, const EvalReport& report);
// commanded_speed,foot,bin,stance_start,stance_end,samples,grf_x,grf_y,grf_z
void write_grf_profile(std::ostream& out, const EvalReport& report);

}  // namespace tsgait
