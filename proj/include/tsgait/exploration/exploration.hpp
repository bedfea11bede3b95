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
#include <span>
#include <string_view>
#include <vector>

#include "tsgait/env/env.hpp"

namespace tsgait {

enum class NoiseMode { kSingleStep, kEpisode };
std::string_view noise_mode_name(NoiseMode m);
// Throws ConfigError.
NoiseMode parse_noise_mode(std::string_view s);

struct NoiseStudyConfig {
  NoiseMode mode = NoiseMode::kEpisode;
  ActionSpace action_space = ActionSpace::kTask;
  double log_sigma = -2.5;
  int n_samples = 50000;  // recorded positions per foot
  std::vector<double> init_phases{0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875};
  double speed = 0.5;     // commanded speed of the init states
  std::uint64_t seed = 1;

  // Throws ConfigError.
  void validate() const;
};

// Foot position relative to the base after one policy step.
struct FootSample {
  int episode = 0;
  int step = 0;  // policy step within the episode, 1-based
  int foot = 0;
  Vec3 position = Vec3::Zero();
  bool terminated = false;  // episode ended on this step with a failure
};

struct CoverageMetrics {
  double hull_area_xz = 0.0;  // m^2
  double hull_area_xy = 0.0;
  long occupancy_cells = 0;   // distinct 1 cm cells in xz
};

struct CoverageReport {
  NoiseStudyConfig config;
  std::vector<FootSample> samples;  // n_samples per foot
  CoverageMetrics metrics;
  int episodes = 0;
  int failures = 0;
  int timeouts = 0;
};

// Zero-mean Gaussian actions in the configured action space, recorded in
// the base frame. Single-step mode resets to one of the init states before
// every sample; episode mode draws a fresh action each step until the
// episode ends, cycling through the init states as episode starts.
CoverageReport run_noise_study(std::shared_ptr<const RobotModel> model, const EnvConfig& env,
                               const NoiseStudyConfig& config);

// Area of the convex hull (monotone chain). Fewer than three points or a
// collinear set give 0.
double convex_hull_area(std::vector<std::array<double, 2>> points);

// Number of distinct cells of side `cell` touched by the points.
long occupancy_count(std::span<const std::array<double, 2>> points, double cell = 0.01);

CoverageMetrics coverage_metrics(std::span<const FootSample> samples);

// Raw rows: mode, action_space, seed, episode_id, step, foot, x, y, z, terminated_flag.
void write_samples_header(std::ostream& out);
void write_samples(std::ostream& out, const CoverageReport& report);

}  // namespace tsgait
