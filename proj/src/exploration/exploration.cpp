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

#include "tsgait/exploration/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <unordered_set>

#include "tsgait/error.hpp"

namespace tsgait {

std::string_view noise_mode_name(NoiseMode m) {
  return m == NoiseMode::kSingleStep ? "single_step" : "episode";
}

NoiseMode parse_noise_mode(std::string_view s) {
  if (s == "single_step") return NoiseMode::kSingleStep;
  if (s == "episode") return NoiseMode::kEpisode;
  throw ConfigError("noise mode must be \"single_step\" or \"episode\", got \"" + std::string(s) +
                    "\"");
}

void NoiseStudyConfig::validate() const {
  std::ostringstream errors;
  if (n_samples <= 0) errors << "n_samples = " << n_samples << " must be > 0; ";
  if (!std::isfinite(log_sigma)) errors << "log_sigma must be finite; ";
  if (init_phases.empty()) errors << "init_phases must not be empty; ";
  for (double p : init_phases) {
    if (!(p >= 0.0 && p < 1.0)) errors << "init phase " << p << " is outside [0, 1); ";
  }
  const std::string msg = errors.str();
  if (!msg.empty()) throw ConfigError(msg.substr(0, msg.size() - 2));
}

namespace {

void record(const BipedEnv& env, int episode, int step, bool terminated,
            std::vector<FootSample>& out) {
  const Kinematics kin = forward_kinematics(env.model(), env.state().joint_angles);
  for (int f = 0; f < 2; ++f) {
    out.push_back({episode, step, f, kin.foot_relative[f], terminated});
  }
}

}  // namespace

CoverageReport run_noise_study(std::shared_ptr<const RobotModel> model, const EnvConfig& env_config,
                               const NoiseStudyConfig& config) {
  config.validate();
  EnvConfig ec = env_config;
  ec.action_space = config.action_space;
  ec.episode.seed = config.seed;
  BipedEnv env(std::move(model), ec);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, std::exp(config.log_sigma));
  std::vector<double> action(kActDim);
  auto draw = [&] {
    for (double& a : action) a = noise(rng);
  };

  CoverageReport report;
  report.config = config;
  report.samples.reserve(2 * static_cast<size_t>(config.n_samples));
  const int n_init = static_cast<int>(config.init_phases.size());
  int recorded = 0;
  while (recorded < config.n_samples) {
    env.reset_to(config.speed, config.init_phases[report.episodes % n_init]);
    const int episode = report.episodes++;
    int step = 0;
    while (recorded < config.n_samples) {
      draw();
      const StepOutcome out = env.step(action);
      ++step;
      const bool failed = out.termination == Termination::kFailure;
      if (config.mode == NoiseMode::kEpisode) {
        record(env, episode, step, failed, report.samples);
        ++recorded;
        if (out.done) {
          if (failed) ++report.failures; else ++report.timeouts;
          break;
        }
      } else {
        record(env, episode, step, false, report.samples);
        ++recorded;
        break;
      }
    }
  }
  report.metrics = coverage_metrics(report.samples);
  return report;
}

double convex_hull_area(std::vector<std::array<double, 2>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const size_t n = pts.size();
  if (n < 3) return 0.0;
  auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                  const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::array<double, 2>> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = n - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double area = 0.0;
  for (size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    area += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * std::abs(area);
}

long occupancy_count(std::span<const std::array<double, 2>> points, double cell) {
  std::unordered_set<std::uint64_t> cells;
  for (const auto& p : points) {
    const auto ix = static_cast<std::int64_t>(std::floor(p[0] / cell));
    const auto iy = static_cast<std::int64_t>(std::floor(p[1] / cell));
    cells.insert((static_cast<std::uint64_t>(ix) << 32) ^ static_cast<std::uint32_t>(iy));
  }
  return static_cast<long>(cells.size());
}

CoverageMetrics coverage_metrics(std::span<const FootSample> samples) {
  std::vector<std::array<double, 2>> xz, xy;
  xz.reserve(samples.size());
  xy.reserve(samples.size());
  for (const FootSample& s : samples) {
    xz.push_back({s.position.x(), s.position.z()});
    xy.push_back({s.position.x(), s.position.y()});
  }
  CoverageMetrics m;
  m.occupancy_cells = occupancy_count(xz);
  m.hull_area_xz = convex_hull_area(std::move(xz));
  m.hull_area_xy = convex_hull_area(std::move(xy));
  return m;
}

void write_samples_header(std::ostream& out) {
  out << "# schema_version=1\n"
      << "mode,action_space,seed,episode_id,step,foot,x,y,z,terminated_flag\n";
}

void write_samples(std::ostream& out, const CoverageReport& report) {
  const std::string prefix = std::string(noise_mode_name(report.config.mode)) + ',' +
                             std::string(action_space_name(report.config.action_space)) + ',' +
                             std::to_string(report.config.seed) + ',';
  std::ostringstream os;
  os << std::setprecision(9);
  for (const FootSample& s : report.samples) {
    os << prefix << s.episode << ',' << s.step << ',' << (s.foot == 0 ? "left" : "right") << ','
       << s.position.x() << ',' << s.position.y() << ',' << s.position.z() << ','
       << (s.terminated ? 1 : 0) << '\n';
  }
  out << os.str();
}

}  // namespace tsgait
