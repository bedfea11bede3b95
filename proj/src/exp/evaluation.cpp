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

#include "tsgait/exp/evaluation.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "tsgait/error.hpp"
#include "tsgait/exp/biped_rl.hpp"

namespace tsgait {
namespace {

constexpr double kTimeSlack = 1e-9;

}  // namespace

double achieved_speed(const std::vector<TickRecord>& ticks, double warmup_s, double window_s) {
  const double end = warmup_s + window_s;
  const TickRecord* first = nullptr;
  const TickRecord* last = nullptr;
  for (const TickRecord& t : ticks) {
    if (!first && t.time >= warmup_s - kTimeSlack) first = &t;
    if (t.time <= end + kTimeSlack) last = &t;
  }
  if (!first || !last || last->time < end - kTimeSlack || last->time <= first->time) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return (last->base_position.x() - first->base_position.x()) / (last->time - first->time);
}

GrfAccumulator::GrfAccumulator(const GaitParams& gait, int bins)
    : stance_fraction_(gait.stance_fraction()), bins_(bins) {
  if (bins < 1) throw DomainError("GRF bin count must be >= 1");
  for (int f = 0; f < 2; ++f) {
    sum_[f].assign(bins, Vec3::Zero());
    count_[f].assign(bins, 0);
  }
}

void GrfAccumulator::add(const TickRecord& tick) {
  for (Foot foot : kFeet) {
    const int f = static_cast<int>(foot);
    if (!(tick.phi[f] > 0.5)) continue;
    const double progress = foot_local_phase(CyclePhase(tick.phase), foot) / stance_fraction_;
    const int bin = std::min(bins_ - 1, static_cast<int>(std::floor(progress * bins_)));
    sum_[f][bin] += tick.grf[f];
    ++count_[f][bin];
  }
}

void GrfAccumulator::add(const std::vector<TickRecord>& ticks) {
  for (const TickRecord& t : ticks) add(t);
}

GrfProfile GrfAccumulator::profile() const {
  GrfProfile out;
  for (int f = 0; f < 2; ++f) {
    out[f].resize(bins_);
    for (int b = 0; b < bins_; ++b) {
      GrfBin& bin = out[f][b];
      bin.stance_start = static_cast<double>(b) / bins_;
      bin.stance_end = static_cast<double>(b + 1) / bins_;
      bin.samples = count_[f][b];
      if (bin.samples > 0) bin.grf = sum_[f][b] / static_cast<double>(bin.samples);
    }
  }
  return out;
}

EvalReport evaluate(const EvalRollout& rollout, const GaitParams& gait,
                    const EvalSettings& settings) {
  std::ostringstream errors;
  if (settings.speeds.empty()) errors << "no evaluation speeds; ";
  if (settings.episodes < 1) errors << "evaluation episodes must be >= 1; ";
  if (!(settings.warmup_s >= 0.0)) errors << "warm-up must be >= 0; ";
  if (!(settings.window_s > 0.0)) errors << "measurement window must be > 0; ";
  if (settings.grf_bins < 1) errors << "GRF bin count must be >= 1; ";
  if (!errors.str().empty()) {
    const std::string msg = errors.str();
    throw ConfigError(msg.substr(0, msg.size() - 2));
  }

  EvalReport report;
  for (double speed : settings.speeds) {
    SpeedRow row;
    row.commanded = speed;
    GrfAccumulator grf(gait, settings.grf_bins);
    std::vector<double> achieved;
    for (int e = 0; e < settings.episodes; ++e) {
      const EvalTrajectory traj = rollout(speed, e);
      ++row.episodes;
      row.steps += traj.steps;
      if (traj.fell) ++row.falls;
      grf.add(traj.ticks);
      const double v = achieved_speed(traj.ticks, settings.warmup_s, settings.window_s);
      if (!traj.fell && std::isfinite(v)) achieved.push_back(v);
    }
    if (achieved.empty()) {
      row.achieved_mean = row.achieved_std = std::numeric_limits<double>::quiet_NaN();
    } else {
      double mean = 0.0, var = 0.0;
      for (double v : achieved) mean += v;
      mean /= static_cast<double>(achieved.size());
      for (double v : achieved) var += (v - mean) * (v - mean);
      row.achieved_mean = mean;
      row.achieved_std = std::sqrt(var / static_cast<double>(achieved.size()));
    }
    report.speeds.push_back(row);
    report.grf.push_back(grf.profile());
  }
  return report;
}

EvalRollout policy_rollout(std::shared_ptr<const RobotModel> model, const EnvConfig& config,
                           const GaussianPolicy& policy, const EvalSettings& settings,
                           std::uint64_t seed) {
  if (policy.obs_dim() != kObsDim || policy.act_dim() != kActDim) {
    throw ConfigError("checkpoint dimensions " + std::to_string(policy.obs_dim()) + "x" +
                      std::to_string(policy.act_dim()) + " do not match the environment (" +
                      std::to_string(kObsDim) + "x" + std::to_string(kActDim) + ")");
  }
  EnvConfig cfg = config;
  cfg.episode.randomize_speed = false;
  cfg.episode.horizon =
      static_cast<int>(std::ceil(settings.duration_s() * cfg.episode.policy_rate - 1e-9));
  return [model, cfg, &policy, seed](double speed, int episode) {
    EnvConfig c = cfg;
    c.episode.speed_command = speed;
    BipedEnv env(model, c);
    env.set_tick_logging(true);
    Observation obs = env.reset(derive_seed(seed, static_cast<std::uint64_t>(episode)));
    EvalTrajectory traj;
    while (true) {
      const std::vector<double> action = policy.mean_action(obs);
      StepOutcome out = env.step(action);
      ++traj.steps;
      traj.ticks.insert(traj.ticks.end(), out.tick_log.begin(), out.tick_log.end());
      obs = out.observation;
      if (out.done) {
        traj.fell = out.termination == Termination::kFailure;
        break;
      }
    }
    return traj;
  };
}

void write_speed_tracking(std::ostream& out, const EvalReport& report) {
  out << "# schema_version=1\n"
      << "commanded_speed,achieved_speed,achieved_speed_std,episodes,falls,steps\n";
  out << std::setprecision(10);
  for (const SpeedRow& r : report.speeds) {
    out << r.commanded << ',' << r.achieved_mean << ',' << r.achieved_std << ',' << r.episodes
        << ',' << r.falls << ',' << r.steps << '\n';
  }
}

void write_grf_profile(std::ostream& out, const EvalReport& report) {
  out << "# schema_version=1\n"
      << "commanded_speed,foot,bin,stance_start,stance_end,samples,grf_x,grf_y,grf_z\n";
  out << std::setprecision(10);
  for (size_t s = 0; s < report.speeds.size(); ++s) {
    for (int f = 0; f < 2; ++f) {
      const auto& bins = report.grf[s][f];
      for (size_t b = 0; b < bins.size(); ++b) {
        const GrfBin& bin = bins[b];
        out << report.speeds[s].commanded << ',' << (f == 0 ? "left" : "right") << ',' << b
            << ',' << bin.stance_start << ',' << bin.stance_end << ',' << bin.samples << ','
            << bin.grf.x() << ',' << bin.grf.y() << ',' << bin.grf.z() << '\n';
      }
    }
  }
}

}  // namespace tsgait
