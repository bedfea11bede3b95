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

#include "tsgait/env/env.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "tsgait/error.hpp"

namespace tsgait {

std::string_view action_space_name(ActionSpace a) {
  return a == ActionSpace::kTask ? "task" : "joint";
}

ActionSpace parse_action_space(std::string_view s) {
  if (s == "task") return ActionSpace::kTask;
  if (s == "joint") return ActionSpace::kJoint;
  throw ConfigError("action space must be \"task\" or \"joint\", got \"" + std::string(s) + "\"");
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::kTimeout: return "timeout";
    case Termination::kFailure: return "failure";
    default: return "none";
  }
}

int EpisodeConfig::ticks_per_step() const {
  return static_cast<int>(std::lround(control_rate / policy_rate));
}

void EpisodeConfig::validate() const {
  std::ostringstream errors;
  if (horizon <= 0) errors << "env.horizon = " << horizon << " must be > 0; ";
  if (!(policy_rate > 0.0)) errors << "env.policy_rate must be > 0; ";
  if (!(control_rate > 0.0)) errors << "env.control_rate must be > 0; ";
  if (policy_rate > 0.0 && control_rate > 0.0) {
    const double ratio = control_rate / policy_rate;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0) {
      errors << "env.control_rate / env.policy_rate = " << ratio
             << " must be a positive integer; ";
    }
  }
  if (substeps < 1) errors << "env.substeps = " << substeps << " must be >= 1; ";
  if (!(init_velocity_perturbation >= 0.0)) {
    errors << "env.init_velocity_perturbation must be >= 0; ";
  }
  if (!(sensor_noise >= 0.0)) errors << "env.sensor_noise must be >= 0; ";
  if (!(init_phase >= 0.0 && init_phase < 1.0)) errors << "env.init_phase must be in [0, 1); ";
  const std::string msg = errors.str();
  if (!msg.empty()) throw ConfigError(msg.substr(0, msg.size() - 2));
}

EnvConfig default_env_config(const RobotModel& model) {
  EnvConfig c;
  c.gait = default_gait_params(model);
  return c;
}

BipedEnv::BipedEnv(std::shared_ptr<const RobotModel> model, EnvConfig config)
    : model_(std::move(model)), config_(std::move(config)), rng_(config_.episode.seed) {
  config_.episode.validate();
  config_.gait.validate();
  config_.contact.validate();
  state_ = GeneralizedState::zero(*model_);
  ik_seed_ = nominal_joint_seed(*model_);
  start(config_.gait.speed_min, 0.0, Vec3::Zero());
}

Observation BipedEnv::reset() {
  const EpisodeConfig& ep = config_.episode;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double speed = ep.speed_command;
  if (ep.randomize_speed) {
    speed = config_.gait.speed_min + (config_.gait.speed_max - config_.gait.speed_min) * unit(rng_);
  }
  const double phase = ep.init_phase_random ? unit(rng_) : ep.init_phase;
  const double b = ep.init_velocity_perturbation;
  Vec3 dv = Vec3::Zero();
  if (b > 0.0) {
    std::uniform_real_distribution<double> pert(-b, b);
    for (int k = 0; k < 3; ++k) dv(k) = pert(rng_);
  }
  return start(speed, phase, dv);
}

Observation BipedEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  return reset();
}

Observation BipedEnv::reset_to(double speed, double phase) {
  return start(speed, phase, Vec3::Zero());
}

Observation BipedEnv::start(double speed, double phase, const Vec3& velocity_perturbation) {
  const RobotModel& model = *model_;
  const GaitParams& gait = config_.gait;
  speed_ = speed;
  phase_ = CyclePhase(phase);
  time_ = 0.0;
  steps_ = 0;
  previous_action_.fill(0.0);

  const ReferenceSample ref = sample(gait, speed_, phase_);
  const VecX q = joint_reference(model, ref, nominal_joint_seed(model));
  // Joint rates that move the feet along the reference.
  const double h = 1e-4;
  const VecX qp = joint_reference(model, sample(gait, speed_, CyclePhase(phase + h)), q);
  const VecX qm = joint_reference(model, sample(gait, speed_, CyclePhase(phase - h)), q);

  state_ = GeneralizedState::zero(model);
  state_.base_position = Vec3(0.0, 0.0, gait.base_height_ref);
  state_.joint_angles = q;
  state_.joint_rates = (qp - qm) / (2.0 * h * gait.cycle_period);
  state_.base_lin_vel = Vec3(speed_, 0.0, 0.0) + velocity_perturbation;
  previous_base_velocity_ = state_.base_lin_vel;
  ik_seed_ = q;
  return observe();
}

ControlCommand BipedEnv::task_command(std::span<const double> action,
                                      const ReferenceSample& ref) const {
  ControlCommand c;
  c.reference = ref;
  const double tb = config_.scaling.task_bound;
  const double jb = config_.scaling.joint_bound;
  for (int f = 0; f < 2; ++f) {
    c.x_delta[f] = tb * Vec3(action[3 * f], action[3 * f + 1], action[3 * f + 2]);
  }
  for (int k = 0; k < 4; ++k) c.theta_delta(k) = jb * action[6 + k];
  return c;
}

VecX BipedEnv::joint_delta(std::span<const double> action) const {
  VecX d(kActDim);
  for (int k = 0; k < kActDim; ++k) d(k) = config_.scaling.joint_bound * action[k];
  return d;
}

VecX BipedEnv::joint_target(const ReferenceSample& ref) {
  const IkResult r = solve_feet_ik(*model_, ref.x_ref, ref.theta_ref, ik_seed_);
  ik_seed_ = r.joint_angles;
  return r.joint_angles;
}

StepOutcome BipedEnv::step(std::span<const double> raw_action) {
  if (raw_action.size() != static_cast<size_t>(kActDim)) {
    throw DomainError("action must have 10 components");
  }
  const RobotModel& model = *model_;
  const EpisodeConfig& ep = config_.episode;
  const int ticks = ep.ticks_per_step();
  const double dt = 1.0 / ep.control_rate;
  const double sub_dt = dt / ep.substeps;
  const int foot_count = static_cast<int>(model.feet().size());

  std::array<double, kActDim> action{};
  for (int k = 0; k < kActDim; ++k) action[k] = std::clamp(raw_action[k], -1.0, 1.0);
  const VecX jdelta = joint_delta(action);

  StepOutcome out;
  std::vector<TickSample> window;
  window.reserve(ticks);
  for (int t = 0; t < ticks; ++t) {
    const ReferenceSample ref = sample(config_.gait, speed_, phase_);
    const DynamicsContext ctx(model, state_);

    VecX tau;
    if (config_.action_space == ActionSpace::kTask) {
      tau = compute_command(model, ctx, state_, task_command(action, ref), config_.gains).tau;
    } else {
      tau = joint_pd_baseline(model, state_, joint_target(ref), jdelta, config_.joint_pd).tau;
    }

    TickSample s;
    for (int f = 0; f < 2 && f < foot_count; ++f) {
      const FootFrame& ff = model.feet()[f];
      s.foot_height[f] = ctx.kin.foot_world[f].z() - config_.contact.ground_height;
      s.foot_velocity[f] = point_velocity_world(model, ctx.kin, ff.body, ff.offset, ctx.nu);
      s.foot_orientation[f] = Eigen::Quaterniond(ctx.kin.foot_rotation_world[f]);
      s.phi[f] = ref.phi[f];
    }
    s.base_position = state_.base_position;
    s.base_velocity = state_.base_lin_vel;
    s.base_acceleration = (state_.base_lin_vel - previous_base_velocity_) / dt;
    s.base_angular_velocity = state_.base_ang_vel;
    s.base_orientation = state_.base_orientation;
    s.base_xvel_ref = ref.base_xvel_ref;
    s.base_zvel_ref = ref.base_zvel_ref;
    s.base_zpos_ref = ref.base_zpos_ref;
    window.push_back(s);
    previous_base_velocity_ = state_.base_lin_vel;

    std::array<Vec3, 2> grf{Vec3::Zero(), Vec3::Zero()};
    try {
      StepResult r =
          step_physics(model, state_, ctx.kin, ctx.mass, tau, config_.contact, sub_dt, ticks_);
      for (int f = 0; f < 2 && f < foot_count; ++f) grf[f] = r.contacts.foot_force[f] / ep.substeps;
      GeneralizedState next = std::move(r.state);
      for (int k = 1; k < ep.substeps; ++k) {
        r = step_physics(model, next, tau, config_.contact, sub_dt, ticks_);
        for (int f = 0; f < 2 && f < foot_count; ++f) {
          grf[f] += r.contacts.foot_force[f] / ep.substeps;
        }
        next = std::move(r.state);
      }
      state_ = std::move(next);
    } catch (const DivergenceError&) {
      out.diverged = true;
    }
    ++ticks_;
    ++out.ticks;
    time_ += dt;
    phase_ = phase_.advanced(dt, config_.gait.cycle_period);
    for (int f = 0; f < 2; ++f) out.mean_grf[f] += grf[f];
    if (log_ticks_) {
      TickRecord rec;
      rec.time = time_;
      rec.phase = ref.phase;
      rec.phi = ref.phi;
      rec.grf = grf;
      rec.base_position = state_.base_position;
      out.tick_log.push_back(rec);
    }
    if (out.diverged || state_.base_position.z() < ep.termination_height) {
      out.termination = Termination::kFailure;
      break;
    }
  }
  for (int f = 0; f < 2; ++f) out.mean_grf[f] /= out.ticks;

  out.breakdown = evaluate_reward(window, action, previous_action_, config_.weights,
                                  config_.reward);
  out.reward = out.breakdown.total;
  previous_action_ = action;
  ++steps_;
  if (out.termination == Termination::kNone && steps_ >= ep.horizon) {
    out.termination = Termination::kTimeout;
  }
  out.done = out.termination != Termination::kNone;
  out.observation = observe();
  return out;
}

Observation BipedEnv::observe() const {
  const RobotModel& model = *model_;
  const Kinematics kin = forward_kinematics(model, state_.joint_angles);
  Observation o{};
  o[obs::kSpeedCommand] = speed_;
  for (int k = 0; k < 3; ++k) {
    o[obs::kBaseLinVel + k] = state_.base_lin_vel(k);
    o[obs::kBaseAngVel + k] = state_.base_ang_vel(k);
    o[obs::kFeetRel + k] = kin.foot_relative[0](k);
    o[obs::kFeetRel + 3 + k] = kin.foot_relative[1](k);
  }
  o[obs::kBaseQuat] = state_.base_orientation.w();
  o[obs::kBaseQuat + 1] = state_.base_orientation.x();
  o[obs::kBaseQuat + 2] = state_.base_orientation.y();
  o[obs::kBaseQuat + 3] = state_.base_orientation.z();
  for (int k = 0; k < kActuated; ++k) {
    o[obs::kJointPos + k] = state_.joint_angles(k);
    o[obs::kJointVel + k] = state_.joint_rates(k);
  }
  const auto [s, c] = phase_encoding(phase_);
  o[obs::kPhase] = s;
  o[obs::kPhase + 1] = c;
  if (config_.episode.sensor_noise > 0.0) {
    // Noise stream derived from the episode clock so observe() stays const
    // and reproducible.
    std::mt19937_64 noise_rng(config_.episode.seed ^ (0x9e3779b97f4a7c15ULL * (ticks_ + 1)));
    std::normal_distribution<double> n(0.0, config_.episode.sensor_noise);
    for (int k = obs::kBaseLinVel; k < obs::kPhase; ++k) o[k] += n(noise_rng);
  }
  return o;
}

TraceWriter::TraceWriter(std::ostream& out) : out_(out) {
  out_ << "# schema_version=1\n";
  out_ << "step,time,termination,base_x,base_y,base_z,quat_w,quat_x,quat_y,quat_z,"
          "base_vx,base_vy,base_vz";
  for (const char* f : {"left", "right"}) {
    out_ << ',' << f << "_foot_x," << f << "_foot_y," << f << "_foot_z";
  }
  for (const char* f : {"left", "right"}) {
    out_ << ',' << f << "_grf_x," << f << "_grf_y," << f << "_grf_z";
  }
  for (int i = 0; i < kRewardTerms; ++i) {
    out_ << ",r_" << reward_term_name(static_cast<RewardTerm>(i));
  }
  out_ << ",reward";
  for (int k = 0; k < kActDim; ++k) out_ << ",a" << k;
  out_ << '\n';
  out_ << std::setprecision(10);
}

void TraceWriter::write(const BipedEnv& env, std::span<const double> action,
                        const StepOutcome& step) {
  const GeneralizedState& s = env.state();
  const Kinematics kin = forward_kinematics(env.model(), s);
  out_ << env.steps() << ',' << env.time() << ',' << termination_name(step.termination);
  for (int k = 0; k < 3; ++k) out_ << ',' << s.base_position(k);
  out_ << ',' << s.base_orientation.w() << ',' << s.base_orientation.x() << ','
       << s.base_orientation.y() << ',' << s.base_orientation.z();
  for (int k = 0; k < 3; ++k) out_ << ',' << s.base_lin_vel(k);
  for (int f = 0; f < 2; ++f) {
    for (int k = 0; k < 3; ++k) out_ << ',' << kin.foot_world[f](k);
  }
  for (int f = 0; f < 2; ++f) {
    for (int k = 0; k < 3; ++k) out_ << ',' << step.mean_grf[f](k);
  }
  for (double r : step.breakdown.terms) out_ << ',' << r;
  out_ << ',' << step.reward;
  for (double a : action) out_ << ',' << a;
  out_ << '\n';
}

}  // namespace tsgait
