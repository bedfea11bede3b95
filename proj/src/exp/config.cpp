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

#include "tsgait/exp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "tsgait/error.hpp"

namespace tsgait {
namespace {

using nlohmann::json;

// Reads known keys out of one JSON object and remembers every problem.
class Reader {
 public:
  Reader(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (!obj_.is_object()) {
      errors_.push_back(path_ + ": expected an object");
      valid_ = false;
    }
  }

  bool has(const std::string& key) const { return valid_ && obj_.contains(key); }

  template <typename T>
  bool get(const std::string& key, T& out) {
    if (!valid_) return false;
    seen_.insert(key);
    if (!obj_.contains(key)) return false;
    try {
      assign(obj_.at(key), out);
      return true;
    } catch (const std::exception& e) {
      errors_.push_back(where(key) + ": " + e.what());
      return false;
    }
  }

  const json* child(const std::string& key) {
    if (!valid_) return nullptr;
    seen_.insert(key);
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  // Reports keys that were never asked for.
  void finish() {
    if (!valid_) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) errors_.push_back(where(key) + ": unknown key");
    }
  }

 private:
  static void assign(const json& j, double& out) {
    if (!j.is_number()) throw std::runtime_error("expected a number");
    out = j.get<double>();
  }
  static void assign(const json& j, int& out) {
    if (!j.is_number_integer()) throw std::runtime_error("expected an integer");
    out = j.get<int>();
  }
  static void assign(const json& j, std::uint64_t& out) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
      throw std::runtime_error("expected a non-negative integer");
    }
    out = j.get<std::uint64_t>();
  }
  static void assign(const json& j, bool& out) {
    if (!j.is_boolean()) throw std::runtime_error("expected true or false");
    out = j.get<bool>();
  }
  static void assign(const json& j, std::string& out) {
    if (!j.is_string()) throw std::runtime_error("expected a string");
    out = j.get<std::string>();
  }
  template <typename T>
  static void assign(const json& j, std::vector<T>& out) {
    if (!j.is_array()) throw std::runtime_error("expected an array");
    std::vector<T> v(j.size());
    for (size_t i = 0; i < j.size(); ++i) assign(j[i], v[i]);
    out = std::move(v);
  }
  template <int N>
  static void assign(const json& j, Eigen::Matrix<double, N, 1>& out) {
    if (!j.is_array() || j.size() != N) {
      throw std::runtime_error("expected an array of " + std::to_string(N) + " numbers");
    }
    for (int i = 0; i < N; ++i) assign(j[i], out(i));
  }

  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
  bool valid_ = true;
};

const char* const kGaitKeys[] = {"cycle_period",   "double_support_fraction",
                                 "swing_apex",     "speed_min",
                                 "speed_max",      "base_height_ref",
                                 "total_mass",     "lateral_offset",
                                 "horizontal_force_gain", "gravity",
                                 "neutral_hip_yaw", "neutral_foot_pitch"};

double* gait_field(GaitParams& g, const std::string& key) {
  if (key == "cycle_period") return &g.cycle_period;
  if (key == "double_support_fraction") return &g.double_support_fraction;
  if (key == "swing_apex") return &g.swing_apex;
  if (key == "speed_min") return &g.speed_min;
  if (key == "speed_max") return &g.speed_max;
  if (key == "base_height_ref") return &g.base_height_ref;
  if (key == "total_mass") return &g.total_mass;
  if (key == "lateral_offset") return &g.lateral_offset;
  if (key == "horizontal_force_gain") return &g.horizontal_force_gain;
  if (key == "gravity") return &g.gravity;
  if (key == "neutral_hip_yaw") return &g.neutral_hip_yaw;
  if (key == "neutral_foot_pitch") return &g.neutral_foot_pitch;
  return nullptr;
}

void read_gains(Reader& r, VecX& gains, const std::string& key) {
  if (!r.has(key)) {
    r.child(key);
    return;
  }
  double uniform = 0.0;
  std::vector<double> per_joint;
  const json* j = r.child(key);
  if (j->is_number()) {
    r.get(key, uniform);
    gains = VecX::Constant(kActuated, uniform);
  } else if (r.get(key, per_joint)) {
    if (per_joint.size() != static_cast<size_t>(kActuated)) {
      throw ConfigError(r.where(key) + ": expected 10 values or one number");
    }
    gains = Eigen::Map<const VecX>(per_joint.data(), kActuated);
  }
}

void parse_reward(Reader& env, ExperimentConfig& c, std::vector<std::string>& errors) {
  const json* j = env.child("reward");
  if (!j) return;
  Reader r(*j, "env.reward", errors);
  r.get("swing_height", c.env.reward.swing_height);
  if (const json* w = r.child("weights")) {
    Reader wr(*w, "env.reward.weights", errors);
    for (int i = 0; i < kRewardTerms; ++i) {
      wr.get(std::string(reward_term_name(static_cast<RewardTerm>(i))), c.env.weights.w[i]);
    }
    wr.finish();
  }
  r.finish();
}

void parse_contact(Reader& env, ExperimentConfig& c, std::vector<std::string>& errors) {
  const json* j = env.child("contact");
  if (!j) return;
  Reader r(*j, "env.contact", errors);
  ContactParams& p = c.env.contact;
  r.get("ground_height", p.ground_height);
  r.get("normal_stiffness", p.normal_stiffness);
  r.get("normal_damping", p.normal_damping);
  r.get("friction_coefficient", p.friction_coefficient);
  r.get("tangential_damping", p.tangential_damping);
  r.finish();
}

template <typename F>
void collect(std::vector<std::string>& errors, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    errors.push_back(e.what());
  } catch (const DomainError& e) {
    errors.push_back(e.what());
  }
}

void throw_if(const std::vector<std::string>& errors) {
  if (errors.empty()) return;
  std::ostringstream os;
  os << errors.size() << " configuration error" << (errors.size() == 1 ? "" : "s") << ":";
  for (const std::string& e : errors) os << "\n  " << e;
  throw ConfigError(os.str());
}

json vec_json(const VecX& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

double default_log_sigma(ActionSpace space) {
  return space == ActionSpace::kTask ? -2.5 : -1.5;
}

ExperimentConfig parse_experiment_config(const json& doc) {
  ExperimentConfig c;
  std::vector<std::string> errors;
  Reader root(doc, "config", errors);

  if (const json* j = root.child("model")) {
    Reader r(*j, "model", errors);
    if (r.has("path") && r.child("path")->is_null()) {
      c.model_path.reset();
    } else {
      std::string path;
      if (r.get("path", path)) c.model_path = path;
    }
    r.finish();
  }

  if (const json* j = root.child("gait")) {
    Reader r(*j, "gait", errors);
    for (const char* key : kGaitKeys) {
      double v = 0.0;
      if (r.get(key, v)) c.gait_overrides[key] = v;
    }
    r.finish();
  }

  if (const json* j = root.child("controller")) {
    Reader r(*j, "controller", errors);
    TaskGains& g = c.env.gains;
    r.get("kp_swing", g.kp_swing);
    r.get("kd_swing", g.kd_swing);
    r.get("kp_stance", g.kp_stance);
    r.get("kd_stance", g.kd_stance);
    r.get("kp_joint", g.kp_joint);
    r.get("kd_joint", g.kd_joint);
    collect(errors, [&] { read_gains(r, c.env.joint_pd.kp, "joint_pd_kp"); });
    collect(errors, [&] { read_gains(r, c.env.joint_pd.kd, "joint_pd_kd"); });
    r.get("task_bound", c.env.scaling.task_bound);
    r.get("joint_bound", c.env.scaling.joint_bound);
    r.finish();
  }

  bool env_horizon = false;
  if (const json* j = root.child("env")) {
    Reader r(*j, "env", errors);
    EpisodeConfig& e = c.env.episode;
    env_horizon = r.get("horizon", e.horizon);
    r.get("policy_rate", e.policy_rate);
    r.get("control_rate", e.control_rate);
    r.get("termination_height", e.termination_height);
    r.get("speed_command", e.speed_command);
    r.get("randomize_speed", e.randomize_speed);
    r.get("init_phase_random", e.init_phase_random);
    r.get("init_phase", e.init_phase);
    r.get("init_velocity_perturbation", e.init_velocity_perturbation);
    r.get("seed", e.seed);
    r.get("substeps", e.substeps);
    r.get("sensor_noise", e.sensor_noise);
    parse_contact(r, c, errors);
    parse_reward(r, c, errors);
    r.finish();
  }

  bool ppo_horizon = false;
  if (const json* j = root.child("ppo")) {
    Reader r(*j, "ppo", errors);
    PpoConfig& p = c.ppo;
    ppo_horizon = r.get("horizon", p.horizon);
    r.get("adam_stepsize", p.adam_stepsize);
    r.get("epochs", p.epochs);
    r.get("minibatch", p.minibatch);
    r.get("gamma", p.gamma);
    r.get("clip_epsilon", p.clip_epsilon);
    r.get("max_grad_norm", p.max_grad_norm);
    if (r.has("log_sigma") && r.child("log_sigma")->is_null()) {
      c.log_sigma_explicit = false;
    } else {
      c.log_sigma_explicit = r.get("log_sigma", p.log_sigma);
    }
    r.get("samples_per_iteration", p.samples_per_iteration);
    r.get("gae_lambda", p.gae_lambda);
    r.get("normalize_advantages", p.normalize_advantages);
    r.get("normalize_observations", p.normalize_observations);
    r.get("reward_scale", p.reward_scale);
    r.get("hidden_size", p.hidden_size);
    r.get("actor_output_gain", p.actor_output_gain);
    r.get("iterations", p.iterations);
    r.get("checkpoint_every", p.checkpoint_every);
    r.get("seeds", p.seeds);
    r.finish();
  }

  if (const json* j = root.child("experiment")) {
    Reader r(*j, "experiment", errors);
    ExperimentSettings& x = c.experiment;
    r.get("output_dir", x.output_dir);
    r.get("run_id", x.run_id);
    std::string space;
    if (r.get("action_space", space)) {
      collect(errors, [&] { x.action_space = parse_action_space(space); });
    }
    r.get("workers", x.workers);
    r.get("eval_speeds", x.eval_speeds);
    r.get("eval_episodes", x.eval_episodes);
    r.get("eval_warmup_s", x.eval_warmup_s);
    r.get("eval_window_s", x.eval_window_s);
    r.get("grf_bins", x.grf_bins);
    r.get("explore_samples", x.explore_samples);
    r.get("explore_seeds", x.explore_seeds);
    r.get("explore_speed", x.explore_speed);
    if (const json* s = r.child("explore_scenarios")) {
      if (!s->is_array()) {
        errors.push_back("experiment.explore_scenarios: expected an array");
      } else {
        x.explore_scenarios.clear();
        for (size_t i = 0; i < s->size(); ++i) {
          Reader sr((*s)[i], "experiment.explore_scenarios[" + std::to_string(i) + "]", errors);
          ExploreScenario sc;
          std::string mode, as;
          if (sr.get("mode", mode)) collect(errors, [&] { sc.mode = parse_noise_mode(mode); });
          if (sr.get("action_space", as)) {
            collect(errors, [&] { sc.action_space = parse_action_space(as); });
          }
          sc.log_sigma = default_log_sigma(sc.action_space);
          sr.get("log_sigma", sc.log_sigma);
          sr.finish();
          x.explore_scenarios.push_back(sc);
        }
      }
    }
    r.get("refdump_speed", x.refdump_speed);
    r.get("refdump_rate", x.refdump_rate);
    r.finish();
  }
  root.finish();

  if (env_horizon && ppo_horizon && c.env.episode.horizon != c.ppo.horizon) {
    errors.push_back("env.horizon and ppo.horizon disagree (" +
                     std::to_string(c.env.episode.horizon) + " vs " +
                     std::to_string(c.ppo.horizon) + ")");
  } else if (ppo_horizon) {
    c.env.episode.horizon = c.ppo.horizon;
  } else {
    c.ppo.horizon = c.env.episode.horizon;
  }
  c.env.action_space = c.experiment.action_space;
  if (!c.log_sigma_explicit) c.ppo.log_sigma = default_log_sigma(c.experiment.action_space);

  // Model-independent validation.
  collect(errors, [&] { c.env.episode.validate(); });
  collect(errors, [&] { c.env.contact.validate(); });
  collect(errors, [&] { c.env.gains.validate(); });
  collect(errors, [&] { c.ppo.validate(); });
  const ExperimentSettings& x = c.experiment;
  if (x.run_id.empty()) errors.push_back("experiment.run_id must not be empty");
  if (x.workers < 0) errors.push_back("experiment.workers must be >= 0");
  if (x.eval_speeds.empty()) errors.push_back("experiment.eval_speeds must not be empty");
  if (x.eval_episodes < 1) errors.push_back("experiment.eval_episodes must be >= 1");
  if (!(x.eval_warmup_s >= 0.0)) errors.push_back("experiment.eval_warmup_s must be >= 0");
  if (!(x.eval_window_s > 0.0)) errors.push_back("experiment.eval_window_s must be > 0");
  if (x.grf_bins < 1) errors.push_back("experiment.grf_bins must be >= 1");
  if (x.explore_samples < 1) errors.push_back("experiment.explore_samples must be >= 1");
  if (x.explore_seeds.empty()) errors.push_back("experiment.explore_seeds must not be empty");
  if (!(x.refdump_rate > 0.0)) errors.push_back("experiment.refdump_rate must be > 0");
  if (!(c.env.scaling.task_bound > 0.0)) errors.push_back("controller.task_bound must be > 0");
  if (!(c.env.scaling.joint_bound > 0.0)) errors.push_back("controller.joint_bound must be > 0");
  for (int i = 0; i < kActuated; ++i) {
    if (!(c.env.joint_pd.kp(i) >= 0.0) || !(c.env.joint_pd.kd(i) >= 0.0)) {
      errors.push_back("controller.joint_pd gains must be >= 0");
      break;
    }
  }
  double wsum = 0.0;
  for (double w : c.env.weights.w) {
    if (!(w >= 0.0)) errors.push_back("env.reward.weights must be >= 0");
    wsum += w;
  }
  if (!(wsum > 0.0)) errors.push_back("env.reward.weights must not all be zero");
  throw_if(errors);
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_experiment_config(doc);
}

std::shared_ptr<const RobotModel> load_config_model(const ExperimentConfig& config) {
  if (!config.model_path) return std::make_shared<RobotModel>(default_model());
  return std::make_shared<RobotModel>(load_model(*config.model_path));
}

void resolve(ExperimentConfig& config, const RobotModel& model) {
  GaitParams g = default_gait_params(model);
  for (const auto& [key, value] : config.gait_overrides.items()) *gait_field(g, key) = value;
  std::vector<std::string> errors;
  collect(errors, [&] { g.validate(); });
  const ExperimentSettings& x = config.experiment;
  for (double s : x.eval_speeds) {
    if (s < g.speed_min || s > g.speed_max) {
      errors.push_back("experiment.eval_speeds entry " + std::to_string(s) +
                       " is outside the gait speed range");
    }
  }
  for (double s : {x.explore_speed, x.refdump_speed, config.env.episode.speed_command}) {
    if (s < g.speed_min || s > g.speed_max) {
      errors.push_back("commanded speed " + std::to_string(s) + " is outside the gait speed range");
    }
  }
  throw_if(errors);
  config.env.gait = g;
  for (const char* key : kGaitKeys) config.gait_overrides[key] = *gait_field(g, key);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["model"]["path"] = c.model_path ? json(*c.model_path) : json(nullptr);
  j["gait"] = c.gait_overrides;

  const TaskGains& g = c.env.gains;
  auto v3 = [](const Vec3& v) { return std::vector<double>{v.x(), v.y(), v.z()}; };
  j["controller"] = {{"kp_swing", v3(g.kp_swing)},
                     {"kd_swing", v3(g.kd_swing)},
                     {"kp_stance", v3(g.kp_stance)},
                     {"kd_stance", v3(g.kd_stance)},
                     {"kp_joint", {g.kp_joint(0), g.kp_joint(1)}},
                     {"kd_joint", {g.kd_joint(0), g.kd_joint(1)}},
                     {"joint_pd_kp", vec_json(c.env.joint_pd.kp)},
                     {"joint_pd_kd", vec_json(c.env.joint_pd.kd)},
                     {"task_bound", c.env.scaling.task_bound},
                     {"joint_bound", c.env.scaling.joint_bound}};

  const EpisodeConfig& e = c.env.episode;
  const ContactParams& p = c.env.contact;
  json weights;
  for (int i = 0; i < kRewardTerms; ++i) {
    weights[std::string(reward_term_name(static_cast<RewardTerm>(i)))] = c.env.weights.w[i];
  }
  j["env"] = {{"horizon", e.horizon},
              {"policy_rate", e.policy_rate},
              {"control_rate", e.control_rate},
              {"termination_height", e.termination_height},
              {"speed_command", e.speed_command},
              {"randomize_speed", e.randomize_speed},
              {"init_phase_random", e.init_phase_random},
              {"init_phase", e.init_phase},
              {"init_velocity_perturbation", e.init_velocity_perturbation},
              {"seed", e.seed},
              {"substeps", e.substeps},
              {"sensor_noise", e.sensor_noise},
              {"contact",
               {{"ground_height", p.ground_height},
                {"normal_stiffness", p.normal_stiffness},
                {"normal_damping", p.normal_damping},
                {"friction_coefficient", p.friction_coefficient},
                {"tangential_damping", p.tangential_damping}}},
              {"reward", {{"swing_height", c.env.reward.swing_height}, {"weights", weights}}}};

  const PpoConfig& q = c.ppo;
  j["ppo"] = {{"horizon", q.horizon},
              {"adam_stepsize", q.adam_stepsize},
              {"epochs", q.epochs},
              {"minibatch", q.minibatch},
              {"gamma", q.gamma},
              {"clip_epsilon", q.clip_epsilon},
              {"max_grad_norm", q.max_grad_norm},
              {"log_sigma", c.log_sigma_explicit ? json(q.log_sigma) : json(nullptr)},
              {"samples_per_iteration", q.samples_per_iteration},
              {"gae_lambda", q.gae_lambda},
              {"normalize_advantages", q.normalize_advantages},
              {"normalize_observations", q.normalize_observations},
              {"reward_scale", q.reward_scale},
              {"hidden_size", q.hidden_size},
              {"actor_output_gain", q.actor_output_gain},
              {"iterations", q.iterations},
              {"checkpoint_every", q.checkpoint_every},
              {"seeds", q.seeds}};

  const ExperimentSettings& x = c.experiment;
  json scenarios = json::array();
  for (const ExploreScenario& s : x.explore_scenarios) {
    scenarios.push_back({{"mode", noise_mode_name(s.mode)},
                         {"action_space", action_space_name(s.action_space)},
                         {"log_sigma", s.log_sigma}});
  }
  j["experiment"] = {{"output_dir", x.output_dir},
                     {"run_id", x.run_id},
                     {"action_space", action_space_name(x.action_space)},
                     {"workers", x.workers},
                     {"eval_speeds", x.eval_speeds},
                     {"eval_episodes", x.eval_episodes},
                     {"eval_warmup_s", x.eval_warmup_s},
                     {"eval_window_s", x.eval_window_s},
                     {"grf_bins", x.grf_bins},
                     {"explore_samples", x.explore_samples},
                     {"explore_seeds", x.explore_seeds},
                     {"explore_scenarios", scenarios},
                     {"explore_speed", x.explore_speed},
                     {"refdump_speed", x.refdump_speed},
                     {"refdump_rate", x.refdump_rate}};
  return j;
}

}  // namespace tsgait
