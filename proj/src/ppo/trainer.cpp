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

#include "tsgait/ppo/trainer.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tsgait/error.hpp"

namespace tsgait {

Trainer::Trainer(const PpoConfig& config, const EnvFactory& factory, int obs_dim, int act_dim,
                 int workers, std::uint64_t seed)
    : config_(config),
      rng_(seed),
      policy_(obs_dim, act_dim, config.hidden_size, config.log_sigma),
      critic_(obs_dim, config.hidden_size, 1, OutputActivation::kIdentity),
      collector_(factory, workers, seed),
      start_(std::chrono::steady_clock::now()) {
  config_.validate();
  policy_.normalizer.enabled = config_.normalize_observations;
  policy_.actor.initialize(rng_, config_.actor_output_gain);
  critic_.initialize(rng_, 1.0);
  actor_opt_ = Adam(policy_.actor.num_params(), config_.adam_stepsize);
  critic_opt_ = Adam(critic_.num_params(), config_.adam_stepsize);
}

IterationStats Trainer::iterate() {
  RolloutBatch batch = collector_.collect(policy_, critic_, config_.samples_per_iteration);
  IterationStats s;
  s.iteration = ++iteration_;
  env_steps_ += static_cast<long>(batch.size());
  s.env_steps = env_steps_;
  s.episodes = static_cast<int>(batch.episode_returns.size());
  for (size_t e = 0; e < batch.episode_returns.size(); ++e) {
    s.mean_ep_reward += batch.episode_returns[e] / s.episodes;
    s.mean_ep_len += static_cast<double>(batch.episode_lengths[e]) / s.episodes;
  }
  for (double r : batch.rewards) s.mean_step_reward += r / static_cast<double>(batch.size());

  if (config_.reward_scale != 1.0) {
    for (double& r : batch.rewards) r *= config_.reward_scale;
  }
  const Advantages adv =
      gae(batch, config_.gamma, config_.gae_lambda, config_.normalize_advantages);
  s.update = ppo_update(policy_, critic_, actor_opt_, critic_opt_, batch, adv, config_, rng_);
  // Statistics change only between iterations so stored inputs stay valid.
  if (policy_.normalizer.enabled) {
    policy_.normalizer.update(batch.raw_observations, batch.obs_dim);
  }
  s.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return s;
}

TrainingLog::TrainingLog(std::ostream& out) : out_(out) {
  out_ << "# schema_version=1\n"
       << "iteration,env_steps,mean_ep_reward,mean_ep_len,actor_loss,critic_loss,"
          "clip_fraction,wall_time_s\n";
}

void TrainingLog::write(const IterationStats& s) {
  std::ostringstream row;
  row << std::setprecision(10) << s.iteration << ',' << s.env_steps << ',' << s.mean_ep_reward
      << ',' << s.mean_ep_len << ',' << s.update.actor_loss << ',' << s.update.critic_loss << ','
      << s.update.clip_fraction << ',' << std::fixed << std::setprecision(3) << s.wall_time_s
      << '\n';
  out_ << row.str();
  out_.flush();
}

namespace {

constexpr const char* kFormat = "tsgait-checkpoint";
constexpr int kVersion = 1;

void write_f64(std::ostream& out, std::span<const double> v) {
  for (double d : v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
  }
}

void read_f64(std::istream& in, std::span<double> v, const std::string& what) {
  for (double& d : v) {
    char buf[8];
    if (!in.read(buf, 8)) throw ConfigError("checkpoint truncated in " + what);
    std::uint64_t bits;
    std::memcpy(&bits, buf, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    d = std::bit_cast<double>(bits);
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const GaussianPolicy& policy,
                     const Mlp& critic, int iteration, const nlohmann::json& metadata) {
  nlohmann::json h;
  h["format"] = kFormat;
  h["version"] = kVersion;
  h["obs_dim"] = policy.obs_dim();
  h["act_dim"] = policy.act_dim();
  h["actor_hidden"] = policy.actor.hidden();
  h["critic_hidden"] = critic.hidden();
  h["iteration"] = iteration;
  h["observation_normalization"] = {{"enabled", policy.normalizer.enabled},
                                    {"clip", policy.normalizer.clip},
                                    {"count", policy.normalizer.count}};
  h["metadata"] = metadata;
  h["arrays"] = nlohmann::json::array(
      {{{"name", "actor"}, {"count", policy.actor.num_params()},
        {"order", "W1 row-major, b1, W2 row-major, b2"}},
       {{"name", "log_sigma"}, {"count", policy.log_sigma.size()}},
       {{"name", "critic"}, {"count", critic.num_params()},
        {"order", "W1 row-major, b1, W2 row-major, b2"}},
       {{"name", "obs_mean"}, {"count", policy.normalizer.mean.size()}},
       {{"name", "obs_var"}, {"count", policy.normalizer.var.size()}}});
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out << h.dump() << '\n';
  write_f64(out, policy.actor.params());
  write_f64(out, policy.log_sigma);
  write_f64(out, critic.params());
  write_f64(out, policy.normalizer.mean);
  write_f64(out, policy.normalizer.var);
  if (!out) throw ConfigError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  std::string line;
  std::getline(in, line);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("checkpoint header of " + path.string() + " is not JSON: " + e.what());
  }
  if (h.value("format", "") != kFormat || h.value("version", 0) != kVersion) {
    throw ConfigError("unsupported checkpoint format in " + path.string());
  }
  Checkpoint c;
  try {
    const int obs = h.at("obs_dim"), act = h.at("act_dim");
    c.policy = GaussianPolicy(obs, act, h.at("actor_hidden").get<int>(), 0.0);
    c.critic = Mlp(obs, h.at("critic_hidden").get<int>(), 1, OutputActivation::kIdentity);
    c.iteration = h.at("iteration");
    c.metadata = h.value("metadata", nlohmann::json::object());
    const auto& norm = h.at("observation_normalization");
    c.policy.normalizer.enabled = norm.at("enabled").get<bool>();
    c.policy.normalizer.clip = norm.at("clip").get<double>();
    c.policy.normalizer.count = norm.at("count").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("checkpoint header of " + path.string() + ": " + e.what());
  }
  read_f64(in, c.policy.actor.params(), "actor");
  read_f64(in, c.policy.log_sigma, "log_sigma");
  read_f64(in, c.critic.params(), "critic");
  read_f64(in, c.policy.normalizer.mean, "obs_mean");
  read_f64(in, c.policy.normalizer.var, "obs_var");
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ConfigError("checkpoint " + path.string() + " has trailing bytes");
  }
  return c;
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace tsgait
