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
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "tsgait/env/termination.hpp"
#include "tsgait/ppo/mlp.hpp"

namespace tsgait {

struct PpoConfig {
  int horizon = 150;
  double adam_stepsize = 1e-4;
  int epochs = 8;
  int minibatch = 1024;
  double gamma = 0.99;
  double clip_epsilon = 0.2;
  double max_grad_norm = 0.05;  // per network
  double log_sigma = -2.5;
  int samples_per_iteration = 5000;
  double gae_lambda = 0.95;
  bool normalize_advantages = true;
  bool normalize_observations = false;
  double reward_scale = 1.0;
  int hidden_size = 256;
  double actor_output_gain = 0.01;
  int iterations = 300;
  int checkpoint_every = 25;  // 0 disables intermediate checkpoints
  std::vector<std::uint64_t> seeds{1};

  // Throws ConfigError listing every invalid field.
  void validate() const;
};

// Running per-dimension observation statistics. Disabled instances pass
// observations through unchanged.
struct ObservationNormalizer {
  bool enabled = false;
  double clip = 10.0;
  double count = 0.0;
  std::vector<double> mean;  // empty until sized
  std::vector<double> var;

  void resize(int dim);
  // (x - mean) / sqrt(var + 1e-8), clipped to +-clip.
  std::vector<double> apply(std::span<const double> x) const;
  // Merges the rows of `rows` (n x dim, row-major) into the statistics.
  void update(std::span<const double> rows, int dim);
};

// Fixed-variance diagonal Gaussian over the actor's tanh output.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(int obs_dim, int act_dim, int hidden, double log_sigma);

  Mlp actor;
  std::vector<double> log_sigma;  // per action dimension, not learned
  ObservationNormalizer normalizer;  // shared by actor and critic inputs

  // Network input for a raw observation.
  std::vector<double> input(std::span<const double> observation) const;
  // Deterministic action (the actor mean) for a raw observation.
  std::vector<double> mean_action(std::span<const double> observation) const;

  int obs_dim() const { return actor.inputs(); }
  int act_dim() const { return actor.outputs(); }
  double sigma(int i) const;
  // Density of `raw` (pre-clamp sample) under N(mean, sigma^2).
  double log_prob(std::span<const double> mean, std::span<const double> raw) const;
};

struct ActionSample {
  std::vector<double> action;  // clamped to [-1, 1], sent to the environment
  std::vector<double> raw;     // pre-clamp Gaussian sample
  double log_prob = 0.0;       // of `raw`
};

// `observation` is raw; the policy normalizes it.
ActionSample sample_action(const GaussianPolicy& policy, std::span<const double> observation,
                           std::mt19937_64& rng);

// Minimal environment interface the trainer drives.
struct EnvTransition {
  std::vector<double> observation;
  double reward = 0.0;
  Termination termination = Termination::kNone;
};

class RlEnvironment {
 public:
  virtual ~RlEnvironment() = default;
  virtual int observation_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual std::vector<double> reset() = 0;
  virtual EnvTransition step(std::span<const double> action) = 0;
};

// Builds the environment of worker `worker`; each call must return an
// independently seeded instance.
using EnvFactory = std::function<std::unique_ptr<RlEnvironment>(int worker)>;

struct RolloutBatch {
  int obs_dim = 0;
  int act_dim = 0;
  std::vector<double> observations;  // size() x obs_dim, network inputs
  std::vector<double> raw_observations;  // size() x obs_dim, as returned by the env
  std::vector<double> actions;       // size() x act_dim, pre-clamp samples
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> dones;
  std::vector<Termination> terminations;  // kNone except on episode ends
  std::vector<double> bootstrap_values;   // critic value of the final state on timeouts
  std::vector<double> episode_returns;
  std::vector<int> episode_lengths;

  std::size_t size() const { return rewards.size(); }
  std::span<const double> observation(std::size_t t) const {
    return {observations.data() + t * obs_dim, static_cast<std::size_t>(obs_dim)};
  }
  std::span<const double> action(std::size_t t) const {
    return {actions.data() + t * act_dim, static_cast<std::size_t>(act_dim)};
  }
  void append(const RolloutBatch& other);
};

// Data-parallel collection over persistent, independently seeded workers.
// Worker w keeps its environment and sampling stream across calls, so the
// batch is a function of (seed, worker count, call index).
class RolloutCollector {
 public:
  RolloutCollector(const EnvFactory& factory, int workers, std::uint64_t seed);

  // Runs whole episodes until at least n_timesteps are collected. Worker w
  // is assigned floor or ceil of n/workers steps; batches are concatenated
  // in worker order.
  RolloutBatch collect(const GaussianPolicy& policy, const Mlp& critic, int n_timesteps);

  int workers() const { return static_cast<int>(workers_.size()); }

 private:
  struct Worker {
    std::unique_ptr<RlEnvironment> env;
    std::mt19937_64 rng;
  };
  void run(Worker& w, const GaussianPolicy& policy, const Mlp& critic, int quota,
           RolloutBatch& out) const;

  std::vector<Worker> workers_;
};

// Worker count from TSGAIT_WORKERS, else the hardware concurrency.
int default_worker_count();

struct Advantages {
  std::vector<double> advantages;
  std::vector<double> value_targets;  // unnormalized advantage + value
};

// GAE(lambda). Episodes ending in a timeout bootstrap from the stored
// final-state value, failures from zero. Throws DomainError when the batch
// does not end on an episode boundary.
Advantages gae(const RolloutBatch& batch, double gamma, double lambda, bool normalize);

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, double stepsize, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void step(std::span<double> params, std::span<const double> grad);
  long steps() const { return t_; }

 private:
  double lr_ = 0.0, b1_ = 0.9, b2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  std::vector<double> m_, v_;
};

// Scales `grad` in place so its norm is at most max_norm. Returns the norm
// before clipping.
double clip_grad_norm(std::span<double> grad, double max_norm);

struct LossTerms {
  double actor_loss = 0.0;   // -mean(min(rho A, clip(rho) A))
  double critic_loss = 0.0;  // mean (V - target)^2
  double clip_fraction = 0.0;
  double approx_kl = 0.0;    // mean(old log prob - new log prob)
};

// Clipped-surrogate and value losses over the samples `idx`, with their
// gradients written into actor_grad and critic_grad (overwritten).
LossTerms ppo_loss(const GaussianPolicy& policy, const Mlp& critic, const RolloutBatch& batch,
                   std::span<const double> advantages, std::span<const double> value_targets,
                   std::span<const std::size_t> idx, double clip_epsilon,
                   std::span<double> actor_grad, std::span<double> critic_grad);

// Probability ratios of every batch sample under `policy`.
std::vector<double> probability_ratios(const GaussianPolicy& policy, const RolloutBatch& batch);

struct UpdateStats {
  double actor_loss = 0.0;  // means over minibatches
  double critic_loss = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double max_actor_grad_norm = 0.0;  // before clipping
  double max_critic_grad_norm = 0.0;
  double max_clipped_grad_norm = 0.0;  // after clipping, either network
  int minibatches = 0;
};

// Epochs over shuffled minibatches; the trailing partial minibatch of each
// epoch is used as is. Throws TrainingError on a non-finite loss or gradient.
UpdateStats ppo_update(GaussianPolicy& policy, Mlp& critic, Adam& actor_opt, Adam& critic_opt,
                       const RolloutBatch& batch, const Advantages& adv, const PpoConfig& config,
                       std::mt19937_64& rng);

}  // namespace tsgait
