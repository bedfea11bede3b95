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

#include "tsgait/ppo/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "tsgait/error.hpp"

namespace tsgait {

void PpoConfig::validate() const {
  std::ostringstream errors;
  auto positive = [&](const char* name, double v) {
    if (!(v > 0.0)) errors << "ppo." << name << " = " << v << " must be > 0; ";
  };
  positive("horizon", horizon);
  positive("adam_stepsize", adam_stepsize);
  positive("epochs", epochs);
  positive("minibatch", minibatch);
  positive("max_grad_norm", max_grad_norm);
  positive("samples_per_iteration", samples_per_iteration);
  positive("hidden_size", hidden_size);
  positive("reward_scale", reward_scale);
  positive("actor_output_gain", actor_output_gain);
  if (!(gamma > 0.0 && gamma <= 1.0)) errors << "ppo.gamma = " << gamma << " must be in (0, 1]; ";
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    errors << "ppo.gae_lambda = " << gae_lambda << " must be in [0, 1]; ";
  }
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
    errors << "ppo.clip_epsilon = " << clip_epsilon << " must be in (0, 1); ";
  }
  if (!std::isfinite(log_sigma)) errors << "ppo.log_sigma must be finite; ";
  if (iterations < 0) errors << "ppo.iterations = " << iterations << " must be >= 0; ";
  if (checkpoint_every < 0) errors << "ppo.checkpoint_every must be >= 0; ";
  if (seeds.empty()) errors << "ppo.seeds must not be empty; ";
  if (minibatch > 0 && samples_per_iteration > 0 && samples_per_iteration < minibatch) {
    errors << "ppo.samples_per_iteration = " << samples_per_iteration
           << " must be >= ppo.minibatch = " << minibatch << "; ";
  }
  const std::string msg = errors.str();
  if (!msg.empty()) throw ConfigError(msg.substr(0, msg.size() - 2));
}

GaussianPolicy::GaussianPolicy(int obs_dim, int act_dim, int hidden, double log_sigma_value)
    : actor(obs_dim, hidden, act_dim, OutputActivation::kTanh),
      log_sigma(act_dim, log_sigma_value) {
  normalizer.resize(obs_dim);
}

void ObservationNormalizer::resize(int dim) {
  mean.assign(dim, 0.0);
  var.assign(dim, 1.0);
  count = 0.0;
}

std::vector<double> ObservationNormalizer::apply(std::span<const double> x) const {
  std::vector<double> out(x.begin(), x.end());
  if (!enabled) return out;
  if (mean.size() != x.size()) throw DomainError("observation size does not match normalizer");
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp((x[i] - mean[i]) / std::sqrt(var[i] + 1e-8), -clip, clip);
  }
  return out;
}

void ObservationNormalizer::update(std::span<const double> rows, int dim) {
  if (mean.size() != static_cast<size_t>(dim)) throw DomainError("normalizer size mismatch");
  const size_t n = rows.size() / dim;
  if (n == 0) return;
  std::vector<double> bm(dim, 0.0), bv(dim, 0.0);
  for (size_t r = 0; r < n; ++r) {
    for (int i = 0; i < dim; ++i) bm[i] += rows[r * dim + i] / n;
  }
  for (size_t r = 0; r < n; ++r) {
    for (int i = 0; i < dim; ++i) {
      const double d = rows[r * dim + i] - bm[i];
      bv[i] += d * d / n;
    }
  }
  // Parallel variance merge.
  const double nb = static_cast<double>(n), total = count + nb;
  for (int i = 0; i < dim; ++i) {
    const double delta = bm[i] - mean[i];
    if (count == 0.0) {
      mean[i] = bm[i];
      var[i] = bv[i];
      continue;
    }
    const double m2 = var[i] * count + bv[i] * nb + delta * delta * count * nb / total;
    mean[i] += delta * nb / total;
    var[i] = m2 / total;
  }
  count = total;
}

std::vector<double> GaussianPolicy::input(std::span<const double> observation) const {
  return normalizer.apply(observation);
}

std::vector<double> GaussianPolicy::mean_action(std::span<const double> observation) const {
  return actor.forward(input(observation));
}

double GaussianPolicy::sigma(int i) const { return std::exp(log_sigma[i]); }

double GaussianPolicy::log_prob(std::span<const double> mean,
                                std::span<const double> raw) const {
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  double lp = 0.0;
  for (int i = 0; i < act_dim(); ++i) {
    const double z = (raw[i] - mean[i]) / sigma(i);
    lp += -0.5 * z * z - log_sigma[i] - half_log_2pi;
  }
  return lp;
}

ActionSample sample_action(const GaussianPolicy& policy, std::span<const double> observation,
                           std::mt19937_64& rng) {
  const std::vector<double> mean = policy.mean_action(observation);
  std::normal_distribution<double> n(0.0, 1.0);
  ActionSample s;
  s.raw.resize(mean.size());
  s.action.resize(mean.size());
  for (size_t i = 0; i < mean.size(); ++i) {
    s.raw[i] = mean[i] + policy.sigma(static_cast<int>(i)) * n(rng);
    s.action[i] = std::clamp(s.raw[i], -1.0, 1.0);
  }
  s.log_prob = policy.log_prob(mean, s.raw);
  return s;
}

void RolloutBatch::append(const RolloutBatch& o) {
  if (obs_dim == 0 && act_dim == 0) {
    obs_dim = o.obs_dim;
    act_dim = o.act_dim;
  }
  auto cat = [](auto& a, const auto& b) { a.insert(a.end(), b.begin(), b.end()); };
  cat(observations, o.observations);
  cat(raw_observations, o.raw_observations);
  cat(actions, o.actions);
  cat(log_probs, o.log_probs);
  cat(rewards, o.rewards);
  cat(values, o.values);
  cat(dones, o.dones);
  cat(terminations, o.terminations);
  cat(bootstrap_values, o.bootstrap_values);
  cat(episode_returns, o.episode_returns);
  cat(episode_lengths, o.episode_lengths);
}

int default_worker_count() {
  if (const char* env = std::getenv("TSGAIT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    throw ConfigError(std::string("TSGAIT_WORKERS must be a positive integer, got \"") + env +
                      "\"");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RolloutCollector::RolloutCollector(const EnvFactory& factory, int workers, std::uint64_t seed) {
  if (workers < 1) throw DomainError("worker count must be >= 1");
  for (int w = 0; w < workers; ++w) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(w), std::uint64_t{0x5eed}};
    workers_.push_back({factory(w), std::mt19937_64(seq)});
  }
}

void RolloutCollector::run(Worker& w, const GaussianPolicy& policy, const Mlp& critic,
                           int quota, RolloutBatch& out) const {
  RlEnvironment& env = *w.env;
  out.obs_dim = env.observation_dim();
  out.act_dim = env.action_dim();
  int collected = 0;
  while (collected < quota) {
    std::vector<double> obs = env.reset();
    double ret = 0.0;
    int len = 0;
    while (true) {
      const std::vector<double> in = policy.input(obs);
      const ActionSample a = sample_action(policy, obs, w.rng);
      const double value = critic.forward(in)[0];
      const EnvTransition tr = env.step(a.action);
      out.observations.insert(out.observations.end(), in.begin(), in.end());
      out.raw_observations.insert(out.raw_observations.end(), obs.begin(), obs.end());
      out.actions.insert(out.actions.end(), a.raw.begin(), a.raw.end());
      out.log_probs.push_back(a.log_prob);
      out.rewards.push_back(tr.reward);
      out.values.push_back(value);
      const bool done = tr.termination != Termination::kNone;
      out.dones.push_back(done ? 1 : 0);
      out.terminations.push_back(tr.termination);
      out.bootstrap_values.push_back(
          tr.termination == Termination::kTimeout ? critic.forward(policy.input(tr.observation))[0]
                                                  : 0.0);
      ret += tr.reward;
      ++len;
      ++collected;
      obs = tr.observation;
      if (done) break;
    }
    out.episode_returns.push_back(ret);
    out.episode_lengths.push_back(len);
  }
}

RolloutBatch RolloutCollector::collect(const GaussianPolicy& policy, const Mlp& critic,
                                       int n_timesteps) {
  const int k = workers();
  std::vector<RolloutBatch> parts(k);
  std::vector<int> quota(k, n_timesteps / k);
  for (int w = 0; w < n_timesteps % k; ++w) ++quota[w];
  if (k == 1) {
    run(workers_[0], policy, critic, quota[0], parts[0]);
  } else {
    std::vector<std::exception_ptr> errors(k);
    std::vector<std::thread> threads;
    for (int w = 0; w < k; ++w) {
      threads.emplace_back([&, w] {
        try {
          run(workers_[w], policy, critic, quota[w], parts[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (std::thread& t : threads) t.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  RolloutBatch batch;
  for (const RolloutBatch& p : parts) batch.append(p);
  return batch;
}

Advantages gae(const RolloutBatch& batch, double gamma, double lambda, bool normalize) {
  const size_t n = batch.size();
  Advantages out;
  out.advantages.assign(n, 0.0);
  out.value_targets.assign(n, 0.0);
  if (n == 0) return out;
  if (!batch.dones[n - 1]) throw DomainError("rollout batch ends mid-episode");
  double next_adv = 0.0;
  for (size_t i = n; i-- > 0;) {
    double next_value;
    if (batch.dones[i]) {
      next_value = batch.terminations[i] == Termination::kTimeout ? batch.bootstrap_values[i] : 0.0;
      next_adv = 0.0;
    } else {
      next_value = batch.values[i + 1];
    }
    const double delta = batch.rewards[i] + gamma * next_value - batch.values[i];
    next_adv = delta + gamma * lambda * next_adv;
    out.advantages[i] = next_adv;
    out.value_targets[i] = next_adv + batch.values[i];
  }
  if (normalize && n > 1) {
    const double mean = std::accumulate(out.advantages.begin(), out.advantages.end(), 0.0) / n;
    double var = 0.0;
    for (double a : out.advantages) var += (a - mean) * (a - mean);
    var /= n;
    const double inv = 1.0 / (std::sqrt(var) + 1e-12);
    for (double& a : out.advantages) a = (a - mean) * inv;
  }
  return out;
}

Adam::Adam(std::size_t n, double stepsize, double beta1, double beta2, double eps)
    : lr_(stepsize), b1_(beta1), b2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw DomainError("optimizer size does not match the parameters");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1_ * m_[i] + (1.0 - b1_) * grad[i];
    v_[i] = b2_ * v_[i] + (1.0 - b2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

double clip_grad_norm(std::span<double> grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : grad) g *= scale;
    // Rounding can leave the scaled norm a few ulps above the bound.
    double after = 0.0;
    for (double g : grad) after += g * g;
    if (std::sqrt(after) > max_norm) {
      const double shrink = std::nextafter(1.0, 0.0) * max_norm / std::sqrt(after);
      for (double& g : grad) g *= shrink;
    }
  }
  return norm;
}

LossTerms ppo_loss(const GaussianPolicy& policy, const Mlp& critic, const RolloutBatch& batch,
                   std::span<const double> advantages, std::span<const double> value_targets,
                   std::span<const std::size_t> idx, double clip_epsilon,
                   std::span<double> actor_grad, std::span<double> critic_grad) {
  std::fill(actor_grad.begin(), actor_grad.end(), 0.0);
  std::fill(critic_grad.begin(), critic_grad.end(), 0.0);
  LossTerms out;
  if (idx.empty()) return out;
  const double inv_b = 1.0 / static_cast<double>(idx.size());
  const int na = policy.act_dim();
  MlpCache actor_cache, critic_cache;
  std::vector<double> out_grad(na);
  for (size_t i : idx) {
    const auto obs = batch.observation(i);
    const auto raw = batch.action(i);

    policy.actor.forward(obs, actor_cache);
    const std::vector<double>& mean = actor_cache.output;
    const double logp = policy.log_prob(mean, raw);
    const double ratio = std::exp(logp - batch.log_probs[i]);
    const double a = advantages[i];
    const double clipped = std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
    const double surr1 = ratio * a, surr2 = clipped * a;
    out.actor_loss -= std::min(surr1, surr2) * inv_b;
    if (std::abs(ratio - 1.0) > clip_epsilon) out.clip_fraction += inv_b;
    out.approx_kl += (batch.log_probs[i] - logp) * inv_b;
    // d(loss)/d(logp); zero where the clipped branch is active and flat.
    const double g_logp = surr1 <= surr2 ? -ratio * a * inv_b : 0.0;
    if (g_logp != 0.0) {
      for (int k = 0; k < na; ++k) {
        const double s2 = policy.sigma(k) * policy.sigma(k);
        out_grad[k] = g_logp * (raw[k] - mean[k]) / s2;
      }
      policy.actor.backward(obs, actor_cache, out_grad, actor_grad);
    }

    critic.forward(obs, critic_cache);
    const double err = critic_cache.output[0] - value_targets[i];
    out.critic_loss += err * err * inv_b;
    const double g_v = 2.0 * err * inv_b;
    critic.backward(obs, critic_cache, std::span(&g_v, 1), critic_grad);
  }
  return out;
}

std::vector<double> probability_ratios(const GaussianPolicy& policy, const RolloutBatch& batch) {
  std::vector<double> r(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const std::vector<double> mean = policy.actor.forward(batch.observation(i));
    r[i] = std::exp(policy.log_prob(mean, batch.action(i)) - batch.log_probs[i]);
  }
  return r;
}

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

UpdateStats ppo_update(GaussianPolicy& policy, Mlp& critic, Adam& actor_opt, Adam& critic_opt,
                       const RolloutBatch& batch, const Advantages& adv, const PpoConfig& config,
                       std::mt19937_64& rng) {
  const size_t n = batch.size();
  if (n < static_cast<size_t>(config.minibatch)) {
    std::ostringstream os;
    os << "batch of " << n << " samples is smaller than the minibatch " << config.minibatch;
    throw DomainError(os.str());
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<double> ga(policy.actor.num_params()), gc(critic.num_params());
  UpdateStats stats;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < n; start += config.minibatch) {
      const size_t len = std::min<size_t>(config.minibatch, n - start);
      const std::span<const size_t> idx(order.data() + start, len);
      const LossTerms l = ppo_loss(policy, critic, batch, adv.advantages, adv.value_targets, idx,
                                   config.clip_epsilon, ga, gc);
      if (!std::isfinite(l.actor_loss) || !std::isfinite(l.critic_loss) || !all_finite(ga) ||
          !all_finite(gc)) {
        std::ostringstream os;
        os << "non-finite update at epoch " << epoch << ", minibatch " << start / config.minibatch
           << ": actor_loss=" << l.actor_loss << " critic_loss=" << l.critic_loss
           << " clip_fraction=" << l.clip_fraction;
        throw TrainingError(os.str());
      }
      stats.max_actor_grad_norm =
          std::max(stats.max_actor_grad_norm, clip_grad_norm(ga, config.max_grad_norm));
      stats.max_critic_grad_norm =
          std::max(stats.max_critic_grad_norm, clip_grad_norm(gc, config.max_grad_norm));
      for (const auto* g : {&ga, &gc}) {
        double sq = 0.0;
        for (double v : *g) sq += v * v;
        stats.max_clipped_grad_norm = std::max(stats.max_clipped_grad_norm, std::sqrt(sq));
      }
      actor_opt.step(policy.actor.params(), ga);
      critic_opt.step(critic.params(), gc);
      stats.actor_loss += l.actor_loss;
      stats.critic_loss += l.critic_loss;
      stats.clip_fraction += l.clip_fraction;
      stats.approx_kl += l.approx_kl;
      ++stats.minibatches;
    }
  }
  const double m = std::max(1, stats.minibatches);
  stats.actor_loss /= m;
  stats.critic_loss /= m;
  stats.clip_fraction /= m;
  stats.approx_kl /= m;
  return stats;
}

}  // namespace tsgait
