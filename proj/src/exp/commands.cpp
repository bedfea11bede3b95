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

#include "tsgait/exp/commands.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "tsgait/error.hpp"
#include "tsgait/exp/biped_rl.hpp"

namespace tsgait {
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string sigma_tag(double log_sigma) {
  std::ostringstream os;
  os << (log_sigma < 0.0 ? 'm' : 'p') << std::abs(log_sigma);
  return os.str();
}

}  // namespace

void write_resolved_config(const fs::path& dir, const ExperimentConfig& config) {
  fs::create_directories(dir);
  write_json(dir / "config.json", to_json(config));
}

void run_training(const ExperimentConfig& config, std::shared_ptr<const RobotModel> model,
                  const fs::path& out_dir, int workers, const TrainProgress& progress) {
  write_resolved_config(out_dir, config);
  const std::string hash = config_hash(to_json(config).dump());
  EnvConfig env = config.env;
  env.action_space = config.experiment.action_space;
  const PpoConfig& ppo = config.ppo;

  std::vector<std::vector<double>> curves;
  for (std::uint64_t seed : ppo.seeds) {
    const fs::path dir = out_dir / ("seed_" + std::to_string(seed));
    fs::create_directories(dir);
    const nlohmann::json meta = {
        {"seed", seed},
        {"action_space", action_space_name(env.action_space)},
        {"log_sigma", ppo.log_sigma},
        {"iterations", ppo.iterations},
        {"samples_per_iteration", ppo.samples_per_iteration},
        {"workers", workers},
        {"config_hash", hash}};
    write_json(dir / "metadata.json", meta);

    Trainer trainer(ppo, biped_env_factory(model, env, seed), kObsDim, kActDim, workers, seed);
    std::ofstream log_file = open_out(dir / "training_log.csv");
    TrainingLog log(log_file);
    std::vector<double> curve;
    for (int it = 0; it < ppo.iterations; ++it) {
      const IterationStats s = trainer.iterate();
      log.write(s);
      curve.push_back(s.mean_ep_reward);
      if (progress) progress(seed, s);
      if (ppo.checkpoint_every > 0 && s.iteration % ppo.checkpoint_every == 0) {
        std::ostringstream name;
        name << "checkpoint_" << std::setw(4) << std::setfill('0') << s.iteration << ".ckpt";
        save_checkpoint(dir / name.str(), trainer.policy(), trainer.critic(), s.iteration, meta);
      }
    }
    save_checkpoint(dir / "final.ckpt", trainer.policy(), trainer.critic(), trainer.iteration(),
                    meta);
    curves.push_back(std::move(curve));
  }

  std::ofstream out = open_out(out_dir / "learning_curve.csv");
  out << "# schema_version=1\n"
      << "# action_space=" << action_space_name(env.action_space) << '\n'
      << "iteration";
  for (std::uint64_t seed : ppo.seeds) out << ",seed_" << seed;
  out << '\n' << std::setprecision(10);
  for (int it = 0; it < ppo.iterations; ++it) {
    out << it + 1;
    for (const auto& c : curves) out << ',' << c[it];
    out << '\n';
  }
}

EvalReport run_evaluation(const ExperimentConfig& config, std::shared_ptr<const RobotModel> model,
                          const fs::path& checkpoint, const fs::path& out_dir,
                          std::uint64_t seed) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const ActionSpace space = config.experiment.action_space;
  if (ckpt.metadata.contains("action_space") &&
      ckpt.metadata["action_space"] != action_space_name(space)) {
    throw ConfigError("checkpoint was trained in " +
                      ckpt.metadata["action_space"].get<std::string>() +
                      " space but the configuration selects " +
                      std::string(action_space_name(space)));
  }
  EnvConfig env = config.env;
  env.action_space = space;
  const ExperimentSettings& x = config.experiment;
  EvalSettings settings{x.eval_speeds, x.eval_episodes, x.eval_warmup_s, x.eval_window_s,
                        x.grf_bins};
  const EvalReport report =
      evaluate(policy_rollout(model, env, ckpt.policy, settings, seed), env.gait, settings);

  write_resolved_config(out_dir, config);
  std::ofstream speed = open_out(out_dir / "speed_tracking.csv");
  write_speed_tracking(speed, report);
  std::ofstream grf = open_out(out_dir / "grf_profile.csv");
  write_grf_profile(grf, report);
  return report;
}

std::string explore_file_name(const ExploreScenario& s, std::uint64_t seed) {
  return std::string(noise_mode_name(s.mode)) + "_" + std::string(action_space_name(s.action_space)) +
         "_" + sigma_tag(s.log_sigma) + "_seed" + std::to_string(seed) + ".csv";
}

std::vector<ExploreOutput> run_exploration(const ExperimentConfig& config,
                                           std::shared_ptr<const RobotModel> model,
                                           const fs::path& out_dir) {
  write_resolved_config(out_dir, config);
  const ExperimentSettings& x = config.experiment;
  std::vector<ExploreOutput> outputs;
  nlohmann::json summary = nlohmann::json::array();
  for (const ExploreScenario& sc : x.explore_scenarios) {
    for (std::uint64_t seed : x.explore_seeds) {
      NoiseStudyConfig study;
      study.mode = sc.mode;
      study.action_space = sc.action_space;
      study.log_sigma = sc.log_sigma;
      study.n_samples = x.explore_samples;
      study.speed = x.explore_speed;
      study.seed = seed;
      ExploreOutput o{sc, seed, out_dir / explore_file_name(sc, seed),
                      run_noise_study(model, config.env, study)};
      std::ofstream csv = open_out(o.csv);
      write_samples_header(csv);
      write_samples(csv, o.report);
      o.report.samples.clear();
      o.report.samples.shrink_to_fit();
      const CoverageMetrics& m = o.report.metrics;
      summary.push_back({{"mode", noise_mode_name(sc.mode)},
                         {"action_space", action_space_name(sc.action_space)},
                         {"log_sigma", sc.log_sigma},
                         {"seed", seed},
                         {"samples_per_foot", study.n_samples},
                         {"episodes", o.report.episodes},
                         {"failures", o.report.failures},
                         {"timeouts", o.report.timeouts},
                         {"hull_area_xz", m.hull_area_xz},
                         {"hull_area_xy", m.hull_area_xy},
                         {"occupancy_cells_xz", m.occupancy_cells},
                         {"csv", o.csv.filename().string()}});
      outputs.push_back(std::move(o));
    }
  }
  write_json(out_dir / "coverage_report.json",
             {{"schema_version", 1}, {"occupancy_cell_m", 0.01}, {"scenarios", summary}});
  return outputs;
}

int run_refdump(const ExperimentConfig& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream out = open_out(out_dir / "reference_cycle.csv");
  return write_reference_cycle(out, config.env.gait, config.experiment.refdump_speed,
                               config.experiment.refdump_rate);
}

}  // namespace tsgait
