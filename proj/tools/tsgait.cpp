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

#include <CLI11.hpp>

#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>

#include "tsgait/error.hpp"
#include "tsgait/exp/checks.hpp"
#include "tsgait/exp/commands.hpp"
#include "tsgait/ppo/ppo.hpp"

namespace fs = std::filesystem;
using namespace tsgait;

namespace {

struct Common {
  std::string config;
  std::string output;
  std::vector<std::uint64_t> seeds;
};

void add_common(CLI::App* cmd, Common& c, bool multi_seed) {
  cmd->add_option("--config", c.config, "Experiment config (JSON); defaults when omitted");
  cmd->add_option("--output", c.output, "Output directory (default <output_dir>/<run_id>)");
  if (multi_seed) {
    cmd->add_option("--seeds", c.seeds, "Seed list, e.g. 1,2,3")->delimiter(',');
  } else {
    cmd->add_option("--seed", c.seeds, "Seed")->expected(1);
  }
}

ExperimentConfig base_config(const Common& c) {
  return c.config.empty() ? parse_experiment_config(nlohmann::json::object())
                          : load_experiment_config(c.config);
}

void set_action_space(ExperimentConfig& cfg, const std::string& name) {
  if (name.empty()) return;
  cfg.experiment.action_space = parse_action_space(name);
  cfg.env.action_space = cfg.experiment.action_space;
  if (!cfg.log_sigma_explicit) cfg.ppo.log_sigma = default_log_sigma(cfg.experiment.action_space);
}

fs::path output_dir(const Common& c, const ExperimentConfig& cfg, const char* sub) {
  if (!c.output.empty()) return c.output;
  return fs::path(cfg.experiment.output_dir) / cfg.experiment.run_id / sub;
}

int workers_for(const ExperimentConfig& cfg) {
  return cfg.experiment.workers > 0 ? cfg.experiment.workers : default_worker_count();
}

std::shared_ptr<const RobotModel> prepare(ExperimentConfig& cfg) {
  auto model = load_config_model(cfg);
  resolve(cfg, *model);
  return model;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task-space residual RL for a simulated biped"};
  app.require_subcommand(1);

  Common train_c, eval_c, explore_c, refdump_c, check_c;
  std::string train_space, eval_space, checkpoint;
  std::optional<int> iterations;
  std::vector<double> speeds;
  std::optional<int> samples;
  std::optional<double> ref_speed, ref_rate;

  CLI::App* train = app.add_subcommand("train", "Train policies, one run per seed");
  add_common(train, train_c, true);
  train->add_option("--action-space", train_space, "task or joint");
  train->add_option("--iterations", iterations, "Override ppo.iterations");

  CLI::App* eval = app.add_subcommand("eval", "Speed tracking and GRF profile of a checkpoint");
  add_common(eval, eval_c, false);
  eval->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  eval->add_option("--speeds", speeds, "Commanded speeds, e.g. 0,0.5,1")->delimiter(',');
  eval->add_option("--action-space", eval_space, "task or joint");

  CLI::App* explore = app.add_subcommand("explore", "Exploration-noise foot coverage study");
  add_common(explore, explore_c, true);
  explore->add_option("--samples", samples, "Override experiment.explore_samples");

  CLI::App* refdump = app.add_subcommand("refdump", "Dump one reference cycle as CSV");
  add_common(refdump, refdump_c, false);
  refdump->add_option("--speed", ref_speed, "Commanded speed (m/s)");
  refdump->add_option("--rate", ref_rate, "Sample rate (Hz)");

  CLI::App* check = app.add_subcommand("check", "Run the invariant suite");
  add_common(check, check_c, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      ExperimentConfig cfg = base_config(train_c);
      set_action_space(cfg, train_space);
      if (!train_c.seeds.empty()) cfg.ppo.seeds = train_c.seeds;
      if (iterations) cfg.ppo.iterations = *iterations;
      cfg.ppo.validate();
      auto model = prepare(cfg);
      const fs::path out = output_dir(train_c, cfg, "train");
      const int workers = workers_for(cfg);
      std::cout << "training " << action_space_name(cfg.experiment.action_space) << " space, "
                << cfg.ppo.seeds.size() << " seed(s), " << workers << " worker(s) -> " << out
                << std::endl;
      run_training(cfg, model, out, workers, [](std::uint64_t seed, const IterationStats& s) {
        std::cout << "seed " << seed << " iter " << s.iteration << " reward " << std::fixed
                  << std::setprecision(3) << s.mean_ep_reward << " len " << s.mean_ep_len
                  << " clip " << s.update.clip_fraction << " t " << std::setprecision(1)
                  << s.wall_time_s << "s" << std::defaultfloat << std::endl;
      });
    } else if (*eval) {
      ExperimentConfig cfg = base_config(eval_c);
      set_action_space(cfg, eval_space);
      if (!speeds.empty()) cfg.experiment.eval_speeds = speeds;
      auto model = prepare(cfg);
      const std::uint64_t seed = eval_c.seeds.empty() ? cfg.env.episode.seed : eval_c.seeds[0];
      const fs::path out = output_dir(eval_c, cfg, "eval");
      const EvalReport r = run_evaluation(cfg, model, checkpoint, out, seed);
      for (const SpeedRow& row : r.speeds) {
        std::cout << "commanded " << row.commanded << " achieved " << row.achieved_mean
                  << " falls " << row.falls << "/" << row.episodes << '\n';
      }
      std::cout << "wrote " << out / "speed_tracking.csv" << " and " << out / "grf_profile.csv"
                << std::endl;
    } else if (*explore) {
      ExperimentConfig cfg = base_config(explore_c);
      if (!explore_c.seeds.empty()) cfg.experiment.explore_seeds = explore_c.seeds;
      if (samples) {
        if (*samples < 1) throw ConfigError("--samples must be >= 1");
        cfg.experiment.explore_samples = *samples;
      }
      auto model = prepare(cfg);
      const fs::path out = output_dir(explore_c, cfg, "explore");
      for (const ExploreOutput& o : run_exploration(cfg, model, out)) {
        std::cout << o.csv.filename().string() << " hull_xz " << o.report.metrics.hull_area_xz
                  << " occupancy " << o.report.metrics.occupancy_cells << " failures "
                  << o.report.failures << '\n';
      }
    } else if (*refdump) {
      ExperimentConfig cfg = base_config(refdump_c);
      if (ref_speed) cfg.experiment.refdump_speed = *ref_speed;
      if (ref_rate) {
        if (!(*ref_rate > 0.0)) throw ConfigError("--rate must be > 0");
        cfg.experiment.refdump_rate = *ref_rate;
      }
      prepare(cfg);
      const fs::path out = output_dir(refdump_c, cfg, "refdump");
      const int rows = run_refdump(cfg, out);
      std::cout << "wrote " << rows << " rows to " << out / "reference_cycle.csv" << std::endl;
    } else if (*check) {
      const ExperimentConfig cfg = base_config(check_c);
      const std::vector<CheckResult> results = run_checks(cfg, std::cout);
      int failed = 0;
      for (const CheckResult& r : results) failed += r.passed ? 0 : 1;
      std::cout << results.size() - failed << "/" << results.size() << " checks passed"
                << std::endl;
      return failed == 0 ? kExitOk : kExitInvariant;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged at physics step " << e.step() << ": " << e.what() << '\n';
    return kExitRuntime;
  } catch (const TrainingError& e) {
    std::cerr << "training failed: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
