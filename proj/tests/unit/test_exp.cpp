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

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "tsgait/error.hpp"
#include "tsgait/exp/checks.hpp"
#include "tsgait/exp/commands.hpp"

using namespace tsgait;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tsgait_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Drops the last comma-separated field of every data row.
std::string without_last_column(const std::string& csv) {
  std::string out;
  for (const std::string& l : lines(csv)) {
    out += l.front() == '#' ? l : l.substr(0, l.rfind(','));
    out += '\n';
  }
  return out;
}

std::string config_error(const json& doc) {
  try {
    parse_experiment_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

// Constant forward speed, 2 kHz log.
EvalTrajectory scripted(double speed, double duration, double x0 = 0.3) {
  EvalTrajectory t;
  const int n = static_cast<int>(std::lround(duration * 2000.0));
  for (int k = 1; k <= n; ++k) {
    TickRecord r;
    r.time = k / 2000.0;
    r.base_position = Vec3(x0 + speed * r.time, 0.0, 0.95);
    t.ticks.push_back(r);
  }
  t.steps = n / 50;
  return t;
}

ExperimentConfig tiny_config() {
  ExperimentConfig c = parse_experiment_config(json::parse(R"({
    "ppo": {"iterations": 2, "samples_per_iteration": 300, "minibatch": 100, "epochs": 2,
            "hidden_size": 16, "checkpoint_every": 1, "seeds": [1, 2]},
    "experiment": {"eval_speeds": [0.2, 0.6], "eval_warmup_s": 0.05, "eval_window_s": 0.2,
                   "grf_bins": 5, "explore_samples": 60, "explore_seeds": [3]}
  })"));
  resolve(c, default_model());
  return c;
}

std::shared_ptr<const RobotModel> model_ptr() {
  static const auto m = std::make_shared<RobotModel>(default_model());
  return m;
}

}  // namespace

TEST_CASE("experiment config") {
  SUBCASE("empty document gives the defaults") {
    const ExperimentConfig c = parse_experiment_config(json::object());
    CHECK(c.ppo.horizon == 150);
    CHECK(c.env.episode.horizon == 150);
    CHECK(c.ppo.log_sigma == -2.5);
    CHECK(c.experiment.eval_speeds.size() == 11);
    CHECK(c.experiment.explore_scenarios.size() == 4);
    CHECK_FALSE(c.model_path);
  }
  SUBCASE("log sigma follows the action space unless given") {
    CHECK(parse_experiment_config(json::parse(R"({"experiment": {"action_space": "joint"}})"))
              .ppo.log_sigma == -1.5);
    CHECK(parse_experiment_config(
              json::parse(R"({"experiment": {"action_space": "joint"}, "ppo": {"log_sigma": -1}})"))
              .ppo.log_sigma == -1.0);
  }
  SUBCASE("every problem is reported at once") {
    const std::string msg = config_error(json::parse(R"({
      "ppo": {"epochs": 0, "adam_stepsize": "fast", "typo": 1},
      "env": {"contact": {"stiffness": 3}},
      "gait": {"cycle_period": -1},
      "experiment": {"action_space": "cartesian"},
      "extra": {}
    })"));
    CHECK(msg.find("ppo.typo: unknown key") != std::string::npos);
    CHECK(msg.find("env.contact.stiffness: unknown key") != std::string::npos);
    CHECK(msg.find("config.extra: unknown key") != std::string::npos);
    CHECK(msg.find("ppo.adam_stepsize: expected a number") != std::string::npos);
    CHECK(msg.find("ppo.epochs") != std::string::npos);
    CHECK(msg.find("cartesian") != std::string::npos);
  }
  SUBCASE("horizons must agree") {
    CHECK(config_error(json::parse(R"({"env": {"horizon": 100}, "ppo": {"horizon": 120}})"))
              .find("disagree") != std::string::npos);
    const ExperimentConfig c = parse_experiment_config(json::parse(R"({"env": {"horizon": 90}})"));
    CHECK(c.ppo.horizon == 90);
  }
  SUBCASE("gait overrides are checked against the model") {
    ExperimentConfig c = parse_experiment_config(json::parse(R"({"gait": {"cycle_period": -1}})"));
    CHECK_THROWS_AS(resolve(c, default_model()), ConfigError);
    ExperimentConfig d = parse_experiment_config(json::parse(R"({"gait": {"swing_apex": 0.1}})"));
    resolve(d, default_model());
    CHECK(d.env.gait.swing_apex == 0.1);
    CHECK(d.env.gait.total_mass == doctest::Approx(33.0));
  }
  SUBCASE("resolved config round trips") {
    ExperimentConfig c = tiny_config();
    const json j = to_json(c);
    ExperimentConfig back = parse_experiment_config(j);
    resolve(back, default_model());
    CHECK(to_json(back) == j);
  }
}

TEST_CASE("achieved speed") {
  SUBCASE("scripted constant velocity is reported exactly") {
    for (double v : {0.0, 0.1, 0.37, 0.7, 1.0}) {
      const EvalTrajectory t = scripted(v, 10.0);
      CHECK(achieved_speed(t.ticks, 2.0, 8.0) == doctest::Approx(v).epsilon(1e-12));
    }
  }
  SUBCASE("displacement before the warm-up is ignored") {
    EvalTrajectory t = scripted(0.5, 10.0);
    for (TickRecord& r : t.ticks) {
      if (r.time < 2.0) r.base_position.x() = -7.0 * r.time;  // fast start transient
    }
    for (TickRecord& r : t.ticks) {
      if (r.time >= 2.0) r.base_position.x() = -14.0 + 0.5 * (r.time - 2.0);
    }
    CHECK(achieved_speed(t.ticks, 2.0, 8.0) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("uses displacement, not instantaneous velocity") {
    EvalTrajectory t = scripted(0.0, 10.0);
    for (TickRecord& r : t.ticks) r.base_position.x() = 0.1 * std::sin(20.0 * r.time) + 0.4 * r.time;
    const double expect = (t.ticks[19999].base_position.x() - t.ticks[3999].base_position.x()) / 8.0;
    CHECK(achieved_speed(t.ticks, 2.0, 8.0) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("a log ending early gives NaN") {
    CHECK(std::isnan(achieved_speed(scripted(0.5, 6.0).ticks, 2.0, 8.0)));
    CHECK(std::isnan(achieved_speed({}, 2.0, 8.0)));
  }
}

TEST_CASE("GRF binning against a hand-binned fixture") {
  GaitParams g;  // stance fraction 0.6
  std::vector<TickRecord> ticks;
  auto tick = [&](double phase, double phi_l, double phi_r, double fz_l, double fz_r) {
    TickRecord r;
    r.phase = phase;
    r.phi = {phi_l, phi_r};
    r.grf = {Vec3(1.0, 0.0, fz_l), Vec3(-1.0, 0.0, fz_r)};
    ticks.push_back(r);
  };
  // Left foot: local phase = phase. Stance progress = phase / 0.6, 4 bins of 0.15 phase.
  tick(0.02, 0.2, 1.0, 999.0, 100.0);  // left phi <= 0.5 ignored; right local 0.52 -> 0.8667 -> bin 3
  tick(0.10, 1.0, 0.6, 200.0, 50.0);   // left 0.1667 -> bin 0; right local 0.6 -> progress 1.0 -> bin 3
  tick(0.14, 1.0, 0.0, 300.0, 0.0);    // left bin 0
  tick(0.20, 1.0, 0.0, 400.0, 0.0);    // left 0.333 -> bin 1
  tick(0.44, 1.0, 0.0, 500.0, 0.0);    // left 0.733 -> bin 2
  tick(0.46, 1.0, 0.0, 700.0, 0.0);    // left 0.7667 -> bin 3
  tick(0.70, 0.0, 1.0, 0.0, 800.0);    // right local 0.2 -> 0.333 -> bin 1

  GrfAccumulator acc(g, 4);
  acc.add(ticks);
  const GrfProfile p = acc.profile();
  const std::array<long, 4> left_n{2, 1, 1, 1}, right_n{0, 1, 0, 2};
  const std::array<double, 4> left_fz{250.0, 400.0, 500.0, 700.0}, right_fz{0.0, 800.0, 0.0, 75.0};
  for (int b = 0; b < 4; ++b) {
    CHECK(p[0][b].samples == left_n[b]);
    CHECK(p[1][b].samples == right_n[b]);
    CHECK(p[0][b].grf.z() == doctest::Approx(left_fz[b]));
    CHECK(p[1][b].grf.z() == doctest::Approx(right_fz[b]));
    CHECK(p[0][b].stance_start == b / 4.0);
    CHECK(p[0][b].stance_end == (b + 1) / 4.0);
  }
  CHECK(p[0][0].grf.x() == 1.0);
  CHECK_THROWS_AS(GrfAccumulator(g, 0), DomainError);
}

TEST_CASE("evaluation harness on a scripted rollout") {
  EvalSettings s;
  for (int i = 0; i <= 10; ++i) s.speeds.push_back(0.1 * i);
  s.episodes = 2;
  const EvalRollout rollout = [](double speed, int episode) {
    EvalTrajectory t = scripted(speed, 10.0, 0.1 * episode);
    if (speed > 0.95 && episode == 1) {
      t.ticks.resize(3000);
      t.fell = true;
    }
    return t;
  };
  const EvalReport r = evaluate(rollout, GaitParams{}, s);
  std::ostringstream csv;
  write_speed_tracking(csv, r);
  const std::vector<std::string> rows = lines(csv.str());
  REQUIRE(rows.size() == 13);
  CHECK(rows[0] == "# schema_version=1");
  CHECK(rows[1] == "commanded_speed,achieved_speed,achieved_speed_std,episodes,falls,steps");
  CHECK(rows[5].rfind("0.3,0.3,", 0) == 0);
  CHECK(rows[5].substr(rows[5].size() - 8) == ",2,0,800");
  CHECK(rows[12].rfind("1,1,", 0) == 0);
  CHECK(r.speeds[10].falls == 1);
  CHECK(r.speeds[10].episodes == 2);
  for (const SpeedRow& row : r.speeds) CHECK(row.achieved_mean == doctest::Approx(row.commanded).epsilon(1e-12));

  EvalSettings bad = s;
  bad.window_s = 0.0;
  bad.speeds.clear();
  try {
    evaluate(rollout, GaitParams{}, bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("speeds") != std::string::npos);
    CHECK(std::string(e.what()).find("window") != std::string::npos);
  }
}

TEST_CASE("check suite") {
  SUBCASE("pristine configuration passes") {
    std::ostringstream out;
    const auto results = run_checks(parse_experiment_config(json::object()), out);
    CHECK(results.size() > 15);
    for (const CheckResult& r : results) {
      INFO(r.module << "." << r.name << " " << r.detail);
      CHECK(r.passed);
    }
  }
  SUBCASE("negative mass fails the model checks") {
    json doc = default_model_json();
    doc["bodies"][2]["mass"] = -1.0;
    const fs::path dir = scratch("negmass");
    std::ofstream(dir / "bad.json") << doc.dump();
    ExperimentConfig c = parse_experiment_config(json::object());
    c.model_path = (dir / "bad.json").string();
    std::ostringstream out;
    const auto results = run_checks(c, out);
    REQUIRE_FALSE(results.empty());
    CHECK(results[0].module == "model");
    CHECK_FALSE(results[0].passed);
    CHECK(out.str().find("FAIL model.load_and_validate") != std::string::npos);
    CHECK(out.str().find("mass") != std::string::npos);
    // Later checks still ran.
    CHECK(out.str().find("ppo.gradient_clip_bound") != std::string::npos);
  }
}

TEST_CASE("refdump") {
  ExperimentConfig c = parse_experiment_config(json::object());
  resolve(c, default_model());
  const fs::path dir = scratch("refdump");
  CHECK(run_refdump(c, dir) == 1600);
  const auto rows = lines(slurp(dir / "reference_cycle.csv"));
  CHECK(rows.size() == 1602);
  CHECK(rows[0] == "# schema_version=1");
}

TEST_CASE("train, eval and explore commands") {
  const ExperimentConfig c = tiny_config();
  const fs::path a = scratch("train_a"), b = scratch("train_b");
  run_training(c, model_ptr(), a, 1);
  run_training(c, model_ptr(), b, 1);

  SUBCASE("run layout") {
    CHECK(fs::exists(a / "config.json"));
    for (const char* seed : {"seed_1", "seed_2"}) {
      CHECK(fs::exists(a / seed / "training_log.csv"));
      CHECK(fs::exists(a / seed / "checkpoint_0001.ckpt"));
      CHECK(fs::exists(a / seed / "checkpoint_0002.ckpt"));
      CHECK(fs::exists(a / seed / "final.ckpt"));
      const json meta = json::parse(slurp(a / seed / "metadata.json"));
      CHECK(meta["log_sigma"] == -2.5);
      CHECK(meta["action_space"] == "task");
    }
    const auto curve = lines(slurp(a / "learning_curve.csv"));
    REQUIRE(curve.size() == 5);
    CHECK(curve[2] == "iteration,seed_1,seed_2");
    // The written config reproduces the run.
    ExperimentConfig again = load_experiment_config(a / "config.json");
    resolve(again, default_model());
    CHECK(to_json(again) == to_json(c));
  }
  SUBCASE("one worker reproduces every CSV") {
    CHECK(slurp(a / "learning_curve.csv") == slurp(b / "learning_curve.csv"));
    for (const char* seed : {"seed_1", "seed_2"}) {
      CHECK(without_last_column(slurp(a / seed / "training_log.csv")) ==
            without_last_column(slurp(b / seed / "training_log.csv")));
      CHECK(slurp(a / seed / "final.ckpt") == slurp(b / seed / "final.ckpt"));
    }
  }
  SUBCASE("evaluation of a checkpoint") {
    const fs::path e1 = scratch("eval_a"), e2 = scratch("eval_b");
    const EvalReport r = run_evaluation(c, model_ptr(), a / "seed_1" / "final.ckpt", e1, 4);
    run_evaluation(c, model_ptr(), a / "seed_1" / "final.ckpt", e2, 4);
    CHECK(r.speeds.size() == 2);
    CHECK(slurp(e1 / "speed_tracking.csv") == slurp(e2 / "speed_tracking.csv"));
    CHECK(slurp(e1 / "grf_profile.csv") == slurp(e2 / "grf_profile.csv"));
    const auto rows = lines(slurp(e1 / "grf_profile.csv"));
    CHECK(rows.size() == 2 + 2 * 2 * 5);
    for (size_t i = 2; i < rows.size(); ++i) {
      const double fz = std::stod(rows[i].substr(rows[i].rfind(',') + 1));
      CHECK(fz >= 0.0);
    }
    ExperimentConfig joint = c;
    joint.experiment.action_space = ActionSpace::kJoint;
    CHECK_THROWS_AS(run_evaluation(joint, model_ptr(), a / "seed_1" / "final.ckpt", e1, 4),
                    ConfigError);
  }
  SUBCASE("exploration outputs") {
    const fs::path x1 = scratch("explore_a"), x2 = scratch("explore_b");
    const auto outs = run_exploration(c, model_ptr(), x1);
    run_exploration(c, model_ptr(), x2);
    REQUIRE(outs.size() == 4);
    for (const ExploreOutput& o : outs) {
      const std::string text = slurp(o.csv);
      CHECK(lines(text).size() == 2 + 2 * 60);
      CHECK(text == slurp(x2 / o.csv.filename()));
    }
    CHECK(outs[0].csv.filename() == "single_step_task_m2.5_seed3.csv");
    const json report = json::parse(slurp(x1 / "coverage_report.json"));
    CHECK(report["scenarios"].size() == 4);
  }
}
