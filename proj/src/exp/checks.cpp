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

#include "tsgait/exp/checks.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "tsgait/error.hpp"
#include "tsgait/model/dynamics.hpp"
#include "tsgait/model/kinematics.hpp"
#include "tsgait/ppo/ppo.hpp"
#include "tsgait/simd/dense.hpp"

namespace tsgait {
namespace {

using Detail = std::string;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

GeneralizedState random_state(const RobotModel& model, std::mt19937_64& rng, double range,
                              double vel) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GeneralizedState s = GeneralizedState::zero(model);
  s.base_position = Vec3(u(rng), u(rng), 1.0 + 0.2 * u(rng));
  s.base_orientation = Eigen::Quaterniond(Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng)));
  s.canonicalize();
  for (int i = 0; i < model.num_joints(); ++i) {
    s.joint_angles(i) = range * u(rng);
    s.joint_rates(i) = vel * u(rng);
  }
  s.base_lin_vel = vel * Vec3(u(rng), u(rng), u(rng));
  s.base_ang_vel = vel * Vec3(u(rng), u(rng), u(rng));
  return s;
}

// Bent-knee posture away from the straight-leg singularity.
GeneralizedState standing_state(const RobotModel& model, std::mt19937_64& rng) {
  GeneralizedState s = random_state(model, rng, 0.3, 0.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Foot f : kFeet) {
    s.joint_angles(actuated_index(f, LegJoint::kHipPitch)) = -0.4 + 0.2 * u(rng);
    s.joint_angles(actuated_index(f, LegJoint::kKnee)) = 0.9 + 0.3 * u(rng);
  }
  return s;
}

ControlCommand at_setpoint(const GaitParams& gait, const Kinematics& kin) {
  ControlCommand c;
  c.reference = sample(gait, gait.speed_min, CyclePhase(0.3));
  for (int f = 0; f < 2; ++f) c.reference.x_ref[f] = kin.foot_relative[f];
  return c;
}

class Suite {
 public:
  explicit Suite(std::ostream& out) : out_(out) {}

  void run(const std::string& module, const std::string& name,
           const std::function<Detail()>& check) {
    CheckResult r{module, name, false, ""};
    try {
      r.detail = check();
      r.passed = r.detail.empty() || r.detail.front() != '!';
      if (!r.passed) r.detail.erase(0, 1);
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    out_ << (r.passed ? "PASS " : "FAIL ") << module << '.' << name;
    if (!r.detail.empty()) out_ << "  " << r.detail;
    out_ << '\n';
    results_.push_back(r);
  }

  void fail(const std::string& module, const std::string& name, const std::string& why) {
    run(module, name, [&]() -> Detail { return "!" + why; });
  }

  std::vector<CheckResult> results() && { return std::move(results_); }

 private:
  std::ostream& out_;
  std::vector<CheckResult> results_;
};

// "" on pass, "!..." on failure; the value is appended either way.
Detail bound(double value, double limit, const std::string& what) {
  const std::string text = what + " " + fmt(value) + " (limit " + fmt(limit) + ")";
  return value < limit ? text : "!" + text;
}

void model_checks(Suite& suite, const RobotModel& m) {
  suite.run("model", "mass_matrix_spd", [&] {
    std::mt19937_64 rng(1);
    double worst = INFINITY;
    for (int k = 0; k < 100; ++k) {
      const MatX mm = mass_matrix(m, random_state(m, rng, 1.5, 0.0));
      const double asym = (mm - mm.transpose()).cwiseAbs().maxCoeff();
      if (asym > 1e-12) return "!asymmetry " + fmt(asym);
      Eigen::SelfAdjointEigenSolver<MatX> eig(mm, Eigen::EigenvaluesOnly);
      worst = std::min(worst, eig.eigenvalues()(0));
    }
    return worst > 0.0 ? "min eigenvalue " + fmt(worst) : "!min eigenvalue " + fmt(worst);
  });
  suite.run("model", "mass_matrix_matches_rnea_columns", [&] {
    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const GeneralizedState s = random_state(m, rng, 1.0, 1.0);
      const MatX mm = mass_matrix(m, s);
      const VecX base = inverse_dynamics(m, s, VecX::Zero(m.num_dofs()));
      for (int c = 0; c < m.num_dofs(); ++c) {
        const VecX col = inverse_dynamics(m, s, VecX::Unit(m.num_dofs(), c)) - base;
        worst = std::max(worst, (col - mm.col(c)).cwiseAbs().maxCoeff());
      }
    }
    return bound(worst, 1e-9, "max abs error");
  });
  suite.run("model", "foot_jacobian_matches_finite_differences", [&] {
    std::mt19937_64 rng(3);
    double worst = 0.0;
    const double h = 1e-6;
    for (int k = 0; k < 100; ++k) {
      const GeneralizedState s = random_state(m, rng, 1.0, 0.0);
      for (Foot f : kFeet) {
        const int i = static_cast<int>(f);
        const Mat3X j = foot_jacobian(m, s, f);
        Mat3X fd = Mat3X::Zero(3, m.num_dofs());
        for (int c = 0; c < m.num_joints(); ++c) {
          VecX qp = s.joint_angles, qm = s.joint_angles;
          qp(c) += h;
          qm(c) -= h;
          fd.col(6 + c) = (forward_kinematics(m, qp).foot_relative[i] -
                           forward_kinematics(m, qm).foot_relative[i]) /
                          (2.0 * h);
        }
        worst = std::max(worst, (j - fd).norm() / std::max(1e-12, fd.norm()));
      }
    }
    return bound(worst, 1e-6, "max relative error");
  });
  suite.run("model", "passive_energy_drift", [&] {
    std::mt19937_64 rng(4);
    GeneralizedState s = random_state(m, rng, 0.6, 0.5);
    s.base_position.z() = 5.0;
    ContactParams none;
    none.ground_height = -100.0;
    const double e0 = total_energy(m, s);
    const VecX tau = VecX::Zero(m.num_joints());
    double worst = 0.0;
    for (int k = 0; k < 2000; ++k) {
      s = step_physics(m, s, tau, none, 5e-4, k).state;
      worst = std::max(worst, std::abs(total_energy(m, s) - e0) / std::abs(e0));
    }
    return bound(worst, 0.02, "relative drift over 1 s");
  });
}

void refgen_checks(Suite& suite, const RobotModel& m, const GaitParams& g) {
  suite.run("refgen", "impulse_balance", [&] {
    const int n = static_cast<int>(std::lround(2000.0 * g.cycle_period));
    const double dt = g.cycle_period / n;
    double worst = 0.0;
    for (double speed : {g.speed_min, 0.5 * (g.speed_min + g.speed_max), g.speed_max}) {
      double impulse = 0.0;
      for (int k = 0; k < n; ++k) {
        const ReferenceSample s = sample(g, speed, CyclePhase(static_cast<double>(k) / n));
        impulse += (s.F_ref[0].z() + s.F_ref[1].z()) * dt;
      }
      const double expect = g.total_mass * g.gravity * g.cycle_period;
      worst = std::max(worst, std::abs(impulse - expect) / expect);
    }
    return bound(worst, 0.01, "relative impulse error");
  });
  suite.run("refgen", "transition_weight_and_force_bounds", [&]() -> Detail {
    for (int k = 0; k < 4000; ++k) {
      const ReferenceSample s = sample(g, g.speed_max, CyclePhase(k / 4000.0));
      for (int f = 0; f < 2; ++f) {
        if (!(s.phi[f] >= 0.0 && s.phi[f] <= 1.0)) return "!phi out of [0, 1]";
        if (s.F_ref[f].z() < 0.0) return "!negative vertical force";
        if (s.phi[f] == 0.0 && s.F_ref[f] != Vec3::Zero()) return "!force during swing";
      }
      if (s.phi[0] + s.phi[1] < 1.0 - 1e-12) return "!no foot in stance";
    }
    return "";
  });
  suite.run("refgen", "continuity", [&] {
    const int n = 8000;
    double worst = 0.0;
    ReferenceSample prev = sample(g, g.speed_max, CyclePhase(0.0));
    for (int k = 1; k <= n; ++k) {
      const ReferenceSample s = sample(g, g.speed_max, CyclePhase(static_cast<double>(k % n) / n));
      for (int f = 0; f < 2; ++f) worst = std::max(worst, (s.x_ref[f] - prev.x_ref[f]).norm());
      prev = s;
    }
    return bound(worst, 1e-3, "max foot reference jump per 1/8000 cycle (m)");
  });
  suite.run("refgen", "joint_reference_reaches_feet", [&] {
    double worst = 0.0;
    VecX seed = nominal_joint_seed(m);
    for (int k = 0; k < 32; ++k) {
      const ReferenceSample s = sample(g, 0.5 * (g.speed_min + g.speed_max), CyclePhase(k / 32.0));
      seed = joint_reference(m, s, seed);
      const Kinematics kin = forward_kinematics(m, seed);
      for (int f = 0; f < 2; ++f) worst = std::max(worst, (kin.foot_relative[f] - s.x_ref[f]).norm());
    }
    return bound(worst, 1e-3, "max IK residual (m)");
  });
}

void tsid_checks(Suite& suite, const RobotModel& m, const EnvConfig& env) {
  const TaskGains& gains = env.gains;
  suite.run("tsid", "swing_reproduces_commanded_acceleration", [&] {
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const GeneralizedState s = standing_state(m, rng);
      const DynamicsContext ctx(m, s);
      ControlCommand c = at_setpoint(env.gait, ctx.kin);
      for (int f = 0; f < 2; ++f) c.x_delta[f] = 0.02 * Vec3::Random();
      for (Foot f : kFeet) {
        const int i = static_cast<int>(f);
        const LegTorque t = swing_torque(m, ctx, c, f, gains);
        if (t.singular) continue;
        VecX gen = VecX::Zero(m.num_dofs());
        gen.tail(m.num_joints()) = t.tau;
        const Vec3 xdd = ctx.jac[i] * forward_dynamics(m, s, gen);
        const Vec3 des = gains.kp_swing.cwiseProduct(c.x_delta[i]);
        worst = std::max(worst, (xdd - des).norm() / des.norm());
      }
    }
    return bound(worst, 1e-6, "max relative error");
  });
  suite.run("tsid", "stance_at_setpoint_is_feedforward", [&]() -> Detail {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
      const GeneralizedState s = standing_state(m, rng);
      const DynamicsContext ctx(m, s);
      ControlCommand c = at_setpoint(env.gait, ctx.kin);
      c.reference.F_ref = {Vec3(10.0, -3.0, 250.0), Vec3(-5.0, 2.0, 120.0)};
      for (Foot f : kFeet) {
        const int i = static_cast<int>(f);
        const VecX expect = (ctx.jac[i].transpose() * (-c.reference.F_ref[i])).tail(m.num_joints());
        if (stance_torque(m, ctx, c, f, gains).tau != expect) return "!torque differs from J^T F";
      }
    }
    return "";
  });
  suite.run("tsid", "blend_endpoints", [&]() -> Detail {
    const VecX a = VecX::LinSpaced(m.num_joints(), 0.1, 1.0);
    const VecX b = VecX::LinSpaced(m.num_joints(), -3.0, 2.0);
    if (blend(a, b, 1.0) != a || blend(a, b, 0.0) != b) return "!endpoint not exact";
    return "";
  });
  suite.run("tsid", "worked_gain_examples", [&]() -> Detail {
    TaskGains g;
    g.kp_stance = Vec3(300.0, 150.0, 400.0);
    g.kp_joint = Eigen::Vector2d(100.0, 50.0);
    std::mt19937_64 rng(7);
    const GeneralizedState s = standing_state(m, rng);
    const DynamicsContext ctx(m, s);
    ControlCommand c = at_setpoint(env.gait, ctx.kin);
    c.reference.F_ref = {Vec3::Zero(), Vec3::Zero()};
    c.x_delta[0] = Vec3(0.0, 0.0, 0.01);
    const double fz = stance_force(ctx, c, Foot::kLeft, g).z();
    ControlCommand o;
    o.reference.theta_ref = Eigen::Vector4d(0.1, 0.0, 0.0, 0.0);
    GeneralizedState still = GeneralizedState::zero(m);
    const double tz = orientation_torque(still, o, g)(actuated_index(Foot::kLeft, LegJoint::kHipYaw));
    if (std::abs(fz - 4.0) > 1e-9) return "!stance force " + fmt(fz) + " N, expected 4";
    if (std::abs(tz - 10.0) > 1e-9) return "!joint torque " + fmt(tz) + " Nm, expected 10";
    return "4 N and 10 Nm";
  });
}

void env_checks(Suite& suite, const std::shared_ptr<const RobotModel>& m, const EnvConfig& env) {
  suite.run("env", "contact_law", [&]() -> Detail {
    ContactParams p = env.contact;
    GeneralizedState s = GeneralizedState::zero(*m);
    s.base_position.z() = 5.0;
    for (const Vec3& f : contact_forces(*m, s, p).foot_force) {
      if (f != Vec3::Zero()) return "!force above ground";
    }
    return "";
  });
  suite.run("env", "reset_is_reproducible", [&]() -> Detail {
    BipedEnv a(m, env), b(m, env);
    const Observation oa = a.reset(11), ob = b.reset(11);
    if (oa != ob) return "!observations differ";
    const std::vector<double> zero(kActDim, 0.0);
    const StepOutcome sa = a.step(zero), sb = b.step(zero);
    if (sa.observation != sb.observation || sa.reward != sb.reward) return "!steps differ";
    if (!(sa.reward > 0.0 && sa.reward <= 1.0)) return "!reward " + fmt(sa.reward);
    return "";
  });
}

void reward_checks(Suite& suite, const EnvConfig& env) {
  suite.run("reward", "default_weights_sum_to_one", [&] {
    double sum = 0.0;
    for (double w : RewardWeights{}.w) sum += w;
    return bound(std::abs(sum - 1.0), 1e-12, "|sum - 1|");
  });
  suite.run("reward", "perfect_tracking_is_one", [&] {
    std::vector<TickSample> window;
    for (int k = 0; k < 50; ++k) {
      TickSample s;
      s.phi = {k < 25 ? 1.0 : 0.0, k < 25 ? 0.0 : 1.0};
      for (int f = 0; f < 2; ++f) {
        s.foot_height[f] = s.phi[f] == 1.0 ? 0.0 : env.reward.swing_height;
      }
      s.base_xvel_ref = 0.6;
      s.base_zpos_ref = 0.95;
      s.base_velocity = Vec3(0.6, 0.0, 0.0);
      s.base_position = Vec3(3.0, 0.0, 0.95);
      window.push_back(s);
    }
    const std::vector<double> act(kActDim, 0.2);
    const RewardBreakdown r = evaluate_reward(window, act, act, RewardWeights{}, env.reward);
    return bound(std::abs(r.total - 1.0), 1e-12, "|R - 1|");
  });
}

void ppo_checks(Suite& suite) {
  suite.run("ppo", "network_gradient_matches_finite_differences", [&] {
    std::mt19937_64 rng(8);
    Mlp net(5, 7, 3, OutputActivation::kTanh);
    net.initialize(rng, 1.0);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> x(5), w(3);
    for (double& v : x) v = n(rng);
    for (double& v : w) v = n(rng);
    auto loss = [&](const Mlp& m) {
      const std::vector<double> y = m.forward(x);
      double l = 0.0;
      for (int i = 0; i < 3; ++i) l += w[i] * y[i];
      return l;
    };
    MlpCache cache;
    net.forward(x, cache);
    std::vector<double> grad(net.num_params(), 0.0);
    net.backward(x, cache, w, grad);
    double worst = 0.0;
    for (std::size_t p = 0; p < grad.size(); ++p) {
      Mlp a = net, b = net;
      a.params()[p] += 1e-6;
      b.params()[p] -= 1e-6;
      const double fd = (loss(a) - loss(b)) / 2e-6;
      worst = std::max(worst, std::abs(fd - grad[p]) / std::max(1e-3, std::abs(fd)));
    }
    return bound(worst, 1e-4, "max relative error");
  });
  suite.run("ppo", "gradient_clip_bound", [&] {
    std::vector<double> g(1000);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 5.0);
    for (double& v : g) v = n(rng);
    clip_grad_norm(g, 0.05);
    double norm = 0.0;
    for (double v : g) norm += v * v;
    norm = std::sqrt(norm);
    return norm <= 0.05 ? "norm " + fmt(norm) : "!norm " + fmt(norm);
  });
  suite.run("ppo", "dense_kernels_agree", [&] {
    const simd::DenseKernels* fast = simd::avx2_kernels();
    if (!fast || !simd::cpu_has_avx2()) return std::string("scalar only");
    std::vector<double> a(37), b(37);
    for (int i = 0; i < 37; ++i) {
      a[i] = std::sin(i + 1.0);
      b[i] = std::cos(3.0 * i);
    }
    const double ref = simd::scalar_kernels().dot(a.data(), b.data(), a.size());
    const double got = fast->dot(a.data(), b.data(), a.size());
    return bound(std::abs(ref - got), 1e-12, "dot difference");
  });
}

}  // namespace

std::vector<CheckResult> run_checks(const ExperimentConfig& config, std::ostream& out) {
  Suite suite(out);
  std::shared_ptr<const RobotModel> model;
  suite.run("model", "load_and_validate", [&]() -> Detail {
    model = load_config_model(config);
    return config.model_path ? *config.model_path : "bundled model";
  });
  ExperimentConfig resolved = config;
  bool resolved_ok = false;
  if (model) {
    suite.run("config", "resolve", [&]() -> Detail {
      resolve(resolved, *model);
      resolved_ok = true;
      return "";
    });
  }
  if (model) {
    model_checks(suite, *model);
  } else {
    suite.fail("model", "dynamics", "skipped: model did not load");
  }
  if (model && resolved_ok) {
    refgen_checks(suite, *model, resolved.env.gait);
    tsid_checks(suite, *model, resolved.env);
    env_checks(suite, model, resolved.env);
  } else {
    suite.fail("refgen", "all", "skipped: model or configuration invalid");
    suite.fail("tsid", "all", "skipped: model or configuration invalid");
    suite.fail("env", "all", "skipped: model or configuration invalid");
  }
  reward_checks(suite, resolved.env);
  ppo_checks(suite);
  return std::move(suite).results();
}

}  // namespace tsgait
