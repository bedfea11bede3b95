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

#include "tsgait/reward/reward.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tsgait/error.hpp"

namespace tsgait {
namespace {

constexpr std::array<std::string_view, kRewardTerms> kNames{
    "lfoot",          "rfoot",         "base_xvel",         "base_zvel",
    "base_zpos",      "base_orientation", "base_straight",  "foot_orientation",
    "base_linear_accel", "base_angular_vel", "action_smooth"};

double& at(RewardVector& v, RewardTerm t) { return v[static_cast<int>(t)]; }

}  // namespace

std::string_view reward_term_name(RewardTerm t) { return kNames[static_cast<int>(t)]; }

double orientation_cost(const Eigen::Quaterniond& q) {
  const double w = std::abs(q.w()) / q.norm();
  return std::max(0.0, 1.0 - w);
}

RewardVector eval_terms(std::span<const TickSample> window, std::span<const double> action,
                        std::span<const double> previous_action, const RewardParams& params) {
  if (window.empty()) throw DomainError("reward window is empty");
  if (action.size() != previous_action.size()) {
    throw DomainError("action and previous action differ in size");
  }
  RewardVector sum{};
  for (const TickSample& s : window) {
    for (int f = 0; f < 2; ++f) {
      const double h = s.foot_height[f];
      const double stance = h * h + s.foot_velocity[f].norm();
      const double gap = params.swing_height - h;
      const double swing = 40.0 * gap * gap;
      sum[f] += s.phi[f] * stance + (1.0 - s.phi[f]) * swing;
    }
    at(sum, RewardTerm::kBaseXvel) += 3.0 * std::abs(s.base_velocity.x() - s.base_xvel_ref);
    at(sum, RewardTerm::kBaseZvel) += 3.0 * std::abs(s.base_velocity.z() - s.base_zvel_ref);
    at(sum, RewardTerm::kBaseZpos) += 3.0 * std::abs(s.base_position.z() - s.base_zpos_ref);
    at(sum, RewardTerm::kBaseOrientation) += 50.0 * orientation_cost(s.base_orientation);
    at(sum, RewardTerm::kBaseStraight) +=
        5.0 * std::abs(s.base_position.y()) + 3.0 * std::abs(s.base_velocity.y());
    at(sum, RewardTerm::kFootOrientation) +=
        30.0 * 0.5 *
        (orientation_cost(s.foot_orientation[0]) + orientation_cost(s.foot_orientation[1]));
    at(sum, RewardTerm::kBaseLinearAccel) += s.base_acceleration.norm();
    at(sum, RewardTerm::kBaseAngularVel) += s.base_angular_velocity.norm();
  }
  const double n = static_cast<double>(window.size());
  for (double& v : sum) v /= n;

  double diff2 = 0.0;
  for (size_t i = 0; i < action.size(); ++i) {
    const double d = action[i] - previous_action[i];
    diff2 += d * d;
  }
  at(sum, RewardTerm::kActionSmooth) = 3.0 * std::sqrt(diff2);
  return sum;
}

double kernel(double cost) {
  if (!(cost >= 0.0)) {
    std::ostringstream os;
    os << "reward cost " << cost << " is negative";
    throw DomainError(os.str());
  }
  // Floor at the smallest normal double so the term stays strictly positive.
  return std::max(std::exp(-cost), std::numeric_limits<double>::min());
}

RewardBreakdown total(const RewardVector& kernelized, const RewardWeights& weights) {
  RewardBreakdown out;
  out.terms = kernelized;
  for (int i = 0; i < kRewardTerms; ++i) out.total += weights.w[i] * kernelized[i];
  return out;
}

RewardBreakdown evaluate_reward(std::span<const TickSample> window,
                                std::span<const double> action,
                                std::span<const double> previous_action,
                                const RewardWeights& weights, const RewardParams& params) {
  RewardVector costs = eval_terms(window, action, previous_action, params);
  for (double& c : costs) c = kernel(c);
  return total(costs, weights);
}

}  // namespace tsgait
