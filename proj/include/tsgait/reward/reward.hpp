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

#include <array>
#include <span>
#include <string_view>

#include "tsgait/model/spatial.hpp"

#include <Eigen/Geometry>

namespace tsgait {

enum class RewardTerm {
  kLeftFoot = 0,
  kRightFoot,
  kBaseXvel,
  kBaseZvel,
  kBaseZpos,
  kBaseOrientation,
  kBaseStraight,
  kFootOrientation,
  kBaseLinearAccel,
  kBaseAngularVel,
  kActionSmooth,
};
inline constexpr int kRewardTerms = 11;

std::string_view reward_term_name(RewardTerm t);

using RewardVector = std::array<double, kRewardTerms>;

struct RewardWeights {
  RewardVector w{0.1, 0.1, 0.15, 0.1, 0.1, 0.1, 0.15, 0.05, 0.025, 0.025, 0.1};
};

struct RewardBreakdown {
  RewardVector terms{};  // kernelized, each in (0, 1]
  double total = 0.0;
};

// Physical quantities of one control tick.
struct TickSample {
  std::array<double, 2> foot_height{};   // foot point above ground, m
  std::array<Vec3, 2> foot_velocity{Vec3::Zero(), Vec3::Zero()};  // world, m/s
  std::array<double, 2> phi{};
  std::array<Eigen::Quaterniond, 2> foot_orientation{Eigen::Quaterniond::Identity(),
                                                     Eigen::Quaterniond::Identity()};
  Vec3 base_position = Vec3::Zero();     // world
  Vec3 base_velocity = Vec3::Zero();     // world
  Vec3 base_acceleration = Vec3::Zero(); // world, differenced per tick
  Vec3 base_angular_velocity = Vec3::Zero();
  Eigen::Quaterniond base_orientation = Eigen::Quaterniond::Identity();
  double base_xvel_ref = 0.0;
  double base_zvel_ref = 0.0;
  double base_zpos_ref = 0.0;
};

struct RewardParams {
  double swing_height = 0.15;  // m
};

// Per-term costs averaged over the window. `action` and `previous_action`
// are the policy outputs of this and the preceding policy step.
RewardVector eval_terms(std::span<const TickSample> window, std::span<const double> action,
                        std::span<const double> previous_action,
                        const RewardParams& params = {});

// exp(-cost). Throws DomainError for negative cost.
double kernel(double cost);

RewardBreakdown total(const RewardVector& kernelized, const RewardWeights& weights);

// eval_terms, kernel and total in sequence.
RewardBreakdown evaluate_reward(std::span<const TickSample> window,
                                std::span<const double> action,
                                std::span<const double> previous_action,
                                const RewardWeights& weights, const RewardParams& params = {});

// 1 - <q, identity> with q folded to w >= 0.
double orientation_cost(const Eigen::Quaterniond& q);

}  // namespace tsgait
