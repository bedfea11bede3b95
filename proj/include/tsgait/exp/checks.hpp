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

#include <ostream>
#include <string>
#include <vector>

#include "tsgait/exp/config.hpp"

namespace tsgait {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

// Runs the invariant suite for the configured model and parameters. Every
// check runs even after failures; checks that need an unusable model are
// reported as failed with the reason. One line per check goes to `out`.
std::vector<CheckResult> run_checks(const ExperimentConfig& config, std::ostream& out);

}  // namespace tsgait
