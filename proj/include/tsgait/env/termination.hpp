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

#include <string_view>

namespace tsgait {

// How an episode ended. Timeouts are truncations (the value of the final
// state is bootstrapped); failures are terminal.
enum class Termination { kNone, kTimeout, kFailure };

std::string_view termination_name(Termination t);

}  // namespace tsgait
