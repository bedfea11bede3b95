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

#include <cmath>
#include <iomanip>

#include "tsgait/refgen/gait.hpp"

namespace tsgait {

int write_reference_cycle(std::ostream& out, const GaitParams& params, double speed,
                          double rate_hz) {
  const int rows = static_cast<int>(std::lround(rate_hz * params.cycle_period));
  out << "# schema_version=1\n";
  out << "phase";
  for (const char* f : {"left", "right"}) {
    for (const char* c : {"x_ref_x", "x_ref_y", "x_ref_z", "F_ref_x", "F_ref_y", "F_ref_z",
                          "phi"}) {
      out << ',' << f << '_' << c;
    }
  }
  out << ",base_xvel_ref,base_zvel_ref,base_zpos_ref\n";
  out << std::setprecision(17);
  for (int k = 0; k < rows; ++k) {
    const double phase = static_cast<double>(k) / rows;
    const ReferenceSample s = sample(params, speed, CyclePhase(phase));
    out << phase;
    for (int f = 0; f < 2; ++f) {
      out << ',' << s.x_ref[f].x() << ',' << s.x_ref[f].y() << ',' << s.x_ref[f].z() << ','
          << s.F_ref[f].x() << ',' << s.F_ref[f].y() << ',' << s.F_ref[f].z() << ','
          << s.phi[f];
    }
    out << ',' << s.base_xvel_ref << ',' << s.base_zvel_ref << ',' << s.base_zpos_ref << '\n';
  }
  return rows;
}

}  // namespace tsgait
