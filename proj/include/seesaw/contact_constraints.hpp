// Copyright 2026 The seesaw-balance Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "seesaw/spatial.hpp"

namespace seesaw {

/// Limits for one foot-sized rectangular contact patch.
struct ContactLimits {
  double mu = 0.333;              // friction coefficient
  double foot_half_length = 0.08; // x extent of the sole [m]
  double foot_half_width = 0.04;  // y extent of the sole [m]
  double f_z_min = 5.0;           // minimum normal force [N]
  int pyramid_facets = 4;

  void validate() const;
};

struct LinearInequalities {
  MatX A;
  VecX b;
};

/// Rows A w <= b for a single foot wrench w expressed in the inertial frame;
/// `foot_rotation` maps the sole frame (z = contact normal) to that frame.
/// Encodes the linearized friction pyramid (mu scaled by cos(pi/facets)),
/// f_z >= f_z_min, the CoP box |m_x| <= half_width f_z, |m_y| <=
/// half_length f_z, and the torsional bound |m_z| <= mu f_z.
LinearInequalities friction_constraints(const ContactLimits& limits,
                                        const Rotation& foot_rotation);

/// Block-diagonal stack for a left/right wrench pair (12-vector).
LinearInequalities stacked_contact_constraints(const ContactLimits& limits,
                                               const Rotation& left_rotation,
                                               const Rotation& right_rotation);

}  // namespace seesaw
