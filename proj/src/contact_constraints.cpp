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

#include "seesaw/contact_constraints.hpp"

#include <cmath>
#include <stdexcept>

namespace seesaw {

void ContactLimits::validate() const {
  if (mu <= 0.0) throw std::invalid_argument("contact limits: mu must be > 0");
  if (foot_half_length <= 0.0 || foot_half_width <= 0.0) {
    throw std::invalid_argument("contact limits: sole geometry must be > 0");
  }
  if (f_z_min < 0.0) throw std::invalid_argument("contact limits: f_z_min must be >= 0");
  if (pyramid_facets < 4) throw std::invalid_argument("contact limits: need >= 4 facets");
}

LinearInequalities friction_constraints(const ContactLimits& limits,
                                        const Rotation& foot_rotation) {
  limits.validate();
  const int facets = limits.pyramid_facets;
  const int rows = facets + 7;
  MatX a_local = MatX::Zero(rows, 6);
  VecX b = VecX::Zero(rows);

  // Inner pyramid approximation of the friction cone.
  const double mu_eff = limits.mu * std::cos(M_PI / facets);
  for (int k = 0; k < facets; ++k) {
    const double phi = 2.0 * M_PI * k / facets;
    a_local(k, 0) = std::cos(phi);
    a_local(k, 1) = std::sin(phi);
    a_local(k, 2) = -mu_eff;
  }
  int r = facets;
  // Normal force lower bound: -f_z <= -f_z_min.
  a_local(r, 2) = -1.0;
  b(r) = -limits.f_z_min;
  ++r;
  // CoP inside the sole rectangle.
  a_local(r, 3) = 1.0;
  a_local(r, 2) = -limits.foot_half_width;
  ++r;
  a_local(r, 3) = -1.0;
  a_local(r, 2) = -limits.foot_half_width;
  ++r;
  a_local(r, 4) = 1.0;
  a_local(r, 2) = -limits.foot_half_length;
  ++r;
  a_local(r, 4) = -1.0;
  a_local(r, 2) = -limits.foot_half_length;
  ++r;
  // Torsional friction.
  a_local(r, 5) = 1.0;
  a_local(r, 2) = -limits.mu;
  ++r;
  a_local(r, 5) = -1.0;
  a_local(r, 2) = -limits.mu;

  LinearInequalities out;
  out.A = a_local * block_rotation(foot_rotation).transpose();
  out.b = b;
  return out;
}

LinearInequalities stacked_contact_constraints(const ContactLimits& limits,
                                               const Rotation& left_rotation,
                                               const Rotation& right_rotation) {
  const LinearInequalities left = friction_constraints(limits, left_rotation);
  const LinearInequalities right = friction_constraints(limits, right_rotation);
  LinearInequalities out;
  const int rows = static_cast<int>(left.A.rows());
  out.A = MatX::Zero(2 * rows, 12);
  out.A.topLeftCorner(rows, 6) = left.A;
  out.A.bottomRightCorner(rows, 6) = right.A;
  out.b = VecX(2 * rows);
  out.b << left.b, right.b;
  return out;
}

}  // namespace seesaw
