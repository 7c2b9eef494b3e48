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

#include "seesaw/robot_model.hpp"
#include "seesaw/spatial.hpp"

namespace seesaw {

// Frame indices used by contact_jacobian row ordering and frame lookups.
inline constexpr int kLeftFootFrame = 0;
inline constexpr int kRightFootFrame = 1;
inline constexpr int kTorsoFrame = 2;

struct FrameMotion {
  Rotation rotation = Rotation::Identity();
  Vec3 position = Vec3::Zero();
  Vec3 linear_velocity = Vec3::Zero();   // of the frame origin, world axes
  Vec3 angular_velocity = Vec3::Zero();  // world axes
};

struct Kinematics {
  std::vector<FrameMotion> links;
  FrameMotion left_foot;
  FrameMotion right_foot;
  FrameMotion torso;
  Vec3 com = Vec3::Zero();
  Vec3 com_velocity = Vec3::Zero();
};

Kinematics forward_kinematics(const RobotModel& model, const RobotState& state);

/// Joint-space mass matrix, (n+6)x(n+6), computed with a composite-rigid-body
/// recursion over world-origin spatial inertias.
MatX mass_matrix(const RobotModel& model, const RobotState& state);

/// Coriolis/centrifugal plus gravity generalized forces h = C(q,nu) nu + G(q),
/// from a Newton-Euler sweep with zero generalized accelerations.
VecX bias_forces(const RobotModel& model, const RobotState& state, double gravity);

/// Stacked feet Jacobian (left rows first), 12 x (n+6), mixed
/// linear/angular rows in the inertial frame.
MatX contact_jacobian(const RobotModel& model, const RobotState& state);

/// Bias spatial accelerations of the feet, d(J nu)/dt at zero acceleration.
VecX jacobian_dot_nu(const RobotModel& model, const RobotState& state);

/// 6 x (n+6) Jacobian of a named fixed frame (kLeftFootFrame, ...).
MatX frame_jacobian(const RobotModel& model, const RobotState& state, int frame_index);

struct CentroidalQuantities {
  Momentum momentum;
  Vec3 com = Vec3::Zero();
  Vec3 com_velocity = Vec3::Zero();
};

/// Robot centroidal momentum as the sum of link momenta transported to the
/// center of mass.
CentroidalQuantities centroidal_momentum(const RobotModel& model, const RobotState& state);

struct CentroidalWrenchMap {
  MatX j_b;  // 12 x 6: j_b' f = resultant of both foot wrenches at the CoM
  MatX j_j;  // 12 x n: joint columns of the contact Jacobian
};

CentroidalWrenchMap centroidal_wrench_map(const RobotModel& model, const RobotState& state);

/// Semi-implicit Euler state update: velocities first, positions with the
/// updated velocities. Base rotation integrates through so3_exp.
RobotState integrate_robot_semi_implicit(const RobotModel& model, const RobotState& state,
                                         const VecX& nu_dot, double dt);

}  // namespace seesaw
