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

/// Semi-cylindrical board rolling on flat ground. The body frame S sits at
/// the board CoM with x along the cylinder axis and z the board normal; the
/// axis stays at height `radius` while rolling and the CoM hangs `com_drop`
/// below the axis along -z.
struct SeesawParams {
  double mass = 4.0;
  Mat3 inertia = (Eigen::Vector3d(0.20, 0.08, 0.09)).asDiagonal();  // in S
  double radius = 0.15;
  double com_drop = 0.11;
  Vec3 foot_offset_left = Vec3(0.0, 0.10, 0.11);   // attachment frames in S
  Vec3 foot_offset_right = Vec3(0.0, -0.10, 0.11);

  void validate() const;  // throws std::invalid_argument
};

struct SeesawState {
  Rotation rotation = Rotation::Identity();  // ^I R_s
  Vec3 com_position = Vec3::Zero();
  Vec6 nu = Vec6::Zero();  // body-frame (v of CoM in S; omega in S)
  double theta = 0.0;      // roll angle, kept in sync with `rotation`

  void validate() const;
};

/// Roll angle of a board orientation, atan2(R32, R33).
double seesaw_roll(const Rotation& r);

/// State factory that fills `theta` from the rotation.
SeesawState make_seesaw_state(const Rotation& r, const Vec3& com_position, const Vec6& nu);

/// Upright state with the CoM over the world origin, contact point on the
/// ground plane.
SeesawState seesaw_rest_state(const SeesawParams& params, double theta = 0.0);

/// blockdiag(m 1_3, ^S I_s); constant in the body frame.
Mat6 seesaw_mass_matrix(const SeesawParams& params);

/// Gyroscopic plus gravity bias in the body frame.
Vec6 seesaw_bias(const SeesawParams& params, const SeesawState& state, double gravity);

struct SeesawContactGeometry {
  Vec3 p_sp;  // seesaw CoM -> ground contact point, world axes
  Vec3 p_sl;  // seesaw CoM -> left foot attachment
  Vec3 p_sr;  // seesaw CoM -> right foot attachment
};

/// Throws std::domain_error when |theta| >= pi/2 (board would leave rolling
/// contact).
SeesawContactGeometry contact_geometry(const SeesawParams& params, const SeesawState& state);

/// 12x6 map from the body-frame board velocity to the stacked world-frame
/// velocities of the two attachment frames.
MatX jacobian_r(const SeesawParams& params, const SeesawState& state);
MatX jacobian_r_points(const Rotation& r, const Vec3& p_sl, const Vec3& p_sr);

/// 5x6 rolling-constraint matrix: contact-point velocity (3 rows) plus
/// world pitch/yaw rates (2 rows); J_s nu = 0 along valid motions.
MatX jacobian_s(const SeesawParams& params, const SeesawState& state);
MatX jacobian_s_point(const Rotation& r, const Vec3& p_sp);

struct JacobianDotTerms {
  VecX jr_dot_nu;  // 12
  VecX js_dot_nu;  // 5
};

/// dJ/dt contracted with nu, by central differences of the Jacobians along
/// the state flow (step 1e-6).
JacobianDotTerms jacobian_dot_terms(const SeesawParams& params, const SeesawState& state,
                                    double step = 1e-6);
/// Same, for attachment vectors anchored to the body (they rotate with it).
JacobianDotTerms jacobian_dot_terms_points(const SeesawParams& params, const SeesawState& state,
                                           const Vec3& p_sl, const Vec3& p_sr,
                                           double step = 1e-6);

/// ^S nu_dot = M_s^-1 (-h_s - J_r' f + J_s' f_s).
Vec6 seesaw_forward_dynamics(const SeesawParams& params, const SeesawState& state,
                             const VecX& f, const VecX& f_s, double gravity);

enum class FrameDirection { ToInertial, ToBody };

/// Applies diag(R, R) (or its transpose) to a 6-D momentum.
Vec6 momentum_frame_transform(const Vec6& h, const Rotation& r, FrameDirection direction);

/// Semi-implicit Euler update mirroring the robot-side integrator.
SeesawState integrate_seesaw_semi_implicit(const SeesawState& state, const Vec6& nu_dot,
                                           double dt);

}  // namespace seesaw
