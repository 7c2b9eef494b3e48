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

#include "seesaw/seesaw_dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace seesaw {

namespace {

Eigen::SelfAdjointEigenSolver<Mat3> spd_check(const Mat3& m) {
  return Eigen::SelfAdjointEigenSolver<Mat3>(m);
}

}  // namespace

void SeesawParams::validate() const {
  if (mass <= 0.0) throw std::invalid_argument("seesaw: mass must be > 0");
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-9 ||
      spd_check(inertia).eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("seesaw: inertia must be symmetric positive definite");
  }
  if (radius <= 0.0) throw std::invalid_argument("seesaw: radius must be > 0");
  if (com_drop < 0.0 || com_drop >= radius) {
    throw std::invalid_argument("seesaw: com_drop must lie in [0, radius)");
  }
}

void SeesawState::validate() const {
  if (!is_valid_rotation(rotation)) throw std::invalid_argument("seesaw state: invalid rotation");
  if (!nu.allFinite() || !com_position.allFinite()) {
    throw std::invalid_argument("seesaw state: non-finite entries");
  }
  if (std::abs(theta) >= M_PI / 2.0) {
    throw std::invalid_argument("seesaw state: |theta| must be < pi/2");
  }
}

double seesaw_roll(const Rotation& r) { return std::atan2(r(2, 1), r(2, 2)); }

SeesawState make_seesaw_state(const Rotation& r, const Vec3& com_position, const Vec6& nu) {
  SeesawState s;
  s.rotation = r;
  s.com_position = com_position;
  s.nu = nu;
  s.theta = seesaw_roll(r);
  return s;
}

SeesawState seesaw_rest_state(const SeesawParams& params, double theta) {
  const Rotation r = so3_exp(Vec3(theta, 0.0, 0.0));
  // Axis at height radius; CoM hangs com_drop below it along the board -z.
  const Vec3 axis_point(0.0, 0.0, params.radius);
  const Vec3 com = axis_point - r * Vec3(0.0, 0.0, params.com_drop);
  return make_seesaw_state(r, com, Vec6::Zero());
}

Mat6 seesaw_mass_matrix(const SeesawParams& params) {
  Mat6 m = Mat6::Zero();
  m.block<3, 3>(0, 0) = params.mass * Mat3::Identity();
  m.block<3, 3>(3, 3) = params.inertia;
  return m;
}

Vec6 seesaw_bias(const SeesawParams& params, const SeesawState& state, double gravity) {
  const Vec3 omega = state.nu.tail<3>();
  Vec6 e3_weight = Vec6::Zero();
  e3_weight(2) = params.mass * gravity;
  return block_skew(omega) * (seesaw_mass_matrix(params) * state.nu) +
         block_rotation(state.rotation).transpose() * e3_weight;
}

SeesawContactGeometry contact_geometry(const SeesawParams& params, const SeesawState& state) {
  if (std::abs(state.theta) >= M_PI / 2.0) {
    throw std::domain_error("seesaw: |theta| >= pi/2, rolling contact lost");
  }
  SeesawContactGeometry g;
  // Contact point sits on the ground directly below the cylinder axis.
  g.p_sp = state.rotation * Vec3(0.0, 0.0, params.com_drop) - Vec3(0.0, 0.0, params.radius);
  g.p_sl = state.rotation * params.foot_offset_left;
  g.p_sr = state.rotation * params.foot_offset_right;
  return g;
}

MatX jacobian_r_points(const Rotation& r, const Vec3& p_sl, const Vec3& p_sr) {
  MatX jr_bar = MatX::Zero(12, 6);
  jr_bar.block<3, 3>(0, 0) = Mat3::Identity();
  jr_bar.block<3, 3>(0, 3) = -skew(p_sl);
  jr_bar.block<3, 3>(3, 3) = Mat3::Identity();
  jr_bar.block<3, 3>(6, 0) = Mat3::Identity();
  jr_bar.block<3, 3>(6, 3) = -skew(p_sr);
  jr_bar.block<3, 3>(9, 3) = Mat3::Identity();
  return jr_bar * block_rotation(r);
}

MatX jacobian_r(const SeesawParams& params, const SeesawState& state) {
  const SeesawContactGeometry g = contact_geometry(params, state);
  return jacobian_r_points(state.rotation, g.p_sl, g.p_sr);
}

MatX jacobian_s_point(const Rotation& r, const Vec3& p_sp) {
  MatX js_bar = MatX::Zero(5, 6);
  js_bar.block<3, 3>(0, 0) = Mat3::Identity();
  js_bar.block<3, 3>(0, 3) = -skew(p_sp);
  js_bar(3, 4) = 1.0;
  js_bar(4, 5) = 1.0;
  return js_bar * block_rotation(r);
}

MatX jacobian_s(const SeesawParams& params, const SeesawState& state) {
  const SeesawContactGeometry g = contact_geometry(params, state);
  return jacobian_s_point(state.rotation, g.p_sp);
}

JacobianDotTerms jacobian_dot_terms_points(const SeesawParams& params, const SeesawState& state,
                                           const Vec3& p_sl, const Vec3& p_sr, double step) {
  const double h = step;
  const Vec3 omega_body = state.nu.tail<3>();
  const Vec3 omega_world = state.rotation * omega_body;

  auto advance = [&](double dt) {
    // ^I Rdot_s = ^I R_s S(^S omega_s); attachment vectors rotate with the body.
    const Rotation r = state.rotation * so3_exp(omega_body * dt);
    const Rotation spin = so3_exp(omega_world * dt);
    struct Snapshot {
      MatX jr;
      MatX js;
    } snap;
    snap.jr = jacobian_r_points(r, spin * p_sl, spin * p_sr);
    const Vec3 p_sp = r * Vec3(0.0, 0.0, params.com_drop) - Vec3(0.0, 0.0, params.radius);
    snap.js = jacobian_s_point(r, p_sp);
    return snap;
  };

  const auto plus = advance(h);
  const auto minus = advance(-h);
  JacobianDotTerms out;
  out.jr_dot_nu = ((plus.jr - minus.jr) / (2.0 * h)) * state.nu;
  out.js_dot_nu = ((plus.js - minus.js) / (2.0 * h)) * state.nu;
  return out;
}

JacobianDotTerms jacobian_dot_terms(const SeesawParams& params, const SeesawState& state,
                                    double step) {
  const SeesawContactGeometry g = contact_geometry(params, state);
  return jacobian_dot_terms_points(params, state, g.p_sl, g.p_sr, step);
}

Vec6 seesaw_forward_dynamics(const SeesawParams& params, const SeesawState& state,
                             const VecX& f, const VecX& f_s, double gravity) {
  const Vec6 h_s = seesaw_bias(params, state, gravity);
  const MatX jr = jacobian_r(params, state);
  const MatX js = jacobian_s(params, state);
  const Vec6 rhs = -h_s - jr.transpose() * f + js.transpose() * f_s;
  return seesaw_mass_matrix(params).ldlt().solve(rhs);
}

Vec6 momentum_frame_transform(const Vec6& h, const Rotation& r, FrameDirection direction) {
  if (direction == FrameDirection::ToInertial) return block_rotation(r) * h;
  return block_rotation(r).transpose() * h;
}

SeesawState integrate_seesaw_semi_implicit(const SeesawState& state, const Vec6& nu_dot,
                                           double dt) {
  SeesawState next = state;
  next.nu = state.nu + dt * nu_dot;
  next.com_position = state.com_position + dt * (state.rotation * next.nu.head<3>());
  next.rotation = state.rotation * so3_exp(dt * next.nu.tail<3>());
  next.theta = seesaw_roll(next.rotation);
  return next;
}

}  // namespace seesaw
