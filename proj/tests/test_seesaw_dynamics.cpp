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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_utils.hpp"

using namespace seesaw;
using namespace test_util;

namespace {

SeesawState random_valid_state(const SeesawParams& params, std::mt19937_64& rng) {
  SeesawState s = seesaw_rest_state(params, urand(rng, -0.4, 0.4));
  s.com_position += rand_vec3(rng, 0.1);
  s.nu = rand_vec(rng, 6, 0.8);
  return s;
}

// Body-frame velocity compatible with rolling plus pure roll rate w_x.
Vec6 rolling_velocity(const SeesawParams& params, const SeesawState& state, double w_x) {
  const SeesawContactGeometry g = contact_geometry(params, state);
  const Vec3 omega_body(w_x, 0.0, 0.0);
  const Vec3 omega_world = state.rotation * omega_body;
  const Vec3 v_world = skew(g.p_sp) * omega_world;
  Vec6 nu;
  nu << state.rotation.transpose() * v_world, omega_body;
  return nu;
}

}  // namespace

TEST_CASE("seesaw mass matrix is the constant block diagonal") {
  SeesawParams params;
  const Mat6 m = seesaw_mass_matrix(params);
  CHECK((m.block<3, 3>(0, 0) - 4.0 * Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((m.block<3, 3>(3, 3) - params.inertia).cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.block<3, 3>(0, 3).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Mat6> es(m);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("seesaw bias at rest carries only the weight") {
  SeesawParams params;
  const SeesawState rest = seesaw_rest_state(params, 0.0);
  const Vec6 h = seesaw_bias(params, rest, 9.81);
  Vec6 expected = Vec6::Zero();
  expected(2) = 4.0 * 9.81;  // 39.24
  CHECK((h - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gravity part of the bias has rotation-invariant norm") {
  SeesawParams params;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    SeesawState s = seesaw_rest_state(params, urand(rng, -0.8, 0.8));
    s.nu.setZero();  // isolates the gravity term
    CHECK(seesaw_bias(params, s, 9.81).norm() ==
          doctest::Approx(params.mass * 9.81).epsilon(1e-12));
  }
}

TEST_CASE("gyroscopic bias does no work") {
  SeesawParams params;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const SeesawState s = random_valid_state(params, rng);
    const Vec6 gyro = block_skew(s.nu.tail<3>()) * (seesaw_mass_matrix(params) * s.nu);
    CHECK(std::abs(gyro.dot(s.nu)) <= 1e-12 * (1.0 + s.nu.squaredNorm()));
  }
}

TEST_CASE("contact geometry at zero roll") {
  SeesawParams params;
  params.com_drop = 0.0;
  SeesawState s = seesaw_rest_state(params, 0.0);
  CHECK((contact_geometry(params, s).p_sp - Vec3(0, 0, -params.radius)).cwiseAbs().maxCoeff() <=
        1e-15);

  params.com_drop = 0.05;
  s = seesaw_rest_state(params, 0.0);
  CHECK((contact_geometry(params, s).p_sp - Vec3(0, 0, -(params.radius - params.com_drop)))
            .cwiseAbs()
            .maxCoeff() <= 1e-15);
}

TEST_CASE("contact point sits on the ground for rolled states") {
  SeesawParams params;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const SeesawState s = seesaw_rest_state(params, urand(rng, -0.5, 0.5));
    const Vec3 contact = s.com_position + contact_geometry(params, s).p_sp;
    CHECK(std::abs(contact.z()) <= 1e-12);
  }
}

TEST_CASE("geometry rejects a board on its side") {
  SeesawParams params;
  SeesawState s = seesaw_rest_state(params, 0.0);
  s.theta = M_PI / 2;
  CHECK_THROWS_AS(contact_geometry(params, s), std::domain_error);
}

TEST_CASE("jacobian_r: body translation moves both feet rigidly") {
  SeesawParams params;
  std::mt19937_64 rng(7);
  const SeesawState s = seesaw_rest_state(params, 0.3);
  Vec6 nu = Vec6::Zero();
  nu.head<3>() = rand_vec3(rng, 1.0);
  const VecX v = jacobian_r(params, s) * nu;
  const Vec3 expected = s.rotation * nu.head<3>();
  CHECK((v.head<3>() - expected).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((v.segment<3>(6) - expected).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(v.segment<3>(3).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("jacobian_r: an attachment on the CoM ignores angular velocity") {
  SeesawParams params;
  params.foot_offset_left = Vec3::Zero();
  std::mt19937_64 rng(11);
  const SeesawState s = seesaw_rest_state(params, -0.2);
  Vec6 nu;
  nu << rand_vec3(rng, 1.0), rand_vec3(rng, 1.0);
  const VecX v = jacobian_r(params, s) * nu;
  CHECK((v.head<3>() - s.rotation * nu.head<3>()).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("jacobian_r matches finite differences of attachment motion") {
  SeesawParams params;
  std::mt19937_64 rng(13);
  const double eps = 1e-6;
  for (int i = 0; i < 20; ++i) {
    const SeesawState s = random_valid_state(params, rng);
    const SeesawState plus = integrate_seesaw_semi_implicit(s, Vec6::Zero(), eps);
    const SeesawState minus = integrate_seesaw_semi_implicit(s, Vec6::Zero(), -eps);
    auto attach = [&](const SeesawState& st) {
      return Vec3(st.com_position + st.rotation * params.foot_offset_left);
    };
    const Vec3 fd = (attach(plus) - attach(minus)) / (2 * eps);
    const VecX v = jacobian_r(params, s) * s.nu;
    CHECK((fd - v.head<3>()).norm() <= 1e-5 * (1.0 + v.head<3>().norm()));
    // Angular rows give the world angular velocity.
    const Vec3 fd_ang = so3_log(plus.rotation * minus.rotation.transpose()) / (2 * eps);
    CHECK((fd_ang - v.segment<3>(3)).norm() <= 1e-5 * (1.0 + v.segment<3>(3).norm()));
  }
}

TEST_CASE("jacobian_s annihilates rolling velocities") {
  SeesawParams params;
  params.com_drop = 0.0;
  SeesawState s = seesaw_rest_state(params, 0.0);
  const double w = 0.7;
  s.nu = rolling_velocity(params, s, w);
  // At zero drop the rolling velocity is a pure lateral slide.
  CHECK((s.nu.head<3>() - Vec3(0.0, -params.radius * w, 0.0)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((jacobian_s(params, s) * s.nu).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK((jacobian_s(params, s) * Vec6::Zero()).cwiseAbs().maxCoeff() == 0.0);

  SeesawParams dropped;
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    SeesawState st = seesaw_rest_state(dropped, urand(rng, -0.45, 0.45));
    st.nu = rolling_velocity(dropped, st, urand(rng, -2.0, 2.0));
    CHECK((jacobian_s(dropped, st) * st.nu).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("constraint matrices keep full rank across valid states") {
  SeesawParams params;
  std::mt19937_64 rng(19);
  for (int i = 0; i < 1000; ++i) {
    const SeesawState s = random_valid_state(params, rng);
    CHECK(matrix_rank(jacobian_s(params, s), 1e-6) == 5);
    CHECK(matrix_rank(jacobian_r(params, s), 1e-6) == 6);
  }
}

TEST_CASE("jacobian dot terms vanish at rest") {
  SeesawParams params;
  SeesawState s = seesaw_rest_state(params, 0.25);
  s.nu.setZero();
  const JacobianDotTerms dots = jacobian_dot_terms(params, s);
  CHECK(dots.jr_dot_nu.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(dots.js_dot_nu.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("planar analytic derivative of the rolling constraint at zero drop") {
  SeesawParams params;
  params.com_drop = 0.0;  // p_sp is constant in the world frame
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    SeesawState s = seesaw_rest_state(params, urand(rng, -0.4, 0.4));
    s.nu = rolling_velocity(params, s, urand(rng, -2.0, 2.0));

    const SeesawContactGeometry g = contact_geometry(params, s);
    MatX js_bar = MatX::Zero(5, 6);
    js_bar.block<3, 3>(0, 0) = Mat3::Identity();
    js_bar.block<3, 3>(0, 3) = -skew(g.p_sp);
    js_bar(3, 4) = 1.0;
    js_bar(4, 5) = 1.0;
    // d(J_s)/dt = J_s_bar * d(blockdiag(R,R))/dt with constant p_sp.
    const VecX analytic =
        js_bar * block_rotation(s.rotation) * block_skew(s.nu.tail<3>()) * s.nu;

    const JacobianDotTerms dots = jacobian_dot_terms(params, s);
    CHECK((dots.js_dot_nu - analytic).cwiseAbs().maxCoeff() <=
          1e-4 * (1.0 + analytic.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("finite-difference Jacobian derivatives are second-order accurate") {
  SeesawParams params;
  params.com_drop = 0.0;
  std::mt19937_64 rng(29);
  SeesawState s = seesaw_rest_state(params, 0.3);
  s.nu = rolling_velocity(params, s, 1.3);
  s.nu.tail<3>() += Vec3(0.0, 0.4, -0.2);  // excite the nonlinear terms

  const SeesawContactGeometry g = contact_geometry(params, s);
  MatX js_bar = MatX::Zero(5, 6);
  js_bar.block<3, 3>(0, 0) = Mat3::Identity();
  js_bar.block<3, 3>(0, 3) = -skew(g.p_sp);
  js_bar(3, 4) = 1.0;
  js_bar(4, 5) = 1.0;
  const VecX analytic =
      js_bar * block_rotation(s.rotation) * block_skew(s.nu.tail<3>()) * s.nu;

  const double h = 1e-3;
  const double err_h =
      (jacobian_dot_terms(params, s, h).js_dot_nu - analytic).cwiseAbs().maxCoeff();
  const double err_h2 =
      (jacobian_dot_terms(params, s, h / 2).js_dot_nu - analytic).cwiseAbs().maxCoeff();
  const double ratio = err_h / err_h2;
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.0);
}

TEST_CASE("forward dynamics: cancelling contact force gives zero acceleration") {
  SeesawParams params;
  const SeesawState rest = seesaw_rest_state(params, 0.0);
  VecX f = VecX::Zero(12);
  VecX f_s(5);
  f_s << 0.0, 0.0, params.mass * 9.81, 0.0, 0.0;
  CHECK(seesaw_forward_dynamics(params, rest, f, f_s, 9.81).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("forward dynamics: free fall at rest") {
  SeesawParams params;
  const SeesawState rest = seesaw_rest_state(params, 0.0);
  const Vec6 acc =
      seesaw_forward_dynamics(params, rest, VecX::Zero(12), VecX::Zero(5), 9.81);
  CHECK((acc - (Vec6() << 0, 0, -9.81, 0, 0, 0).finished()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("forward dynamics satisfies the momentum balance residual") {
  SeesawParams params;
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const SeesawState s = random_valid_state(params, rng);
    const VecX f = rand_vec(rng, 12, 50.0);
    const VecX f_s = rand_vec(rng, 5, 50.0);
    const Vec6 acc = seesaw_forward_dynamics(params, s, f, f_s, 9.81);
    const Vec6 residual = seesaw_mass_matrix(params) * acc +
                          seesaw_bias(params, s, 9.81) +
                          jacobian_r(params, s).transpose() * f -
                          jacobian_s(params, s).transpose() * f_s;
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + f.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("world-frame momentum equation recovers the body-frame dynamics") {
  SeesawParams params;
  std::mt19937_64 rng(37);
  for (int i = 0; i < 50; ++i) {
    const SeesawState s = random_valid_state(params, rng);
    const VecX f = rand_vec(rng, 12, 40.0);
    const VecX f_s = rand_vec(rng, 5, 40.0);
    const Vec6 acc = seesaw_forward_dynamics(params, s, f, f_s, 9.81);

    const Mat6 rbar = block_rotation(s.rotation);
    const MatX jr_bar = jacobian_r(params, s) * rbar.transpose();
    const MatX js_bar = jacobian_s(params, s) * rbar.transpose();
    Vec6 weight = Vec6::Zero();
    weight(2) = params.mass * 9.81;
    const Vec6 lhs = rbar * (block_skew(s.nu.tail<3>()) * (seesaw_mass_matrix(params) * s.nu) +
                             seesaw_mass_matrix(params) * acc);
    const Vec6 rhs = -weight - jr_bar.transpose() * f + js_bar.transpose() * f_s;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("momentum frame transform round trip and derivative identity") {
  SeesawParams params;
  std::mt19937_64 rng(41);
  const SeesawState s = random_valid_state(params, rng);
  const Vec6 h = rand_vec(rng, 6, 3.0);
  CHECK((momentum_frame_transform(h, Rotation::Identity(), FrameDirection::ToInertial) - h)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  const Vec6 round = momentum_frame_transform(
      momentum_frame_transform(h, s.rotation, FrameDirection::ToInertial), s.rotation,
      FrameDirection::ToBody);
  CHECK((round - h).cwiseAbs().maxCoeff() <= 1e-12);

  // d/dt (Rbar M nu) along a short simulated trajectory, centered at s1.
  const VecX f = rand_vec(rng, 12, 10.0);
  const VecX f_s = rand_vec(rng, 5, 10.0);
  const double dt = 1e-6;
  auto advance = [&](const SeesawState& st) {
    return integrate_seesaw_semi_implicit(st, seesaw_forward_dynamics(params, st, f, f_s, 9.81),
                                          dt);
  };
  const SeesawState s0 = s;
  const SeesawState s1 = advance(s0);
  const SeesawState s2 = advance(s1);

  const Mat6 m_s = seesaw_mass_matrix(params);
  const Vec6 fd = (block_rotation(s2.rotation) * (m_s * s2.nu) -
                   block_rotation(s0.rotation) * (m_s * s0.nu)) /
                  (2 * dt);
  const Vec6 acc1 = seesaw_forward_dynamics(params, s1, f, f_s, 9.81);
  const Vec6 analytic = block_rotation(s1.rotation) *
                        (block_skew(s1.nu.tail<3>()) * (m_s * s1.nu) + m_s * acc1);
  CHECK((fd - analytic).cwiseAbs().maxCoeff() <=
        1e-3 * (1.0 + analytic.cwiseAbs().maxCoeff()));
}

TEST_CASE("parameter validation rejects bad boards") {
  SeesawParams params;
  params.mass = -1.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params = SeesawParams();
  params.com_drop = params.radius;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params = SeesawParams();
  params.inertia(0, 1) = 0.5;  // asymmetric
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
}
