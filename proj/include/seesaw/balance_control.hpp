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

#include <string>

#include "seesaw/contact_constraints.hpp"
#include "seesaw/qp.hpp"
#include "seesaw/robot_dynamics.hpp"
#include "seesaw/seesaw_dynamics.hpp"

namespace seesaw {

class ControlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ControllerMode { RigidContact, SeesawRobotMomentum, SeesawMixedMomentum };

struct Gains {
  Mat6 kp_momentum = Mat6::Identity();
  Mat6 ki_momentum = Mat6::Zero();
  MatX kp_postural;  // n x n
  MatX kd_postural;  // n x n

  /// kp blocks must be SPD; ki may be positive semidefinite (the default
  /// leaves the angular integral off).
  void validate(int dof) const;
};

Gains default_gains(int dof);

struct MomentumReference {
  Vec6 momentum = Vec6::Zero();       // H^d (robot or mixed, per mode)
  Vec6 momentum_rate = Vec6::Zero();  // Hdot^d feedforward
  Vec3 com = Vec3::Zero();            // x_c^d
  VecX posture;                       // q_j^d
};

struct ReferenceSample {
  Vec3 com = Vec3::Zero();
  Vec3 com_velocity = Vec3::Zero();
  Vec3 com_acceleration = Vec3::Zero();
  VecX posture;
};

MomentumReference make_momentum_reference(const ReferenceSample& sample, double mass);

struct ControllerConfig {
  ControllerMode mode = ControllerMode::SeesawRobotMomentum;
  Gains gains;
  ContactLimits limits;
  double torque_pinv_damping = 1e-6;  // Lambda is 12 x n; damped when n < 12
  double task_pinv_damping = 0.0;
  // Extra wrench pushed through the task null-space projector before the
  // torque-minimizing QP; exercises the wrench redundancy in tests.
  VecX null_space_wrench_offset = VecX::Zero(12);
};

struct ControlDiagnostics {
  int rank_a_s = 0;
  int rank_a_f = 0;
  QpStatus qp_status = QpStatus::Optimal;
  bool qp_fallback = false;
  double min_constraint_margin = 0.0;
  double gamma_condition = 0.0;
  bool gamma_fallback = false;
  double task_residual = 0.0;  // ||task f* - rhs||_inf
  bool fault = false;
  std::string fault_reason;
};

struct ControlCommand {
  VecX tau;     // n
  VecX f_star;  // 12
  VecX f0;      // 12, the null-space component of f_star
  ControlDiagnostics diagnostics;
};

/// Hdot* = Hdot^d - Kp (H - H^d) - Ki integral.
Vec6 desired_momentum_rate(const Vec6& h, const Vec6& h_des, const Vec6& h_dot_des,
                           const Vec6& integral, const Mat6& kp, const Mat6& ki);

/// Closed-form momentum-error integral (m (x_c - x_c^d); 0).
Vec6 momentum_integral(const Vec3& com, const Vec3& com_des, double mass);

/// Board dynamics with the ground contact force eliminated through the
/// rolling constraint: M_s nu_dot_s + h_bar_s = A_s f, plus the affine map
/// recovering f_s from the feet wrenches.
struct ReducedSeesawDynamics {
  MatX gamma;      // 5x5, J_s M_s^-1 J_s'
  MatX gamma_inv;
  MatX a_s;        // 6x12
  Vec6 h_bar_s;
  MatX a_t;        // 5x12, gamma^-1 J_s M_s^-1 J_r'
  VecX fs_bias;    // 5, gamma^-1 (J_s M_s^-1 h_s - Jsdot nu_s)
  double gamma_condition = 0.0;
  bool fallback = false;  // damped inverse used for a near-singular gamma

  VecX contact_force(const VecX& f) const { return a_t * f + fs_bias; }
};

ReducedSeesawDynamics reduce_seesaw_dynamics(const Mat6& m_s, const Vec6& h_s, const MatX& j_r,
                                             const MatX& j_s, const VecX& js_dot_nu);

/// Stacks the robot momentum rows on the seesaw lateral-angular row:
/// [J_b'; e_4' A_s], 7 x 12.
MatX task_matrix_af(const MatX& j_b, const MatX& a_s);

struct MixedMomentumTerms {
  MatX j_t;       // 5x6
  MatX a_t;       // 5x12
  Vec6 f_bias;    // J_t' fs_bias - (m_s + m) g e3
  Vec6 h_t;       // total momentum at the system CoM
  Vec6 h_m;       // (robot linear; total angular)
  MatX a_m;       // 6x12 task matrix of the mixed controller
};

MixedMomentumTerms mixed_momentum_terms(const SeesawParams& params, const SeesawState& state,
                                        const ReducedSeesawDynamics& reduced, const MatX& j_s,
                                        const MatX& j_b, const Vec6& robot_h,
                                        const Vec3& robot_com, double robot_mass,
                                        double gravity);

/// tau(f) = tau_const + tau_f f, with the postural term folded in.
struct TorqueAffine {
  VecX tau_const;
  MatX tau_f;      // n x 12
  MatX lambda;     // 12 x n
  MatX n_lambda;   // n x n null-space projector of lambda
  VecX u0;         // postural feedback
};

struct TorqueMapInputs {
  MatX j;           // 12 x (n+6)
  MatX m;           // (n+6) x (n+6)
  VecX h;           // n+6
  VecX jdot_nu;     // 12
  bool with_seesaw = false;
  MatX j_r;         // 12x6 (seesaw only)
  Mat6 m_s = Mat6::Identity();
  MatX a_s;         // 6x12
  Vec6 h_bar_s = Vec6::Zero();
  VecX jr_dot_nu_s; // 12 (seesaw only)
  double pinv_damping = 0.0;
};

TorqueAffine build_torque_affine(const TorqueMapInputs& in, const Gains& gains, const VecX& q_j,
                                 const VecX& qdot_j, const VecX& q_j_des);

/// tau = Lambda^+ (h_bar - J_bar f - Jdot nu + Jrdot nu_s) + N_Lambda tau0.
VecX torque_map(const TorqueMapInputs& in, const VecX& f, const VecX& tau0);

/// tau0 = h_j - J_j' f + u0 (the zero-dynamics / postural task).
VecX postural_torque(const VecX& h_j, const MatX& j_j, const VecX& f, const VecX& u0);

struct WrenchDistributionResult {
  VecX f_star;
  VecX f0;
  QpStatus qp_status = QpStatus::Optimal;
  bool fallback_equality_only = false;
  double min_margin = 0.0;
  double task_residual = 0.0;
  MatX null_projector;  // 12x12
};

/// Solves the momentum equality exactly through the task pseudoinverse and
/// picks the null-space wrench by minimizing |tau(f)|^2 subject to the
/// contact inequalities.
WrenchDistributionResult wrench_distribution(const MatX& task, const Vec6& rhs,
                                             const TorqueAffine& torque,
                                             const LinearInequalities& ineq,
                                             const VecX& f0_offset, double task_damping);

/// One full cascade tick; never throws, faults produce a zero-torque
/// command with diagnostics.fault set.
ControlCommand control_step(const RobotModel& model, const RobotState& robot,
                            const SeesawParams& seesaw_params, const SeesawState& seesaw_state,
                            const MomentumReference& ref, const ControllerConfig& config);

}  // namespace seesaw
