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

#include "seesaw/balance_control.hpp"

#include <cmath>

namespace seesaw {

namespace {

constexpr double kGammaConditionLimit = 1e10;
constexpr double kGammaFallbackDamping = 1e-6;
// Strong enough to pin null-space directions the legs cannot actuate (the
// yaw couple between the feet costs essentially no torque on this leg
// layout, and a vanishing penalty lets the solver slam it into the
// torsional friction bounds).
constexpr double kF0Regularization = 1e-3;

bool is_spd(const MatX& m, double tol = 1e-9) {
  if (m.rows() != m.cols()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<MatX> es(m);
  return es.eigenvalues().minCoeff() > 0.0;
}

bool is_psd(const MatX& m, double tol = 1e-9) {
  if (m.rows() != m.cols()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<MatX> es(m);
  return es.eigenvalues().minCoeff() >= -tol;
}

Vec6 weight_vector(double mass, double gravity) {
  Vec6 w = Vec6::Zero();
  w(2) = mass * gravity;
  return w;
}

}  // namespace

void Gains::validate(int dof) const {
  if (!is_spd(kp_momentum)) throw ControlError("gains: Kp must be symmetric positive definite");
  if (!is_psd(ki_momentum)) throw ControlError("gains: Ki must be symmetric positive semidefinite");
  if (kp_postural.rows() != dof || kd_postural.rows() != dof) {
    throw ControlError("gains: postural blocks must be n x n");
  }
  if (!is_spd(kp_postural) || !is_spd(kd_postural)) {
    throw ControlError("gains: postural gains must be symmetric positive definite");
  }
}

Gains default_gains(int dof) {
  Gains g;
  g.kp_momentum = Vec6(50.0, 50.0, 50.0, 20.0, 20.0, 20.0).asDiagonal();
  g.ki_momentum = Vec6(45.0, 45.0, 45.0, 0.0, 0.0, 0.0).asDiagonal();
  g.kp_postural = 30.0 * MatX::Identity(dof, dof);
  g.kd_postural = 2.0 * std::sqrt(30.0) * MatX::Identity(dof, dof);
  return g;
}

MomentumReference make_momentum_reference(const ReferenceSample& sample, double mass) {
  MomentumReference ref;
  ref.momentum.head<3>() = mass * sample.com_velocity;
  ref.momentum_rate.head<3>() = mass * sample.com_acceleration;
  ref.com = sample.com;
  ref.posture = sample.posture;
  return ref;
}

Vec6 desired_momentum_rate(const Vec6& h, const Vec6& h_des, const Vec6& h_dot_des,
                           const Vec6& integral, const Mat6& kp, const Mat6& ki) {
  return h_dot_des - kp * (h - h_des) - ki * integral;
}

Vec6 momentum_integral(const Vec3& com, const Vec3& com_des, double mass) {
  Vec6 out = Vec6::Zero();
  out.head<3>() = mass * (com - com_des);
  return out;
}

ReducedSeesawDynamics reduce_seesaw_dynamics(const Mat6& m_s, const Vec6& h_s, const MatX& j_r,
                                             const MatX& j_s, const VecX& js_dot_nu) {
  ReducedSeesawDynamics out;
  const Mat6 m_s_inv = m_s.ldlt().solve(Mat6::Identity());
  out.gamma = j_s * m_s_inv * j_s.transpose();
  out.gamma_condition = condition_number(out.gamma);
  if (out.gamma_condition > kGammaConditionLimit || !std::isfinite(out.gamma_condition)) {
    out.fallback = true;
    out.gamma_inv = damped_pinv(out.gamma, kGammaFallbackDamping);
  } else {
    out.gamma_inv = out.gamma.fullPivLu().solve(MatX::Identity(5, 5));
  }
  // Projector killing the constraint-space component of the dynamics.
  const Mat6 proj = Mat6::Identity() - j_s.transpose() * out.gamma_inv * j_s * m_s_inv;
  out.a_s = -proj * j_r.transpose();
  out.h_bar_s = proj * h_s + j_s.transpose() * out.gamma_inv * js_dot_nu;
  out.a_t = out.gamma_inv * j_s * m_s_inv * j_r.transpose();
  out.fs_bias = out.gamma_inv * (j_s * m_s_inv * h_s - js_dot_nu);
  return out;
}

MatX task_matrix_af(const MatX& j_b, const MatX& a_s) {
  MatX af(7, 12);
  af.topRows(6) = j_b.transpose();
  af.row(6) = a_s.row(3);  // angular x: the board's free roll axis
  return af;
}

MixedMomentumTerms mixed_momentum_terms(const SeesawParams& params, const SeesawState& state,
                                        const ReducedSeesawDynamics& reduced, const MatX& j_s,
                                        const MatX& j_b, const Vec6& robot_h,
                                        const Vec3& robot_com, double robot_mass,
                                        double gravity) {
  MixedMomentumTerms out;
  const Vec3 system_com = (robot_mass * robot_com + params.mass * state.com_position) /
                          (robot_mass + params.mass);
  const Mat6 x_robot = wrench_transform(robot_com - system_com);
  const Mat6 x_seesaw = wrench_transform(state.com_position - system_com);

  const Vec6 h_s_world =
      block_rotation(state.rotation) * (seesaw_mass_matrix(params) * state.nu);
  out.h_t = x_robot * robot_h + x_seesaw * h_s_world;
  out.h_m.head<3>() = robot_h.head<3>();
  out.h_m.tail<3>() = out.h_t.tail<3>();

  const MatX js_bar = j_s * block_rotation(state.rotation).transpose();
  out.j_t = js_bar * x_seesaw.transpose();
  out.a_t = reduced.a_t;
  out.f_bias = out.j_t.transpose() * reduced.fs_bias -
               weight_vector(robot_mass + params.mass, gravity);

  out.a_m = MatX::Zero(6, 12);
  out.a_m.topRows(3) = j_b.transpose().topRows(3);
  out.a_m.bottomRows(3) = (out.j_t.transpose() * out.a_t).bottomRows(3);
  return out;
}

TorqueAffine build_torque_affine(const TorqueMapInputs& in, const Gains& gains, const VecX& q_j,
                                 const VecX& qdot_j, const VecX& q_j_des) {
  const int n = static_cast<int>(in.m.rows()) - 6;
  const MatX m_inv_jt = in.m.ldlt().solve(MatX(in.j.transpose()));  // (n+6) x 12
  const MatX m_inv_b = in.m.ldlt().solve(MatX::Identity(n + 6, n + 6)).rightCols(n);

  TorqueAffine out;
  out.lambda = in.j * m_inv_b;  // 12 x n
  const MatX lambda_pinv = damped_pinv(out.lambda, in.pinv_damping);
  out.n_lambda = MatX::Identity(n, n) - lambda_pinv * out.lambda;

  VecX h_bar = in.j * in.m.ldlt().solve(in.h);
  MatX j_bar = in.j * m_inv_jt;
  VecX coupling = -in.jdot_nu;
  if (in.with_seesaw) {
    const Mat6 m_s_inv = in.m_s.ldlt().solve(Mat6::Identity());
    h_bar -= in.j_r * (m_s_inv * in.h_bar_s);
    j_bar -= in.j_r * m_s_inv * in.a_s;
    coupling += in.jr_dot_nu_s;
  }

  const MatX m_j = in.m.bottomRightCorner(n, n);
  out.u0 = -gains.kp_postural * (out.n_lambda * (m_j * (q_j - q_j_des))) -
           gains.kd_postural * (out.n_lambda * (m_j * qdot_j));

  const VecX h_j = in.h.tail(n);
  out.tau_const = lambda_pinv * (h_bar + coupling) + out.n_lambda * (h_j + out.u0);
  out.tau_f = -lambda_pinv * j_bar - out.n_lambda * in.j.rightCols(n).transpose();
  return out;
}

VecX torque_map(const TorqueMapInputs& in, const VecX& f, const VecX& tau0) {
  const int n = static_cast<int>(in.m.rows()) - 6;
  const MatX m_inv_b = in.m.ldlt().solve(MatX::Identity(n + 6, n + 6)).rightCols(n);
  const MatX lambda = in.j * m_inv_b;
  const MatX lambda_pinv = damped_pinv(lambda, in.pinv_damping);
  const MatX n_lambda = MatX::Identity(n, n) - lambda_pinv * lambda;

  VecX rhs = in.j * in.m.ldlt().solve(in.h - in.j.transpose() * f) - in.jdot_nu;
  if (in.with_seesaw) {
    const Mat6 m_s_inv = in.m_s.ldlt().solve(Mat6::Identity());
    rhs -= in.j_r * (m_s_inv * (in.h_bar_s - in.a_s * f));
    rhs += in.jr_dot_nu_s;
  }
  return lambda_pinv * rhs + n_lambda * tau0;
}

VecX postural_torque(const VecX& h_j, const MatX& j_j, const VecX& f, const VecX& u0) {
  return h_j - j_j.transpose() * f + u0;
}

WrenchDistributionResult wrench_distribution(const MatX& task, const Vec6& rhs,
                                             const TorqueAffine& torque,
                                             const LinearInequalities& ineq,
                                             const VecX& f0_offset, double task_damping) {
  if (matrix_rank(task) < 6) {
    throw ControlError("wrench distribution: task matrix is rank deficient");
  }
  WrenchDistributionResult out;
  const MatX task_pinv = damped_pinv(task, task_damping);
  out.null_projector = MatX::Identity(12, 12) - task_pinv * task;
  const VecX f_h = task_pinv * rhs;

  // Orthonormal basis of the task null space from the full SVD.
  Eigen::JacobiSVD<MatX> svd(task, Eigen::ComputeFullV);
  const MatX z = svd.matrixV().rightCols(6);

  const MatX tz = torque.tau_f * z;
  QProblem qp;
  qp.Q = 2.0 * (tz.transpose() * tz + kF0Regularization * MatX::Identity(6, 6));
  qp.c = 2.0 * tz.transpose() * (torque.tau_const + torque.tau_f * f_h);
  qp.A_eq = MatX(0, 6);
  qp.b_eq = VecX(0);
  qp.A_in = ineq.A * z;
  qp.b_in = ineq.b - ineq.A * f_h;

  // The configured offset joins after the optimization; injecting it before
  // would be undone, since the QP already searches the whole null space.
  const VecX injected = out.null_projector * f0_offset;
  const QpSolution sol = solve_qp(qp);
  out.qp_status = sol.status;
  if (sol.status == QpStatus::Optimal) {
    out.f_star = f_h + z * sol.x + injected;
    out.f0 = z * sol.x + injected;
  } else {
    out.fallback_equality_only = true;
    out.f_star = f_h + injected;
    out.f0 = injected;
  }
  out.min_margin = (ineq.b - ineq.A * out.f_star).minCoeff();
  out.task_residual = (task * out.f_star - rhs).cwiseAbs().maxCoeff();
  return out;
}

ControlCommand control_step(const RobotModel& model, const RobotState& robot,
                            const SeesawParams& seesaw_params, const SeesawState& seesaw_state,
                            const MomentumReference& ref, const ControllerConfig& config) {
  ControlCommand cmd;
  const int n = model.dof();
  cmd.tau = VecX::Zero(n);
  cmd.f_star = VecX::Zero(12);
  cmd.f0 = VecX::Zero(12);
  try {
    config.gains.validate(n);
    const double gravity = model.gravity;
    const double mass = model.total_mass;

    const Kinematics kin = forward_kinematics(model, robot);
    const MatX m = mass_matrix(model, robot);
    const VecX h = bias_forces(model, robot, gravity);
    const MatX j = contact_jacobian(model, robot);
    const VecX jdn = jacobian_dot_nu(model, robot);
    const CentroidalQuantities cq = centroidal_momentum(model, robot);
    const CentroidalWrenchMap cwm = centroidal_wrench_map(model, robot);

    TorqueMapInputs tin;
    tin.j = j;
    tin.m = m;
    tin.h = h;
    tin.jdot_nu = jdn;
    tin.pinv_damping = config.torque_pinv_damping;

    ReducedSeesawDynamics reduced;
    if (config.mode != ControllerMode::RigidContact) {
      // Attachment vectors anchored at the actual foot frames keep the
      // null-space cancellation exact under small constraint drift.
      const Vec3 p_sl = kin.left_foot.position - seesaw_state.com_position;
      const Vec3 p_sr = kin.right_foot.position - seesaw_state.com_position;
      const MatX j_r = jacobian_r_points(seesaw_state.rotation, p_sl, p_sr);
      const MatX j_s = jacobian_s(seesaw_params, seesaw_state);
      const JacobianDotTerms dots =
          jacobian_dot_terms_points(seesaw_params, seesaw_state, p_sl, p_sr);
      const Mat6 m_s = seesaw_mass_matrix(seesaw_params);
      const Vec6 h_s = seesaw_bias(seesaw_params, seesaw_state, gravity);
      reduced = reduce_seesaw_dynamics(m_s, h_s, j_r, j_s, dots.js_dot_nu);
      cmd.diagnostics.gamma_condition = reduced.gamma_condition;
      cmd.diagnostics.gamma_fallback = reduced.fallback;
      cmd.diagnostics.rank_a_s = matrix_rank(reduced.a_s);
      cmd.diagnostics.rank_a_f = matrix_rank(task_matrix_af(cwm.j_b, reduced.a_s));

      tin.with_seesaw = true;
      tin.j_r = j_r;
      tin.m_s = m_s;
      tin.a_s = reduced.a_s;
      tin.h_bar_s = reduced.h_bar_s;
      tin.jr_dot_nu_s = dots.jr_dot_nu;
    }

    const Vec6 integral = momentum_integral(cq.com, ref.com, mass);
    MatX task;
    Vec6 rhs;
    if (config.mode == ControllerMode::SeesawMixedMomentum) {
      const MatX j_s = jacobian_s(seesaw_params, seesaw_state);
      const MixedMomentumTerms mixed =
          mixed_momentum_terms(seesaw_params, seesaw_state, reduced, j_s, cwm.j_b,
                               cq.momentum.vec(), cq.com, mass, gravity);
      const Vec6 h_dot_star = desired_momentum_rate(
          mixed.h_m, ref.momentum, ref.momentum_rate, integral, config.gains.kp_momentum,
          config.gains.ki_momentum);
      task = mixed.a_m;
      rhs = h_dot_star;
      rhs.head<3>() += weight_vector(mass, gravity).head<3>();
      rhs.tail<3>() -= mixed.f_bias.tail<3>();
    } else {
      const Vec6 h_dot_star = desired_momentum_rate(
          cq.momentum.vec(), ref.momentum, ref.momentum_rate, integral,
          config.gains.kp_momentum, config.gains.ki_momentum);
      task = cwm.j_b.transpose();
      rhs = h_dot_star + weight_vector(mass, gravity);
    }

    const TorqueAffine torque =
        build_torque_affine(tin, config.gains, robot.q_j, robot.nu.tail(n), ref.posture);
    const LinearInequalities ineq = stacked_contact_constraints(
        config.limits, kin.left_foot.rotation, kin.right_foot.rotation);

    const WrenchDistributionResult dist = wrench_distribution(
        task, rhs, torque, ineq, config.null_space_wrench_offset, config.task_pinv_damping);

    cmd.f_star = dist.f_star;
    cmd.f0 = dist.f0;
    cmd.tau = torque.tau_const + torque.tau_f * dist.f_star;
    cmd.diagnostics.qp_status = dist.qp_status;
    cmd.diagnostics.qp_fallback = dist.fallback_equality_only;
    cmd.diagnostics.min_constraint_margin = dist.min_margin;
    cmd.diagnostics.task_residual = dist.task_residual;
  } catch (const std::exception& e) {
    cmd.tau.setZero();
    cmd.f_star.setZero();
    cmd.f0.setZero();
    cmd.diagnostics.fault = true;
    cmd.diagnostics.fault_reason = e.what();
  }
  return cmd;
}

}  // namespace seesaw
