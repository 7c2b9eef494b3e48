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

#include "seesaw/coupled_sim.hpp"

#include <cmath>

namespace seesaw {

namespace {

Vec3 axis_point(const SeesawParams& params, const SeesawState& state) {
  return state.com_position + state.rotation * Vec3(0.0, 0.0, params.com_drop);
}

// Pitch/yaw residual after removing the roll component.
Vec3 residual_rotation_vector(const SeesawState& state) {
  const Rotation roll = so3_exp(Vec3(state.theta, 0.0, 0.0));
  return so3_log(state.rotation * roll.transpose());
}

}  // namespace

void Disturbance::validate() const {
  if (duration <= 0.0) throw SimulationError("disturbance: duration must be > 0");
  if (!wrench.allFinite()) throw SimulationError("disturbance: wrench must be finite");
}

MomentumBookkeeping momentum_bookkeeping(const RobotModel& model, const RobotState& robot,
                                         const SeesawParams& params, const SeesawState& seesaw) {
  const CentroidalQuantities cq = centroidal_momentum(model, robot);
  const Vec3 system_com =
      (model.total_mass * cq.com + params.mass * seesaw.com_position) /
      (model.total_mass + params.mass);
  const Vec6 h_s_world = block_rotation(seesaw.rotation) * (seesaw_mass_matrix(params) * seesaw.nu);
  MomentumBookkeeping out;
  out.robot = cq.momentum.vec();
  out.total = wrench_transform(cq.com - system_com) * out.robot +
              wrench_transform(seesaw.com_position - system_com) * h_s_world;
  return out;
}

CoupledSimulator::CoupledSimulator(RobotModel model, SeesawParams params,
                                   BaumgarteParams baumgarte, const WorldState& initial)
    : model_(std::move(model)), params_(std::move(params)), baumgarte_(baumgarte) {
  params_.validate();
  initial.robot.validate(model_);
  initial.seesaw.validate();

  const Kinematics kin = forward_kinematics(model_, initial.robot);
  const Rotation rs_t = initial.seesaw.rotation.transpose();
  foot_anchor_pos_[0] = rs_t * (kin.left_foot.position - initial.seesaw.com_position);
  foot_anchor_pos_[1] = rs_t * (kin.right_foot.position - initial.seesaw.com_position);
  foot_anchor_rot_[0] = rs_t * kin.left_foot.rotation;
  foot_anchor_rot_[1] = rs_t * kin.right_foot.rotation;

  const Vec3 axis = axis_point(params_, initial.seesaw);
  axis_x_anchor_ = axis.x();
  rolling_anchor_ = axis.y() + params_.radius * initial.seesaw.theta;
}

VecX CoupledSimulator::disturbance_generalized_force(const WorldState& world,
                                                     const Disturbance& d, double t) const {
  d.validate();
  const int frame = model_.frame_index(d.frame);  // throws on unknown ids
  if (!d.active(t)) return VecX::Zero(model_.dof() + 6);
  return frame_jacobian(model_, world.robot, frame).transpose() * d.wrench;
}

StepSolution CoupledSimulator::assemble_and_solve(
    const WorldState& world, const VecX& tau,
    const std::vector<Disturbance>& disturbances) const {
  const int n = model_.dof();
  const int dim = n + 29;  // nu_dot (n+6) + nu_s_dot (6) + f (12) + f_s (5)

  const Kinematics kin = forward_kinematics(model_, world.robot);
  const MatX m = mass_matrix(model_, world.robot);
  const VecX h = bias_forces(model_, world.robot, model_.gravity);
  const MatX j = contact_jacobian(model_, world.robot);
  const VecX jdn = jacobian_dot_nu(model_, world.robot);

  const Vec3 p_sl = kin.left_foot.position - world.seesaw.com_position;
  const Vec3 p_sr = kin.right_foot.position - world.seesaw.com_position;
  const MatX j_r = jacobian_r_points(world.seesaw.rotation, p_sl, p_sr);
  const MatX j_s = jacobian_s(params_, world.seesaw);
  const JacobianDotTerms dots =
      jacobian_dot_terms_points(params_, world.seesaw, p_sl, p_sr);
  const Mat6 m_s = seesaw_mass_matrix(params_);
  const Vec6 h_s = seesaw_bias(params_, world.seesaw, model_.gravity);

  VecX external = VecX::Zero(n + 6);
  external.tail(n) += tau;
  for (const Disturbance& d : disturbances) {
    external += disturbance_generalized_force(world, d, world.time);
  }

  const double alpha = baumgarte_.alpha;
  const double beta2 = baumgarte_.beta * baumgarte_.beta;

  // Weld (coupling) stabilization terms.
  VecX e_vel = j * world.robot.nu - j_r * world.seesaw.nu;
  VecX e_pos = VecX::Zero(12);
  const FrameMotion* feet[2] = {&kin.left_foot, &kin.right_foot};
  for (int k = 0; k < 2; ++k) {
    const Vec3 target_pos =
        world.seesaw.com_position + world.seesaw.rotation * foot_anchor_pos_[k];
    const Rotation target_rot = world.seesaw.rotation * foot_anchor_rot_[k];
    e_pos.segment<3>(6 * k) = feet[k]->position - target_pos;
    e_pos.segment<3>(6 * k + 3) = so3_log(feet[k]->rotation * target_rot.transpose());
  }

  // Rolling stabilization terms (contact-point odometry + pitch/yaw).
  const Vec3 axis = axis_point(params_, world.seesaw);
  const Vec3 res_rot = residual_rotation_vector(world.seesaw);
  VecX e_roll(5);
  e_roll << axis.x() - axis_x_anchor_,
      axis.y() + params_.radius * world.seesaw.theta - rolling_anchor_,
      axis.z() - params_.radius, res_rot.y(), res_rot.z();
  const VecX roll_vel = j_s * world.seesaw.nu;

  MatX kkt = MatX::Zero(dim, dim);
  VecX rhs = VecX::Zero(dim);
  const int is = n + 6;   // seesaw acceleration offset
  const int iff = is + 6; // feet wrench offset
  const int ifs = iff + 12;

  kkt.block(0, 0, n + 6, n + 6) = m;
  kkt.block(0, iff, n + 6, 12) = -j.transpose();
  rhs.head(n + 6) = external - h;

  kkt.block(is, is, 6, 6) = m_s;
  kkt.block(is, iff, 6, 12) = j_r.transpose();
  kkt.block(is, ifs, 6, 5) = -j_s.transpose();
  rhs.segment(is, 6) = -h_s;

  kkt.block(iff, 0, 12, n + 6) = j;
  kkt.block(iff, is, 12, 6) = -j_r;
  rhs.segment(iff, 12) = -jdn + dots.jr_dot_nu - 2.0 * alpha * e_vel - beta2 * e_pos;
  // Torsional micro-compliance of the welds: with no yaw joints in the
  // legs, the differential foot-yaw moment is statically indeterminate and
  // its multiplier stiffens without bound near symmetric postures. A small
  // constraint-force-mixing term on the two yaw rows keeps it finite.
  kkt(iff + 5, iff + 5) = baumgarte_.yaw_compliance;
  kkt(iff + 11, iff + 11) = baumgarte_.yaw_compliance;

  kkt.block(ifs, is, 5, 6) = j_s;
  rhs.segment(ifs, 5) = -dots.js_dot_nu - 2.0 * alpha * roll_vel - beta2 * e_roll;

  // The reduced leg layout has no yaw joints, so the differential foot-yaw
  // moment is statically indeterminate: the KKT matrix carries an exact
  // one-dimensional null space in the multiplier block. A complete
  // orthogonal decomposition returns the minimum-norm solution, which
  // splits that moment evenly and keeps the accelerations (which are
  // unique) intact.
  Eigen::CompleteOrthogonalDecomposition<MatX> cod(kkt);
  const VecX sol = cod.solve(rhs);
  const double residual = (kkt * sol - rhs).cwiseAbs().maxCoeff() /
                          std::max(1.0, rhs.cwiseAbs().maxCoeff());
  if (!sol.allFinite() || residual > 1e-6) {
    throw SimulationError("coupled dynamics: singular KKT system (residual " +
                          std::to_string(residual) + ")");
  }

  StepSolution out;
  out.nu_dot = sol.head(n + 6);
  out.nu_s_dot = sol.segment<6>(is);
  out.f = sol.segment(iff, 12);
  out.f_s = sol.segment(ifs, 5);
  out.kkt_residual = residual;
  return out;
}

WorldState CoupledSimulator::step(const WorldState& world, const VecX& tau,
                                  const std::vector<Disturbance>& disturbances,
                                  double dt) const {
  if (dt <= 0.0) throw SimulationError("step: dt must be > 0");
  const StepSolution sol = assemble_and_solve(world, tau, disturbances);
  WorldState next;
  next.robot = integrate_robot_semi_implicit(model_, world.robot, sol.nu_dot, dt);
  next.seesaw = integrate_seesaw_semi_implicit(world.seesaw, sol.nu_s_dot, dt);
  next.time = world.time + dt;
  return next;
}

RunResult CoupledSimulator::run(const WorldState& initial, const TorqueSource& controller,
                                double duration, double dt_physics, double dt_control,
                                const std::vector<Disturbance>& disturbances) const {
  if (duration <= 0.0 || dt_physics <= 0.0 || dt_control <= 0.0) {
    throw SimulationError("run: duration and time steps must be > 0");
  }
  const double ratio = dt_control / dt_physics;
  const int substeps = static_cast<int>(std::lround(ratio));
  if (substeps < 1 || std::abs(ratio - substeps) > 1e-9) {
    throw SimulationError("run: dt_control must be an integer multiple of dt_physics");
  }
  const int ticks = static_cast<int>(std::lround(duration / dt_control));

  RunResult result;
  result.samples.reserve(ticks);
  WorldState world = initial;

  for (int k = 0; k < ticks; ++k) {
    const double t = world.time;
    const ControllerTick tick = controller(world, t);
    if (tick.fault) {
      result.fault = true;
      result.fault_reason = tick.fault_reason;
      break;
    }

    LogSample row;
    row.t = t;
    const MomentumBookkeeping mom =
        momentum_bookkeeping(model_, world.robot, params_, world.seesaw);
    row.h = mom.robot;
    row.h_t = mom.total;
    row.err_linear = (mom.robot.head<3>() - tick.momentum_des.head<3>()).norm();
    row.err_angular = (mom.robot.tail<3>() - tick.momentum_des.tail<3>()).norm();
    Vec6 h_m;
    h_m << mom.robot.head<3>(), mom.total.tail<3>();
    row.err_mixed = (h_m - tick.mixed_momentum_des).norm();
    row.com = centroidal_momentum(model_, world.robot).com;
    row.com_des = tick.com_des;
    row.theta = world.seesaw.theta;
    row.tau = tick.tau;
    row.qp_status = tick.qp_status_code;

    bool first_substep = true;
    for (int s = 0; s < substeps; ++s) {
      const StepSolution sol = assemble_and_solve(world, tick.tau, disturbances);
      if (first_substep) {
        row.f = sol.f;
        row.f_s = sol.f_s;
        first_substep = false;
      }
      // Constraint monitoring at every physics substep.
      const Kinematics kin = forward_kinematics(model_, world.robot);
      const Vec3 p_sl = kin.left_foot.position - world.seesaw.com_position;
      const Vec3 p_sr = kin.right_foot.position - world.seesaw.com_position;
      const MatX j_r = jacobian_r_points(world.seesaw.rotation, p_sl, p_sr);
      const MatX j = contact_jacobian(model_, world.robot);
      const double coupling =
          (j * world.robot.nu - j_r * world.seesaw.nu).cwiseAbs().maxCoeff();
      const Vec3 res_rot = residual_rotation_vector(world.seesaw);
      const double pitch_yaw = std::max(std::abs(res_rot.y()), std::abs(res_rot.z()));
      result.max_coupling_residual = std::max(result.max_coupling_residual, coupling);
      result.max_pitch_yaw = std::max(result.max_pitch_yaw, pitch_yaw);
      if (s == 0) {
        row.res_coupling = coupling;
        row.res_pitch_yaw = pitch_yaw;
      }

      WorldState next;
      next.robot = integrate_robot_semi_implicit(model_, world.robot, sol.nu_dot, dt_physics);
      next.seesaw = integrate_seesaw_semi_implicit(world.seesaw, sol.nu_s_dot, dt_physics);
      next.time = world.time + dt_physics;
      world = next;
    }
    result.samples.push_back(std::move(row));
  }
  result.final_state = world;
  return result;
}

WorldState assemble_initial_world(const RobotModel& model, const SeesawParams& params,
                                  const VecX& posture, double theta0) {
  params.validate();
  if (posture.size() != model.dof()) {
    throw SimulationError("initial world: posture size must match the model dof");
  }
  WorldState world;
  world.seesaw = seesaw_rest_state(params, theta0);

  RobotState probe = RobotState::neutral(model);
  probe.q_j = posture;
  probe.base_rotation = world.seesaw.rotation;
  const Kinematics kin = forward_kinematics(model, probe);

  const Vec3 target_left =
      world.seesaw.com_position + world.seesaw.rotation * params.foot_offset_left;
  const Vec3 target_right =
      world.seesaw.com_position + world.seesaw.rotation * params.foot_offset_right;
  probe.base_position = target_left - kin.left_foot.position;

  const Kinematics placed = forward_kinematics(model, probe);
  if ((placed.right_foot.position - target_right).norm() > 1e-6) {
    throw SimulationError("initial world: posture does not place both feet on the board");
  }
  world.robot = probe;
  world.time = 0.0;
  return world;
}

}  // namespace seesaw
