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

#include <functional>
#include <string>
#include <vector>

#include "seesaw/robot_dynamics.hpp"
#include "seesaw/seesaw_dynamics.hpp"

namespace seesaw {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WorldState {
  RobotState robot;
  SeesawState seesaw;
  double time = 0.0;
};

struct Disturbance {
  std::string frame = "torso";
  Vec6 wrench = Vec6::Zero();  // inertial axes, applied at the frame origin
  double t_start = 0.0;
  double duration = 0.0;

  void validate() const;
  bool active(double t) const { return t >= t_start && t < t_start + duration; }
};

struct StepSolution {
  VecX nu_dot;    // n+6
  Vec6 nu_s_dot;
  VecX f;         // 12, feet wrenches (left stacked on right)
  VecX f_s;       // 5, ground contact force + pitch/yaw moments
  double kkt_residual = 0.0;
};

struct BaumgarteParams {
  double alpha = 20.0;
  double beta = 20.0;
  // Constraint-force mixing on the foot-yaw weld rows; see the KKT notes in
  // the implementation.
  double yaw_compliance = 1e-4;
};

/// Per-tick output of whatever drives the torques during a run.
struct ControllerTick {
  VecX tau;
  bool fault = false;
  std::string fault_reason;
  Vec6 momentum_des = Vec6::Zero();        // robot H^d, for error logging
  Vec6 mixed_momentum_des = Vec6::Zero();  // H_m^d
  Vec3 com_des = Vec3::Zero();
  int qp_status_code = 0;
};

using TorqueSource = std::function<ControllerTick(const WorldState&, double)>;

struct LogSample {
  double t = 0.0;
  Vec6 h = Vec6::Zero();
  double err_linear = 0.0;
  double err_angular = 0.0;
  Vec6 h_t = Vec6::Zero();
  double err_mixed = 0.0;
  Vec3 com = Vec3::Zero();
  Vec3 com_des = Vec3::Zero();
  double theta = 0.0;
  VecX tau;
  VecX f;
  VecX f_s;
  double res_coupling = 0.0;
  double res_pitch_yaw = 0.0;
  int qp_status = 0;
};

struct RunResult {
  std::vector<LogSample> samples;  // one per controller tick
  bool fault = false;
  std::string fault_reason;
  double max_coupling_residual = 0.0;  // ||J nu - J_r nu_s||_inf over substeps
  double max_pitch_yaw = 0.0;          // board pitch/yaw excursion [rad]
  WorldState final_state;
};

/// Robot + total (robot + board) momentum, both at their respective CoMs.
struct MomentumBookkeeping {
  Vec6 robot;
  Vec6 total;
};
MomentumBookkeeping momentum_bookkeeping(const RobotModel& model, const RobotState& robot,
                                         const SeesawParams& params, const SeesawState& seesaw);

/// Ground-truth integrator of the coupled robot/board dynamics: solves the
/// square linear system in (nu_dot, nu_s_dot, f, f_s) with
/// Baumgarte-stabilized constraint right-hand sides, then steps with
/// fixed-step semi-implicit Euler. Foot attachment poses and the rolling
/// anchors are captured from the initial state.
class CoupledSimulator {
 public:
  CoupledSimulator(RobotModel model, SeesawParams params, BaumgarteParams baumgarte,
                   const WorldState& initial);

  StepSolution assemble_and_solve(const WorldState& world, const VecX& tau,
                                  const std::vector<Disturbance>& disturbances) const;

  WorldState step(const WorldState& world, const VecX& tau,
                  const std::vector<Disturbance>& disturbances, double dt) const;

  /// J_frame' * wrench when the disturbance window covers t, zero otherwise.
  VecX disturbance_generalized_force(const WorldState& world, const Disturbance& d,
                                     double t) const;

  /// Zero-order-hold torque loop: the controller runs every dt_control with
  /// dt_control / dt_physics integrator substeps in between.
  RunResult run(const WorldState& initial, const TorqueSource& controller, double duration,
                double dt_physics, double dt_control,
                const std::vector<Disturbance>& disturbances) const;

  const RobotModel& model() const { return model_; }
  const SeesawParams& params() const { return params_; }

 private:
  RobotModel model_;
  SeesawParams params_;
  BaumgarteParams baumgarte_;
  // Weld anchors (in the board frame) and rolling-odometry anchors.
  Vec3 foot_anchor_pos_[2];
  Rotation foot_anchor_rot_[2];
  double axis_x_anchor_ = 0.0;
  double rolling_anchor_ = 0.0;  // y_axis + radius * theta at t = 0
};

/// Builds a rest state with the board at roll `theta0` and the robot feet
/// placed exactly on the attachment frames (base pose solved from forward
/// kinematics; requires a posture with both feet level).
WorldState assemble_initial_world(const RobotModel& model, const SeesawParams& params,
                                  const VecX& posture, double theta0 = 0.0);

}  // namespace seesaw
