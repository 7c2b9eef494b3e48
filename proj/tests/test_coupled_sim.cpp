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

const VecX kPosture = (VecX(10) << 0, -0.2, 0.4, -0.2, 0, 0, -0.2, 0.4, -0.2, 0).finished();

MomentumReference rest_reference(const RobotModel& model, const WorldState& world) {
  ReferenceSample sample;
  sample.com = centroidal_momentum(model, world.robot).com;
  sample.posture = world.robot.q_j;
  return make_momentum_reference(sample, model.total_mass);
}

TorqueSource balance_controller(const RobotModel& model, const SeesawParams& params,
                                const ControllerConfig& config, const MomentumReference& ref) {
  return [&model, &params, config, ref](const WorldState& world, double) {
    const ControlCommand cmd =
        control_step(model, world.robot, params, world.seesaw, ref, config);
    ControllerTick tick;
    tick.tau = cmd.tau;
    tick.fault = cmd.diagnostics.fault;
    tick.fault_reason = cmd.diagnostics.fault_reason;
    tick.momentum_des = ref.momentum;
    tick.mixed_momentum_des = ref.momentum;
    tick.com_des = ref.com;
    tick.qp_status_code = cmd.diagnostics.qp_fallback ? 1 : 0;
    return tick;
  };
}

}  // namespace

TEST_CASE("static equilibrium: weights flow through the contacts") {
  const RobotModel model = load_reduced_model();
  SeesawParams params;
  const WorldState world = assemble_initial_world(model, params, kPosture, 0.0);
  const MomentumReference ref = rest_reference(model, world);
  ControllerConfig config;
  config.mode = ControllerMode::SeesawRobotMomentum;
  config.gains = default_gains(model.dof());
  const ControlCommand cmd = control_step(model, world.robot, params, world.seesaw, ref, config);
  REQUIRE(!cmd.diagnostics.fault);

  CoupledSimulator sim(model, params, BaumgarteParams{}, world);
  const StepSolution sol = sim.assemble_and_solve(world, cmd.tau, {});
  CHECK(sol.nu_dot.cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(sol.nu_s_dot.cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(std::abs(sol.f(2) + sol.f(8) - 31.0 * 9.81) <= 1e-6);
  CHECK(std::abs(sol.f_s(2) - 35.0 * 9.81) <= 1e-6);
  CHECK(sol.kkt_residual <= 1e-9);
}

TEST_CASE("no gravity, no torque, at rest: everything stays zero") {
  RobotModel model = load_reduced_model();
  model.gravity = 0.0;
  SeesawParams params;
  const WorldState world = assemble_initial_world(model, params, kPosture, 0.0);
  CoupledSimulator sim(model, params, BaumgarteParams{}, world);
  const StepSolution sol = sim.assemble_and_solve(world, VecX::Zero(model.dof()), {});
  CHECK(sol.nu_dot.cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(sol.nu_s_dot.cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(sol.f.cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(sol.f_s.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("every block of the coupled system is satisfied by the solution") {
  const RobotModel model = load_reduced_model();
  SeesawParams params;
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    WorldState world = assemble_initial_world(model, params, kPosture, urand(rng, -0.2, 0.2));
    // Rolling-consistent board velocity, weld-consistent robot velocity plus
    // a joint-space component in the weld null space.
    const SeesawContactGeometry g = contact_geometry(params, world.seesaw);
    const Vec3 omega_body(urand(rng, -0.5, 0.5), 0.0, 0.0);
    const Vec3 omega_world = world.seesaw.rotation * omega_body;
    Vec6 nu_s;
    nu_s << world.seesaw.rotation.transpose() * (skew(g.p_sp) * omega_world), omega_body;
    world.seesaw.nu = nu_s;
    const MatX j = contact_jacobian(model, world.robot);
    const MatX j_r = jacobian_r(params, world.seesaw);
    world.robot.nu = damped_pinv(j) * (j_r * nu_s) +
                     nullspace_projector(j) * rand_vec(rng, model.dof() + 6, 0.3);

    const VecX tau = rand_vec(rng, model.dof(), 5.0);
    CoupledSimulator sim(model, params, BaumgarteParams{}, world);
    const StepSolution sol = sim.assemble_and_solve(world, tau, {});

    // Reconstruct all four blocks independently.
    const MatX m = mass_matrix(model, world.robot);
    const VecX h = bias_forces(model, world.robot, model.gravity);
    const VecX jdn = jacobian_dot_nu(model, world.robot);
    const Kinematics kin = forward_kinematics(model, world.robot);
    const Vec3 p_sl = kin.left_foot.position - world.seesaw.com_position;
    const Vec3 p_sr = kin.right_foot.position - world.seesaw.com_position;
    const MatX j_r_pts = jacobian_r_points(world.seesaw.rotation, p_sl, p_sr);
    const MatX j_s = jacobian_s(params, world.seesaw);
    const JacobianDotTerms dots =
        jacobian_dot_terms_points(params, world.seesaw, p_sl, p_sr);

    VecX tau_gen = VecX::Zero(model.dof() + 6);
    tau_gen.tail(model.dof()) = tau;
    const VecX robot_res =
        m * sol.nu_dot + h - tau_gen - j.transpose() * sol.f;
    CHECK(robot_res.cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + h.cwiseAbs().maxCoeff()));

    const Vec6 board_res = seesaw_mass_matrix(params) * sol.nu_s_dot +
                           seesaw_bias(params, world.seesaw, model.gravity) +
                           j_r_pts.transpose() * sol.f - j_s.transpose() * sol.f_s;
    CHECK(board_res.cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + sol.f.cwiseAbs().maxCoeff()));

    // Velocity-consistent start: the Baumgarte terms are (nearly) zero, so
    // the acceleration-level constraints must hold, with the configured
    // compliance absorbing the foot-yaw rows.
    VecX coupling_res =
        j * sol.nu_dot + jdn - j_r_pts * sol.nu_s_dot - dots.jr_dot_nu;
    const BaumgarteParams bg;
    coupling_res(5) += bg.yaw_compliance * sol.f(5);
    coupling_res(11) += bg.yaw_compliance * sol.f(11);
    CHECK(coupling_res.cwiseAbs().maxCoeff() <= 1e-6);
    const VecX rolling_res = j_s * sol.nu_s_dot + dots.js_dot_nu;
    CHECK(rolling_res.cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("semi-implicit Euler integrates constant acceleration exactly") {
  const RobotModel model = single_body_model();
  RobotState state = RobotState::neutral(model);
  VecX nu_dot = VecX::Zero(6);
  nu_dot(2) = -9.81;
  const double dt = 1e-3;
  for (int k = 0; k < 1000; ++k) {
    state = integrate_robot_semi_implicit(model, state, nu_dot, dt);
  }
  CHECK(std::abs(state.nu(2) + 9.81) <= 1e-9);
}

TEST_CASE("disturbances map through the frame jacobian inside their window") {
  const RobotModel model = load_reduced_model();
  SeesawParams params;
  const WorldState world = assemble_initial_world(model, params, kPosture, 0.0);
  CoupledSimulator sim(model, params, BaumgarteParams{}, world);

  Disturbance push;
  push.frame = "torso";
  push.wrench << 0, 100, 0, 0, 0, 0;
  push.t_start = 20.0;
  push.duration = 0.01;

  CHECK(sim.disturbance_generalized_force(world, push, 5.0).cwiseAbs().maxCoeff() == 0.0);
  const VecX inside = sim.disturbance_generalized_force(world, push, 20.005);
  const VecX expected =
      frame_jacobian(model, world.robot, kTorsoFrame).transpose() * push.wrench;
  CHECK((inside - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(inside.cwiseAbs().maxCoeff() > 0.0);

  Disturbance bad = push;
  bad.frame = "elbow";
  CHECK_THROWS_AS(sim.disturbance_generalized_force(world, bad, 20.005), ModelError);

  Disturbance no_duration = push;
  no_duration.duration = 0.0;
  CHECK_THROWS_AS(sim.disturbance_generalized_force(world, no_duration, 20.005),
                  SimulationError);
}

TEST_CASE("impulse changes the free-floating momentum by force times time") {
  RobotModel model = load_reduced_model();
  model.gravity = 0.0;  // isolate the push
  RobotState state = RobotState::neutral(model);
  state.q_j = kPosture;
  state.base_position = Vec3(0, 0, 0.79);

  Disturbance push;
  push.frame = "torso";
  push.wrench << 0, 100, 0, 0, 0, 0;
  push.t_start = 0.02;
  push.duration = 0.01;

  const double dt = 1e-3;
  double t = 0.0;
  for (int k = 0; k < 100; ++k) {
    VecX force = VecX::Zero(model.dof() + 6);
    if (push.active(t)) {
      force = frame_jacobian(model, state, kTorsoFrame).transpose() * push.wrench;
    }
    const VecX nu_dot = mass_matrix(model, state)
                            .ldlt()
                            .solve(force - bias_forces(model, state, model.gravity));
    state = integrate_robot_semi_implicit(model, state, nu_dot, dt);
    t += dt;
  }
  const Vec3 h_lin = centroidal_momentum(model, state).momentum.linear;
  CHECK(std::abs(h_lin.y() - 1.0) <= 0.02);  // 100 N for 0.01 s
  CHECK(std::abs(h_lin.x()) <= 0.02);
  CHECK(std::abs(h_lin.z()) <= 0.02);
}

TEST_CASE("closed-loop hold: constraints stay tight for three seconds") {
  const RobotModel model = load_reduced_model();
  SeesawParams params;
  const WorldState world = assemble_initial_world(model, params, kPosture, 0.0);
  const MomentumReference ref = rest_reference(model, world);
  ControllerConfig config;
  config.mode = ControllerMode::SeesawRobotMomentum;
  config.gains = default_gains(model.dof());

  CoupledSimulator sim(model, params, BaumgarteParams{}, world);
  const RunResult result =
      sim.run(world, balance_controller(model, params, config, ref), 3.0, 1e-3, 1e-2, {});
  REQUIRE(!result.fault);
  CHECK(result.max_coupling_residual <= 1e-5);
  CHECK(result.max_pitch_yaw <= 1e-5);
  CHECK(result.samples.size() == 300);
  // The hold stays quiet: momentum error does not grow.
  CHECK(result.samples.back().err_linear <= 1e-3);
  CHECK(std::abs(result.samples.back().theta) <= 1e-3);
}

TEST_CASE("momentum bookkeeping matches the contact wrenches along a run") {
  const RobotModel model = load_reduced_model();
  SeesawParams params;
  const WorldState world = assemble_initial_world(model, params, kPosture, 0.0);
  const MomentumReference ref = rest_reference(model, world);
  ControllerConfig config;
  config.mode = ControllerMode::SeesawRobotMomentum;
  config.gains = default_gains(model.dof());
  CoupledSimulator sim(model, params, BaumgarteParams{}, world);

  // Drive towards a shifted CoM so the wrenches are not static.
  MomentumReference shifted = ref;
  shifted.com += Vec3(0.0, 0.01, 0.0);
  WorldState state = world;
  const double dt = 1e-3;
  const ControlCommand cmd =
      control_step(model, state.robot, params, state.seesaw, shifted, config);
  for (int k = 0; k < 50; ++k) {
    const Vec6 h0 = centroidal_momentum(model, state.robot).momentum.vec();
    const StepSolution sol = sim.assemble_and_solve(state, cmd.tau, {});
    const CentroidalWrenchMap cwm = centroidal_wrench_map(model, state.robot);
    Vec6 weight = Vec6::Zero();
    weight(2) = model.total_mass * model.gravity;
    const Vec6 analytic = cwm.j_b.transpose() * sol.f - weight;
    state.robot = integrate_robot_semi_implicit(model, state.robot, sol.nu_dot, dt);
    state.seesaw = integrate_seesaw_semi_implicit(state.seesaw, sol.nu_s_dot, dt);
    state.time += dt;
    const Vec6 h1 = centroidal_momentum(model, state.robot).momentum.vec();
    const Vec6 fd = (h1 - h0) / dt;
    CHECK((fd - analytic).cwiseAbs().maxCoeff() <=
          1e-2 * (1.0 + analytic.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("physics step halving shows first-order self convergence") {
  const RobotModel model = load_reduced_model();
  SeesawParams params;
  WorldState world = assemble_initial_world(model, params, kPosture, 0.0);
  // Slightly rolled start with frozen gravity compensation: the open-loop
  // drift is smooth and integrator error dominates.
  const WorldState level = world;
  const MomentumReference ref = rest_reference(model, level);
  ControllerConfig config;
  config.mode = ControllerMode::SeesawRobotMomentum;
  config.gains = default_gains(model.dof());
  const VecX tau =
      control_step(model, level.robot, params, level.seesaw, ref, config).tau;

  WorldState start = assemble_initial_world(model, params, kPosture, 0.02);
  CoupledSimulator sim(model, params, BaumgarteParams{}, start);
  auto run_fixed = [&](double dt) {
    WorldState s = start;
    const int steps = static_cast<int>(std::lround(0.5 / dt));
    for (int k = 0; k < steps; ++k) s = sim.step(s, tau, {}, dt);
    return s;
  };
  const WorldState ref_state = run_fixed(2.5e-4);
  const WorldState coarse = run_fixed(2e-3);
  const WorldState fine = run_fixed(1e-3);
  const double err_coarse =
      std::abs(coarse.seesaw.theta - ref_state.seesaw.theta) +
      (coarse.robot.base_position - ref_state.robot.base_position).norm();
  const double err_fine =
      std::abs(fine.seesaw.theta - ref_state.seesaw.theta) +
      (fine.robot.base_position - ref_state.robot.base_position).norm();
  const double ratio = err_coarse / err_fine;
  CHECK(ratio > 1.4);
  CHECK(ratio < 3.5);
}

TEST_CASE("frozen torques lose the board: negative control") {
  const RobotModel model = load_reduced_model();
  SeesawParams params;
  const WorldState level = assemble_initial_world(model, params, kPosture, 0.0);
  const MomentumReference ref = rest_reference(model, level);
  ControllerConfig config;
  config.mode = ControllerMode::SeesawRobotMomentum;
  config.gains = default_gains(model.dof());
  const VecX tau_frozen =
      control_step(model, level.robot, params, level.seesaw, ref, config).tau;

  const double theta0 = 0.02;
  WorldState world = assemble_initial_world(model, params, kPosture, theta0);
  CoupledSimulator sim(model, params, BaumgarteParams{}, world);
  double max_theta = 0.0;
  bool lost = false;
  try {
    for (int k = 0; k < 5000; ++k) {
      world = sim.step(world, tau_frozen, {}, 1e-3);
      max_theta = std::max(max_theta, std::abs(world.seesaw.theta));
    }
  } catch (const std::exception&) {
    lost = true;  // board left the rolling domain entirely
  }
  CHECK((lost || max_theta > 5.0 * theta0));
}

TEST_CASE("controller faults terminate the run with a record") {
  const RobotModel model = load_reduced_model();
  SeesawParams params;
  const WorldState world = assemble_initial_world(model, params, kPosture, 0.0);
  CoupledSimulator sim(model, params, BaumgarteParams{}, world);
  int calls = 0;
  TorqueSource faulty = [&](const WorldState&, double) {
    ControllerTick tick;
    tick.tau = VecX::Zero(model.dof());
    if (++calls >= 3) {
      tick.fault = true;
      tick.fault_reason = "synthetic fault";
    }
    return tick;
  };
  const RunResult result = sim.run(world, faulty, 1.0, 1e-3, 1e-2, {});
  CHECK(result.fault);
  CHECK(result.fault_reason == "synthetic fault");
  CHECK(result.samples.size() == 2);
}

TEST_CASE("run rejects mismatched step sizes") {
  const RobotModel model = load_reduced_model();
  SeesawParams params;
  const WorldState world = assemble_initial_world(model, params, kPosture, 0.0);
  CoupledSimulator sim(model, params, BaumgarteParams{}, world);
  TorqueSource idle = [&](const WorldState&, double) {
    ControllerTick tick;
    tick.tau = VecX::Zero(model.dof());
    return tick;
  };
  CHECK_THROWS_AS(sim.run(world, idle, 1.0, 1e-3, 2.5e-3, {}), SimulationError);
}

TEST_CASE("joint trajectories ignore the wrench redundancy (short run)") {
  const RobotModel model = load_reduced_model();
  SeesawParams params;
  const WorldState world = assemble_initial_world(model, params, kPosture, 0.0);
  const MomentumReference ref = rest_reference(model, world);

  ControllerConfig base;
  base.mode = ControllerMode::SeesawRobotMomentum;
  base.gains = default_gains(model.dof());
  ControllerConfig offset = base;
  std::mt19937_64 rng(71);
  offset.null_space_wrench_offset =
      null_space_wrench(centroidal_wrench_map(model, world.robot).j_b, rng, 50.0);

  CoupledSimulator sim(model, params, BaumgarteParams{}, world);
  const RunResult run_a =
      sim.run(world, balance_controller(model, params, base, ref), 1.5, 1e-3, 1e-2, {});
  const RunResult run_b =
      sim.run(world, balance_controller(model, params, offset, ref), 1.5, 1e-3, 1e-2, {});
  REQUIRE(!run_a.fault);
  REQUIRE(!run_b.fault);

  // The published wrenches differ substantially...
  double wrench_gap = 0.0;
  for (size_t k = 0; k < run_a.samples.size(); ++k) {
    wrench_gap = std::max(wrench_gap,
                          (run_a.samples[k].f - run_b.samples[k].f).cwiseAbs().maxCoeff());
  }
  CHECK(wrench_gap > 1.0);
  // ...while the joint trajectories coincide.
  const double dq = (run_a.final_state.robot.q_j - run_b.final_state.robot.q_j)
                        .cwiseAbs()
                        .maxCoeff();
  CHECK(dq < 1e-6);
}

TEST_CASE("identical runs are bit identical") {
  const RobotModel model = load_reduced_model();
  SeesawParams params;
  const WorldState world = assemble_initial_world(model, params, kPosture, 0.0);
  const MomentumReference ref = rest_reference(model, world);
  ControllerConfig config;
  config.mode = ControllerMode::SeesawMixedMomentum;
  config.gains = default_gains(model.dof());
  CoupledSimulator sim(model, params, BaumgarteParams{}, world);
  const RunResult a =
      sim.run(world, balance_controller(model, params, config, ref), 0.5, 1e-3, 1e-2, {});
  const RunResult b =
      sim.run(world, balance_controller(model, params, config, ref), 0.5, 1e-3, 1e-2, {});
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t k = 0; k < a.samples.size(); ++k) {
    CHECK(a.samples[k].theta == b.samples[k].theta);
    CHECK((a.samples[k].tau - b.samples[k].tau).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.samples[k].f - b.samples[k].f).cwiseAbs().maxCoeff() == 0.0);
  }
}
