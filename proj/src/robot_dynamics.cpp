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

#include "seesaw/robot_dynamics.hpp"

namespace seesaw {

namespace {

// Spatial vectors below are referenced at the world origin with world axes:
// motion vectors (v_O; w), force vectors (F; moment about O). Referencing
// everything at one fixed point keeps the composite-rigid-body and
// Newton-Euler sweeps free of per-body frame transforms.

// Motion cross product m1 x m2, our (linear; angular) ordering.
Vec6 cross_motion(const Vec6& m1, const Vec6& m2) {
  Vec6 out;
  out.head<3>() = m1.tail<3>().cross(m2.head<3>()) + m1.head<3>().cross(m2.tail<3>());
  out.tail<3>() = m1.tail<3>().cross(m2.tail<3>());
  return out;
}

// Force cross product m x* g (dual of cross_motion).
Vec6 cross_force(const Vec6& m, const Vec6& g) {
  Vec6 out;
  out.head<3>() = m.tail<3>().cross(g.head<3>());
  out.tail<3>() = m.head<3>().cross(g.head<3>()) + m.tail<3>().cross(g.tail<3>());
  return out;
}

// Spatial inertia of one link about the world origin.
Mat6 link_inertia_at_origin(const LinkParams& link, const Rotation& r, const Vec3& world_com) {
  const Mat3 iw = r * link.inertia * r.transpose();
  const Mat3 sc = skew(world_com);
  Mat6 out;
  out.block<3, 3>(0, 0) = link.mass * Mat3::Identity();
  out.block<3, 3>(0, 3) = -link.mass * sc;
  out.block<3, 3>(3, 0) = link.mass * sc;
  out.block<3, 3>(3, 3) = iw - link.mass * sc * sc;
  return out;
}

struct BodyData {
  Rotation rotation;
  Vec3 position;       // link frame origin
  Vec3 world_com;
  Vec6 velocity;       // origin-referenced (v_O; w)
  Vec6 bias_accel;     // origin-referenced coordinate acceleration at nu_dot = 0
  Vec6 joint_subspace; // origin-referenced motion subspace of the driving joint
  Vec3 axis_world;
  Vec3 anchor;         // a point on the joint axis
};

// Base free-motion map from (v_B; w) coordinates to origin-referenced vectors.
Eigen::Matrix<double, 6, 6> base_motion_map(const Vec3& base_position) {
  Mat6 s = Mat6::Identity();
  s.block<3, 3>(0, 3) = skew(base_position);
  return s;
}

std::vector<BodyData> sweep(const RobotModel& model, const RobotState& state) {
  const int nl = static_cast<int>(model.links.size());
  std::vector<BodyData> bodies(nl);

  BodyData& base = bodies[0];
  base.rotation = state.base_rotation;
  base.position = state.base_position;
  base.world_com = base.position + base.rotation * model.links[0].com;
  base.velocity = base_motion_map(state.base_position) * state.nu.head<6>();
  base.bias_accel.setZero();
  base.bias_accel.head<3>() = state.nu.head<3>().cross(state.nu.segment<3>(3));

  for (int j = 0; j < model.dof(); ++j) {
    const JointParams& jt = model.joints[j];
    const BodyData& parent = bodies[jt.parent];
    BodyData& child = bodies[jt.child];

    child.anchor = parent.position + parent.rotation * jt.origin_position;
    const Rotation pre = parent.rotation * jt.origin_rotation;
    child.rotation = pre * so3_exp(jt.axis * state.q_j(j));
    child.position = child.anchor;
    child.world_com = child.position + child.rotation * model.links[jt.child].com;
    child.axis_world = pre * jt.axis;

    child.joint_subspace.head<3>() = child.anchor.cross(child.axis_world);
    child.joint_subspace.tail<3>() = child.axis_world;

    const double qd = state.nu(6 + j);
    child.velocity = parent.velocity + child.joint_subspace * qd;
    child.bias_accel =
        parent.bias_accel + cross_motion(parent.velocity, child.joint_subspace) * qd;
  }
  return bodies;
}

FrameMotion frame_motion(const BodyData& body, const FixedFrame& frame) {
  FrameMotion f;
  f.rotation = body.rotation * frame.rotation;
  f.position = body.position + body.rotation * frame.position;
  f.angular_velocity = body.velocity.tail<3>();
  f.linear_velocity = body.velocity.head<3>() + f.angular_velocity.cross(f.position);
  return f;
}

// 6 x (n+6) Jacobian of a world point attached to `link`.
MatX point_jacobian(const RobotModel& model, const std::vector<BodyData>& bodies,
                    const RobotState& state, int link, const Vec3& point) {
  const int n = model.dof();
  MatX j = MatX::Zero(6, n + 6);
  j.block<3, 3>(0, 0) = Mat3::Identity();
  j.block<3, 3>(0, 3) = -skew(point - state.base_position);
  j.block<3, 3>(3, 3) = Mat3::Identity();
  int l = link;
  while (model.parent_joint[l] >= 0) {
    const int jt = model.parent_joint[l];
    const BodyData& b = bodies[model.joints[jt].child];
    j.block<3, 1>(0, 6 + jt) = b.axis_world.cross(point - b.anchor);
    j.block<3, 1>(3, 6 + jt) = b.axis_world;
    l = model.joints[jt].parent;
  }
  return j;
}

Vec6 point_bias_acceleration(const BodyData& body, const Vec3& point) {
  const Vec3 w = body.velocity.tail<3>();
  const Vec3 v_point = body.velocity.head<3>() + w.cross(point);
  Vec6 out;
  out.head<3>() = body.bias_accel.head<3>() + body.bias_accel.tail<3>().cross(point) +
                  w.cross(v_point);
  out.tail<3>() = body.bias_accel.tail<3>();
  return out;
}

}  // namespace

Kinematics forward_kinematics(const RobotModel& model, const RobotState& state) {
  state.validate(model);
  const auto bodies = sweep(model, state);
  Kinematics k;
  k.links.resize(bodies.size());
  double mass = 0.0;
  Vec3 weighted_com = Vec3::Zero();
  Vec3 weighted_vel = Vec3::Zero();
  for (size_t i = 0; i < bodies.size(); ++i) {
    FrameMotion& f = k.links[i];
    f.rotation = bodies[i].rotation;
    f.position = bodies[i].position;
    f.angular_velocity = bodies[i].velocity.tail<3>();
    f.linear_velocity = bodies[i].velocity.head<3>() + f.angular_velocity.cross(f.position);
    const double m = model.links[i].mass;
    mass += m;
    weighted_com += m * bodies[i].world_com;
    weighted_vel +=
        m * (bodies[i].velocity.head<3>() + f.angular_velocity.cross(bodies[i].world_com));
  }
  k.com = weighted_com / mass;
  k.com_velocity = weighted_vel / mass;
  k.left_foot = frame_motion(bodies[model.left_foot.link], model.left_foot);
  k.right_foot = frame_motion(bodies[model.right_foot.link], model.right_foot);
  k.torso = frame_motion(bodies[model.torso.link], model.torso);
  return k;
}

MatX mass_matrix(const RobotModel& model, const RobotState& state) {
  const int n = model.dof();
  const auto bodies = sweep(model, state);

  // Composite (subtree) inertias, all about the world origin.
  std::vector<Mat6> composite(model.links.size());
  for (size_t i = 0; i < model.links.size(); ++i) {
    composite[i] = link_inertia_at_origin(model.links[i], bodies[i].rotation,
                                          bodies[i].world_com);
  }
  for (int j = n - 1; j >= 0; --j) {
    composite[model.joints[j].parent] += composite[model.joints[j].child];
  }

  const Mat6 s0 = base_motion_map(state.base_position);
  MatX m = MatX::Zero(n + 6, n + 6);
  m.topLeftCorner(6, 6) = s0.transpose() * composite[0] * s0;
  for (int j = 0; j < n; ++j) {
    const int child = model.joints[j].child;
    const Vec6 f = composite[child] * bodies[child].joint_subspace;
    m(6 + j, 6 + j) = bodies[child].joint_subspace.dot(f);
    // Walk up the ancestor chain.
    int l = model.joints[j].parent;
    while (model.parent_joint[l] >= 0) {
      const int ja = model.parent_joint[l];
      const double v = bodies[model.joints[ja].child].joint_subspace.dot(f);
      m(6 + ja, 6 + j) = v;
      m(6 + j, 6 + ja) = v;
      l = model.joints[ja].parent;
    }
    m.block<6, 1>(0, 6 + j) = s0.transpose() * f;
    m.block<1, 6>(6 + j, 0) = m.block<6, 1>(0, 6 + j).transpose();
  }
  return m;
}

VecX bias_forces(const RobotModel& model, const RobotState& state, double gravity) {
  const int n = model.dof();
  const auto bodies = sweep(model, state);
  const Vec3 g_vec(0.0, 0.0, -gravity);

  std::vector<Vec6> net(model.links.size());
  for (size_t i = 0; i < model.links.size(); ++i) {
    const Mat6 inertia =
        link_inertia_at_origin(model.links[i], bodies[i].rotation, bodies[i].world_com);
    Vec6 gravity_wrench;
    gravity_wrench.head<3>() = model.links[i].mass * g_vec;
    gravity_wrench.tail<3>() = bodies[i].world_com.cross(model.links[i].mass * g_vec);
    net[i] = inertia * bodies[i].bias_accel +
             cross_force(bodies[i].velocity, inertia * bodies[i].velocity) - gravity_wrench;
  }
  for (int j = n - 1; j >= 0; --j) {
    net[model.joints[j].parent] += net[model.joints[j].child];
  }

  VecX h(n + 6);
  h.head<6>() = base_motion_map(state.base_position).transpose() * net[0];
  for (int j = 0; j < n; ++j) {
    h(6 + j) = bodies[model.joints[j].child].joint_subspace.dot(net[model.joints[j].child]);
  }
  return h;
}

MatX contact_jacobian(const RobotModel& model, const RobotState& state) {
  const auto bodies = sweep(model, state);
  const FrameMotion left = frame_motion(bodies[model.left_foot.link], model.left_foot);
  const FrameMotion right = frame_motion(bodies[model.right_foot.link], model.right_foot);
  MatX j(12, model.dof() + 6);
  j.topRows(6) = point_jacobian(model, bodies, state, model.left_foot.link, left.position);
  j.bottomRows(6) =
      point_jacobian(model, bodies, state, model.right_foot.link, right.position);
  return j;
}

VecX jacobian_dot_nu(const RobotModel& model, const RobotState& state) {
  const auto bodies = sweep(model, state);
  const FrameMotion left = frame_motion(bodies[model.left_foot.link], model.left_foot);
  const FrameMotion right = frame_motion(bodies[model.right_foot.link], model.right_foot);
  VecX out(12);
  out.head<6>() = point_bias_acceleration(bodies[model.left_foot.link], left.position);
  out.tail<6>() = point_bias_acceleration(bodies[model.right_foot.link], right.position);
  return out;
}

MatX frame_jacobian(const RobotModel& model, const RobotState& state, int frame_index) {
  const FixedFrame& frame = model.frame(frame_index);
  const auto bodies = sweep(model, state);
  const FrameMotion f = frame_motion(bodies[frame.link], frame);
  return point_jacobian(model, bodies, state, frame.link, f.position);
}

CentroidalQuantities centroidal_momentum(const RobotModel& model, const RobotState& state) {
  const auto bodies = sweep(model, state);
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  for (size_t i = 0; i < bodies.size(); ++i) {
    mass += model.links[i].mass;
    com += model.links[i].mass * bodies[i].world_com;
  }
  com /= mass;

  CentroidalQuantities out;
  out.com = com;
  Vec3 h_lin = Vec3::Zero();
  Vec3 h_ang = Vec3::Zero();
  for (size_t i = 0; i < bodies.size(); ++i) {
    const double m = model.links[i].mass;
    const Vec3 w = bodies[i].velocity.tail<3>();
    const Vec3 v_com = bodies[i].velocity.head<3>() + w.cross(bodies[i].world_com);
    const Mat3 iw = bodies[i].rotation * model.links[i].inertia * bodies[i].rotation.transpose();
    h_lin += m * v_com;
    h_ang += iw * w + (bodies[i].world_com - com).cross(m * v_com);
  }
  out.momentum.linear = h_lin;
  out.momentum.angular = h_ang;
  out.com_velocity = h_lin / mass;
  return out;
}

CentroidalWrenchMap centroidal_wrench_map(const RobotModel& model, const RobotState& state) {
  const auto bodies = sweep(model, state);
  const FrameMotion left = frame_motion(bodies[model.left_foot.link], model.left_foot);
  const FrameMotion right = frame_motion(bodies[model.right_foot.link], model.right_foot);
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  for (size_t i = 0; i < bodies.size(); ++i) {
    mass += model.links[i].mass;
    com += model.links[i].mass * bodies[i].world_com;
  }
  com /= mass;

  CentroidalWrenchMap out;
  out.j_b = MatX::Zero(12, 6);
  out.j_b.topRows(6) = wrench_transform(left.position - com).transpose();
  out.j_b.bottomRows(6) = wrench_transform(right.position - com).transpose();
  out.j_j = contact_jacobian(model, state).rightCols(model.dof());
  return out;
}

RobotState integrate_robot_semi_implicit(const RobotModel& model, const RobotState& state,
                                         const VecX& nu_dot, double dt) {
  RobotState next = state;
  next.nu = state.nu + dt * nu_dot;
  next.base_position = state.base_position + dt * next.nu.head<3>();
  next.base_rotation = so3_exp(dt * next.nu.segment<3>(3)) * state.base_rotation;
  next.q_j = state.q_j + dt * next.nu.tail(model.dof());
  return next;
}

}  // namespace seesaw
