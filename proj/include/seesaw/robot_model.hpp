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

#include <stdexcept>
#include <string>
#include <vector>

#include "seesaw/spatial.hpp"

namespace seesaw {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LinkParams {
  std::string name;
  double mass = 0.0;
  Vec3 com = Vec3::Zero();     // CoM offset in the link frame
  Mat3 inertia = Mat3::Zero(); // about the link CoM, link-frame axes
};

/// One-DoF revolute joint. The child frame coincides with the joint frame:
/// parent ∘ (origin_R, origin_p) ∘ Rot(axis, q).
struct JointParams {
  std::string name;
  int parent = -1;  // link index
  int child = -1;   // link index
  Vec3 axis = Vec3::UnitZ();  // unit vector, child-frame coordinates
  Rotation origin_rotation = Rotation::Identity();
  Vec3 origin_position = Vec3::Zero();
};

/// Frame rigidly attached to a link.
struct FixedFrame {
  std::string name;
  int link = -1;
  Rotation rotation = Rotation::Identity();
  Vec3 position = Vec3::Zero();
};

/// Floating-base kinematic tree. Link 0 is the base; joints are stored in
/// topological order (parent link index always precedes the child's joint).
struct RobotModel {
  std::string name;
  double gravity = 9.81;
  std::vector<LinkParams> links;
  std::vector<JointParams> joints;
  std::vector<int> parent_joint;  // per link, driving joint index (-1 for base)
  FixedFrame left_foot;
  FixedFrame right_foot;
  FixedFrame torso;
  double total_mass = 0.0;

  int dof() const { return static_cast<int>(joints.size()); }
  int frame_index(const std::string& frame_name) const;  // throws ModelError
  const FixedFrame& frame(int index) const;

  void validate() const;  // throws ModelError on invariant violations
};

struct RobotState {
  Vec3 base_position = Vec3::Zero();
  Rotation base_rotation = Rotation::Identity();
  VecX q_j;  // n
  VecX nu;   // n + 6: (v_B, omega_B, qdot_j), world axes

  static RobotState neutral(const RobotModel& model);
  void validate(const RobotModel& model) const;
};

/// Loads and validates a model from the documented JSON schema
/// (assets/model.schema.json). Throws ModelError with a field path on
/// malformed input.
RobotModel load_model(const std::string& path);
RobotModel parse_model(const std::string& json_text, const std::string& origin);

}  // namespace seesaw
