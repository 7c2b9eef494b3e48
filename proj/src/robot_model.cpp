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

#include "seesaw/robot_model.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace seesaw {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ModelError("model: " + where + ": " + what);
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number()) fail(where + "." + key, "expected a number");
  return j[key].get<double>();
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string()) fail(where + "." + key, "expected a string");
  return j[key].get<std::string>();
}

Vec3 get_vec3(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) {
    fail(where + "." + key, "expected an array of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[key][i].is_number()) fail(where + "." + key, "expected an array of 3 numbers");
    v(i) = j[key][i].get<double>();
  }
  return v;
}

Mat3 get_mat3(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) {
    fail(where + "." + key, "expected a 3x3 array");
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    const auto& row = j[key][r];
    if (!row.is_array() || row.size() != 3) fail(where + "." + key, "expected a 3x3 array");
    for (int c = 0; c < 3; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

Rotation rotation_from_rpy(const Vec3& rpy) {
  return so3_exp(Vec3(0, 0, rpy.z())) * so3_exp(Vec3(0, rpy.y(), 0)) *
         so3_exp(Vec3(rpy.x(), 0, 0));
}

FixedFrame parse_frame(const json& j, const std::string& frame_name,
                       const std::map<std::string, int>& link_ids, const std::string& where) {
  FixedFrame f;
  f.name = frame_name;
  const std::string link = get_string(j, "link", where);
  auto it = link_ids.find(link);
  if (it == link_ids.end()) fail(where + ".link", "unknown link '" + link + "'");
  f.link = it->second;
  f.position = get_vec3(j, "xyz", where);
  if (j.contains("rpy")) f.rotation = rotation_from_rpy(get_vec3(j, "rpy", where));
  return f;
}

bool is_spd(const Mat3& m) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9) return false;
  Eigen::SelfAdjointEigenSolver<Mat3> es(m);
  return es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace

int RobotModel::frame_index(const std::string& frame_name) const {
  if (frame_name == left_foot.name) return 0;
  if (frame_name == right_foot.name) return 1;
  if (frame_name == torso.name) return 2;
  throw ModelError("model: unknown frame '" + frame_name + "'");
}

const FixedFrame& RobotModel::frame(int index) const {
  switch (index) {
    case 0: return left_foot;
    case 1: return right_foot;
    case 2: return torso;
    default: throw ModelError("model: frame index out of range");
  }
}

void RobotModel::validate() const {
  if (links.empty()) fail("links", "at least one link (the base) is required");
  if (static_cast<int>(parent_joint.size()) != static_cast<int>(links.size())) {
    fail("topology", "parent bookkeeping out of sync");
  }
  if (parent_joint[0] != -1) fail("topology", "link 0 must be the base");
  double mass_sum = 0.0;
  for (size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    if (l.mass <= 0.0) fail("links." + l.name, "mass must be > 0");
    if (!is_spd(l.inertia)) fail("links." + l.name, "inertia must be symmetric positive definite");
    mass_sum += l.mass;
  }
  for (size_t j = 0; j < joints.size(); ++j) {
    const auto& jt = joints[j];
    if (jt.parent < 0 || jt.parent >= static_cast<int>(links.size()) || jt.child <= 0 ||
        jt.child >= static_cast<int>(links.size())) {
      fail("joints." + jt.name, "parent/child out of range");
    }
    if (std::abs(jt.axis.norm() - 1.0) > 1e-9) fail("joints." + jt.name, "axis must be unit norm");
    if (!is_valid_rotation(jt.origin_rotation, 1e-9)) {
      fail("joints." + jt.name, "origin rotation invalid");
    }
  }
  if (mass_sum <= 0.0) fail("links", "total mass must be > 0");
  if (std::abs(mass_sum - total_mass) > 1e-9) {
    fail("total_mass", "sum of link masses does not match the declared total");
  }
  for (const FixedFrame* f : {&left_foot, &right_foot, &torso}) {
    if (f->link < 0 || f->link >= static_cast<int>(links.size())) {
      fail("frames." + f->name, "link out of range");
    }
  }
}

RobotState RobotState::neutral(const RobotModel& model) {
  RobotState s;
  s.q_j = VecX::Zero(model.dof());
  s.nu = VecX::Zero(model.dof() + 6);
  return s;
}

void RobotState::validate(const RobotModel& model) const {
  if (!is_valid_rotation(base_rotation)) throw ModelError("state: base rotation invalid");
  if (q_j.size() != model.dof() || nu.size() != model.dof() + 6) {
    throw ModelError("state: dimension mismatch with model");
  }
  if (!q_j.allFinite() || !nu.allFinite() || !base_position.allFinite()) {
    throw ModelError("state: non-finite entries");
  }
}

RobotModel parse_model(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ModelError("model: " + origin + ": parse error: " + e.what());
  }
  if (!j.is_object()) fail(origin, "top level must be an object");

  static const std::set<std::string> allowed = {"name",   "gravity",     "total_mass",
                                                "links",  "joints",      "foot_frames",
                                                "torso_frame"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) fail(origin, "unknown key '" + it.key() + "'");
  }

  RobotModel m;
  m.name = get_string(j, "name", origin);
  m.gravity = get_number(j, "gravity", origin);
  m.total_mass = get_number(j, "total_mass", origin);
  if (!j.contains("links") || !j["links"].is_array() || j["links"].empty()) {
    fail(origin + ".links", "expected a non-empty array");
  }

  std::map<std::string, int> link_ids;
  for (const auto& lj : j["links"]) {
    LinkParams l;
    l.name = get_string(lj, "name", "links");
    if (link_ids.count(l.name)) fail("links." + l.name, "duplicate link name");
    l.mass = get_number(lj, "mass", "links." + l.name);
    l.com = get_vec3(lj, "com", "links." + l.name);
    l.inertia = get_mat3(lj, "inertia", "links." + l.name);
    link_ids[l.name] = static_cast<int>(m.links.size());
    m.links.push_back(l);
  }

  std::vector<JointParams> raw;
  if (j.contains("joints")) {
    if (!j["joints"].is_array()) fail(origin + ".joints", "expected an array");
    for (const auto& jj : j["joints"]) {
      JointParams jt;
      jt.name = get_string(jj, "name", "joints");
      const std::string parent = get_string(jj, "parent", "joints." + jt.name);
      const std::string child = get_string(jj, "child", "joints." + jt.name);
      if (!link_ids.count(parent)) fail("joints." + jt.name, "unknown parent '" + parent + "'");
      if (!link_ids.count(child)) fail("joints." + jt.name, "unknown child '" + child + "'");
      jt.parent = link_ids[parent];
      jt.child = link_ids[child];
      jt.axis = get_vec3(jj, "axis", "joints." + jt.name);
      const double norm = jt.axis.norm();
      if (norm < 1e-12) fail("joints." + jt.name, "axis must be nonzero");
      jt.axis /= norm;
      if (jj.contains("origin")) {
        const auto& oj = jj["origin"];
        jt.origin_position = get_vec3(oj, "xyz", "joints." + jt.name + ".origin");
        if (oj.contains("rpy")) {
          jt.origin_rotation =
              rotation_from_rpy(get_vec3(oj, "rpy", "joints." + jt.name + ".origin"));
        }
      }
      raw.push_back(jt);
    }
  }

  // Tree check: every link except the root has exactly one driving joint.
  m.parent_joint.assign(m.links.size(), -1);
  std::vector<int> incoming(m.links.size(), 0);
  for (const auto& jt : raw) {
    incoming[jt.child]++;
    if (incoming[jt.child] > 1) fail("joints." + jt.name, "link has two parent joints");
  }
  int roots = 0;
  for (size_t i = 0; i < m.links.size(); ++i) {
    if (incoming[i] == 0) ++roots;
  }
  if (roots != 1) fail("topology", "tree must have exactly one root link");
  if (incoming[0] != 0) fail("topology", "the first link must be the root");

  // Topological order (parents before children), stable w.r.t. file order.
  std::vector<bool> placed(m.links.size(), false);
  placed[0] = true;
  std::vector<bool> used(raw.size(), false);
  while (m.joints.size() < raw.size()) {
    bool progressed = false;
    for (size_t k = 0; k < raw.size(); ++k) {
      if (used[k] || !placed[raw[k].parent]) continue;
      if (placed[raw[k].child]) fail("joints." + raw[k].name, "cycle detected");
      used[k] = true;
      placed[raw[k].child] = true;
      m.parent_joint[raw[k].child] = static_cast<int>(m.joints.size());
      m.joints.push_back(raw[k]);
      progressed = true;
    }
    if (!progressed) fail("topology", "disconnected links or cycle detected");
  }

  if (!j.contains("foot_frames") || !j["foot_frames"].is_object()) {
    fail(origin + ".foot_frames", "expected an object with 'left' and 'right'");
  }
  const auto& ff = j["foot_frames"];
  if (!ff.contains("left") || !ff.contains("right")) {
    fail(origin + ".foot_frames", "expected an object with 'left' and 'right'");
  }
  m.left_foot = parse_frame(ff["left"], "left_foot", link_ids, "foot_frames.left");
  m.right_foot = parse_frame(ff["right"], "right_foot", link_ids, "foot_frames.right");
  if (!j.contains("torso_frame")) fail(origin + ".torso_frame", "missing");
  m.torso = parse_frame(j["torso_frame"], "torso", link_ids, "torso_frame");

  m.validate();
  return m;
}

RobotModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("model: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path);
}

}  // namespace seesaw
