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

#include "seesaw/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "seesaw/log.hpp"

namespace seesaw {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError("scenario: " + where + ": " + what);
}

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) fail(where, "unknown key '" + it.key() + "'");
  }
}

double number_or(const json& j, const std::string& key, double fallback,
                 const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(where + "." + key, "expected a number");
  return j[key].get<double>();
}

Vec3 get_vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where, "expected an array of 3 numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) out(i) = v[i].get<double>();
  return out;
}

Vec6 get_vec6(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 6) fail(where, "expected an array of 6 numbers");
  Vec6 out;
  for (int i = 0; i < 6; ++i) out(i) = v[i].get<double>();
  return out;
}

Mat3 get_mat3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where, "expected a 3x3 array");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    if (!v[r].is_array() || v[r].size() != 3) fail(where, "expected a 3x3 array");
    for (int c = 0; c < 3; ++c) m(r, c) = v[r][c].get<double>();
  }
  return m;
}

SeesawParams parse_seesaw(const json& j) {
  SeesawParams p;
  if (j.is_null()) return p;
  reject_unknown(j, {"mass", "inertia", "radius", "com_drop", "foot_offsets"}, "seesaw");
  p.mass = number_or(j, "mass", p.mass, "seesaw");
  if (j.contains("inertia")) p.inertia = get_mat3(j["inertia"], "seesaw.inertia");
  p.radius = number_or(j, "radius", p.radius, "seesaw");
  p.com_drop = number_or(j, "com_drop", p.com_drop, "seesaw");
  if (j.contains("foot_offsets")) {
    const auto& fo = j["foot_offsets"];
    reject_unknown(fo, {"left", "right"}, "seesaw.foot_offsets");
    if (fo.contains("left")) p.foot_offset_left = get_vec3(fo["left"], "seesaw.foot_offsets.left");
    if (fo.contains("right")) {
      p.foot_offset_right = get_vec3(fo["right"], "seesaw.foot_offsets.right");
    }
  }
  try {
    p.validate();
  } catch (const std::exception& e) {
    fail("seesaw", e.what());
  }
  return p;
}

ControllerMode parse_mode(const std::string& mode) {
  if (mode == "robot-momentum") return ControllerMode::SeesawRobotMomentum;
  if (mode == "mixed" || mode == "mixed-momentum") return ControllerMode::SeesawMixedMomentum;
  if (mode == "rigid-contact") return ControllerMode::RigidContact;
  fail("controller.mode", "expected robot-momentum, mixed-momentum or rigid-contact");
}

std::string mode_name(ControllerMode mode) {
  switch (mode) {
    case ControllerMode::SeesawRobotMomentum: return "robot-momentum";
    case ControllerMode::SeesawMixedMomentum: return "mixed-momentum";
    case ControllerMode::RigidContact: return "rigid-contact";
  }
  return "robot-momentum";
}

ControllerConfig parse_controller(const json& j, int dof) {
  ControllerConfig c;
  c.gains = default_gains(dof);
  if (j.is_null()) return c;
  reject_unknown(j,
                 {"mode", "gains", "contact_limits", "torque_pinv_damping", "task_pinv_damping",
                  "null_space_wrench_offset"},
                 "controller");
  if (j.contains("mode")) c.mode = parse_mode(j["mode"].get<std::string>());
  if (j.contains("gains")) {
    const auto& g = j["gains"];
    reject_unknown(g,
                   {"kp_momentum_linear", "kp_momentum_angular", "ki_momentum_linear",
                    "ki_momentum_angular", "kp_postural", "kd_postural"},
                   "controller.gains");
    const double kpl = number_or(g, "kp_momentum_linear", 50.0, "controller.gains");
    const double kpa = number_or(g, "kp_momentum_angular", 20.0, "controller.gains");
    const double kil = number_or(g, "ki_momentum_linear", 45.0, "controller.gains");
    const double kia = number_or(g, "ki_momentum_angular", 0.0, "controller.gains");
    const double kpj = number_or(g, "kp_postural", 30.0, "controller.gains");
    const double kdj = number_or(g, "kd_postural", 2.0 * std::sqrt(kpj), "controller.gains");
    c.gains.kp_momentum = Vec6(kpl, kpl, kpl, kpa, kpa, kpa).asDiagonal();
    c.gains.ki_momentum = Vec6(kil, kil, kil, kia, kia, kia).asDiagonal();
    c.gains.kp_postural = kpj * MatX::Identity(dof, dof);
    c.gains.kd_postural = kdj * MatX::Identity(dof, dof);
  }
  if (j.contains("contact_limits")) {
    const auto& l = j["contact_limits"];
    reject_unknown(l, {"mu", "foot_half_length", "foot_half_width", "f_z_min", "pyramid_facets"},
                   "controller.contact_limits");
    c.limits.mu = number_or(l, "mu", c.limits.mu, "controller.contact_limits");
    c.limits.foot_half_length =
        number_or(l, "foot_half_length", c.limits.foot_half_length, "controller.contact_limits");
    c.limits.foot_half_width =
        number_or(l, "foot_half_width", c.limits.foot_half_width, "controller.contact_limits");
    c.limits.f_z_min = number_or(l, "f_z_min", c.limits.f_z_min, "controller.contact_limits");
    if (l.contains("pyramid_facets")) c.limits.pyramid_facets = l["pyramid_facets"].get<int>();
    try {
      c.limits.validate();
    } catch (const std::exception& e) {
      fail("controller.contact_limits", e.what());
    }
  }
  c.torque_pinv_damping =
      number_or(j, "torque_pinv_damping", c.torque_pinv_damping, "controller");
  c.task_pinv_damping = number_or(j, "task_pinv_damping", c.task_pinv_damping, "controller");
  if (j.contains("null_space_wrench_offset")) {
    const auto& v = j["null_space_wrench_offset"];
    if (!v.is_array() || v.size() != 12) {
      fail("controller.null_space_wrench_offset", "expected an array of 12 numbers");
    }
    for (int i = 0; i < 12; ++i) c.null_space_wrench_offset(i) = v[i].get<double>();
  }
  return c;
}

ReferenceConfig parse_reference(const json& j) {
  ReferenceConfig r;
  if (j.is_null()) return r;
  reject_unknown(j, {"type", "axis", "amplitude", "frequency"}, "reference");
  const std::string type = j.contains("type") ? j["type"].get<std::string>() : "constant";
  if (type == "constant") {
    r.type = ReferenceConfig::Type::Constant;
    return r;
  }
  if (type != "sinusoid") fail("reference.type", "expected constant or sinusoid");
  r.type = ReferenceConfig::Type::Sinusoid;
  const std::string axis = j.contains("axis") ? j["axis"].get<std::string>() : "y";
  if (axis == "x") {
    r.axis = 0;
  } else if (axis == "y") {
    r.axis = 1;
  } else if (axis == "z") {
    r.axis = 2;
  } else {
    fail("reference.axis", "expected x, y or z");
  }
  r.amplitude = number_or(j, "amplitude", 0.0, "reference");
  r.frequency = number_or(j, "frequency", 0.0, "reference");
  if (r.amplitude < 0.0) fail("reference.amplitude", "must be >= 0");
  if (r.frequency < 0.0) fail("reference.frequency", "must be >= 0");
  return r;
}

std::vector<Disturbance> parse_disturbances(const json& j) {
  std::vector<Disturbance> out;
  if (j.is_null()) return out;
  if (!j.is_array()) fail("disturbances", "expected an array");
  for (size_t i = 0; i < j.size(); ++i) {
    const auto& dj = j[i];
    const std::string where = "disturbances[" + std::to_string(i) + "]";
    reject_unknown(dj, {"frame", "wrench", "t_start", "duration"}, where);
    Disturbance d;
    if (dj.contains("frame")) d.frame = dj["frame"].get<std::string>();
    if (!dj.contains("wrench")) fail(where, "missing wrench");
    d.wrench = get_vec6(dj["wrench"], where + ".wrench");
    d.t_start = number_or(dj, "t_start", 0.0, where);
    d.duration = number_or(dj, "duration", 0.0, where);
    if (d.duration <= 0.0) fail(where + ".duration", "must be > 0");
    out.push_back(d);
  }
  return out;
}

ScenarioAssertions parse_assertions(const json& j) {
  ScenarioAssertions a;
  if (j.is_null()) return a;
  reject_unknown(j,
                 {"max_abs_theta", "max_coupling_residual", "max_pitch_yaw", "max_com_rmse",
                  "settle_within"},
                 "assertions");
  if (j.contains("max_abs_theta")) a.max_abs_theta = j["max_abs_theta"].get<double>();
  if (j.contains("max_coupling_residual")) {
    a.max_coupling_residual = j["max_coupling_residual"].get<double>();
  }
  if (j.contains("max_pitch_yaw")) a.max_pitch_yaw = j["max_pitch_yaw"].get<double>();
  if (j.contains("max_com_rmse")) a.max_com_rmse = j["max_com_rmse"].get<double>();
  if (j.contains("settle_within")) a.settle_within = j["settle_within"].get<double>();
  return a;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json vec_to_json(const VecX& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat3_to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) {
    json row = json::array();
    for (int c = 0; c < 3; ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("parse", e.what());
  }
  if (!j.is_object()) fail("top level", "expected an object");
  reject_unknown(j,
                 {"name", "model", "seesaw", "controller", "initial_posture", "initial_theta",
                  "reference", "disturbances", "duration", "dt_physics", "dt_control",
                  "baumgarte", "assertions", "output", "seed"},
                 "top level");

  Scenario s;
  if (!j.contains("name") || !j["name"].is_string()) fail("name", "expected a string");
  s.name = j["name"].get<std::string>();
  if (!j.contains("model") || !j["model"].is_string()) fail("model", "expected a path string");
  std::filesystem::path model_path = j["model"].get<std::string>();
  if (model_path.is_relative()) model_path = base_dir / model_path;
  s.model_path = std::filesystem::weakly_canonical(model_path).string();

  s.seesaw = parse_seesaw(j.contains("seesaw") ? j["seesaw"] : json());

  // The controller block needs the dof; peek into the model.
  RobotModel model;
  try {
    model = load_model(s.model_path);
  } catch (const std::exception& e) {
    fail("model", e.what());
  }
  s.controller = parse_controller(j.contains("controller") ? j["controller"] : json(),
                                  model.dof());

  if (!j.contains("initial_posture") || !j["initial_posture"].is_array()) {
    fail("initial_posture", "expected an array of joint angles");
  }
  if (static_cast<int>(j["initial_posture"].size()) != model.dof()) {
    fail("initial_posture", "size must equal the model dof (" + std::to_string(model.dof()) + ")");
  }
  s.initial_posture = VecX::Zero(model.dof());
  for (int i = 0; i < model.dof(); ++i) s.initial_posture(i) = j["initial_posture"][i].get<double>();

  s.initial_theta = number_or(j, "initial_theta", 0.0, "top level");
  s.reference = parse_reference(j.contains("reference") ? j["reference"] : json());
  s.disturbances = parse_disturbances(j.contains("disturbances") ? j["disturbances"] : json());

  if (!j.contains("duration")) fail("duration", "missing");
  s.duration = j["duration"].get<double>();
  if (s.duration <= 0.0) fail("duration", "must be > 0");
  s.dt_physics = number_or(j, "dt_physics", s.dt_physics, "top level");
  s.dt_control = number_or(j, "dt_control", s.dt_control, "top level");
  if (s.dt_physics <= 0.0 || s.dt_control <= 0.0) fail("dt", "time steps must be > 0");
  const double ratio = s.dt_control / s.dt_physics;
  if (std::abs(ratio - std::lround(ratio)) > 1e-9) {
    fail("dt_control", "must be an integer multiple of dt_physics");
  }
  if (j.contains("baumgarte")) {
    reject_unknown(j["baumgarte"], {"alpha", "beta", "yaw_compliance"}, "baumgarte");
    s.baumgarte.alpha = number_or(j["baumgarte"], "alpha", s.baumgarte.alpha, "baumgarte");
    s.baumgarte.beta = number_or(j["baumgarte"], "beta", s.baumgarte.beta, "baumgarte");
    s.baumgarte.yaw_compliance =
        number_or(j["baumgarte"], "yaw_compliance", s.baumgarte.yaw_compliance, "baumgarte");
  }
  s.assertions = parse_assertions(j.contains("assertions") ? j["assertions"] : json());
  s.output = j.contains("output") ? j["output"].get<std::string>() : "out/" + s.name;
  s.seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : 0;
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("scenario: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), std::filesystem::path(path).parent_path());
}

ReferenceSample sample_reference(const ReferenceConfig& ref, const Vec3& com0,
                                 const VecX& posture, double t) {
  ReferenceSample out;
  out.com = com0;
  out.posture = posture;
  if (ref.type == ReferenceConfig::Type::Sinusoid) {
    const double w = 2.0 * M_PI * ref.frequency;
    out.com(ref.axis) += ref.amplitude * std::sin(w * t);
    out.com_velocity(ref.axis) = ref.amplitude * w * std::cos(w * t);
    out.com_acceleration(ref.axis) = -ref.amplitude * w * w * std::sin(w * t);
  }
  return out;
}

std::string scenario_to_json(const Scenario& s) {
  ordered_json j;
  j["name"] = s.name;
  j["model"] = s.model_path;
  j["seesaw"] = {{"mass", s.seesaw.mass},
                 {"inertia", mat3_to_json(s.seesaw.inertia)},
                 {"radius", s.seesaw.radius},
                 {"com_drop", s.seesaw.com_drop},
                 {"foot_offsets",
                  {{"left", vec_to_json(s.seesaw.foot_offset_left)},
                   {"right", vec_to_json(s.seesaw.foot_offset_right)}}}};
  j["controller"] = {
      {"mode", mode_name(s.controller.mode)},
      {"gains",
       {{"kp_momentum_linear", s.controller.gains.kp_momentum(0, 0)},
        {"kp_momentum_angular", s.controller.gains.kp_momentum(3, 3)},
        {"ki_momentum_linear", s.controller.gains.ki_momentum(0, 0)},
        {"ki_momentum_angular", s.controller.gains.ki_momentum(3, 3)},
        {"kp_postural", s.controller.gains.kp_postural(0, 0)},
        {"kd_postural", s.controller.gains.kd_postural(0, 0)}}},
      {"contact_limits",
       {{"mu", s.controller.limits.mu},
        {"foot_half_length", s.controller.limits.foot_half_length},
        {"foot_half_width", s.controller.limits.foot_half_width},
        {"f_z_min", s.controller.limits.f_z_min},
        {"pyramid_facets", s.controller.limits.pyramid_facets}}},
      {"torque_pinv_damping", s.controller.torque_pinv_damping},
      {"task_pinv_damping", s.controller.task_pinv_damping},
      {"null_space_wrench_offset", vec_to_json(s.controller.null_space_wrench_offset)}};
  j["initial_posture"] = vec_to_json(s.initial_posture);
  j["initial_theta"] = s.initial_theta;
  switch (s.reference.type) {
    case ReferenceConfig::Type::Constant:
      j["reference"] = {{"type", "constant"}};
      break;
    case ReferenceConfig::Type::Sinusoid:
      j["reference"] = {{"type", "sinusoid"},
                        {"axis", s.reference.axis == 0 ? "x" : (s.reference.axis == 1 ? "y" : "z")},
                        {"amplitude", s.reference.amplitude},
                        {"frequency", s.reference.frequency}};
      break;
  }
  json ds = json::array();
  for (const auto& d : s.disturbances) {
    ds.push_back({{"frame", d.frame},
                  {"wrench", vec_to_json(d.wrench)},
                  {"t_start", d.t_start},
                  {"duration", d.duration}});
  }
  j["disturbances"] = ds;
  j["duration"] = s.duration;
  j["dt_physics"] = s.dt_physics;
  j["dt_control"] = s.dt_control;
  j["baumgarte"] = {{"alpha", s.baumgarte.alpha},
                    {"beta", s.baumgarte.beta},
                    {"yaw_compliance", s.baumgarte.yaw_compliance}};
  json asserts = json::object();
  if (s.assertions.max_abs_theta) asserts["max_abs_theta"] = *s.assertions.max_abs_theta;
  if (s.assertions.max_coupling_residual) {
    asserts["max_coupling_residual"] = *s.assertions.max_coupling_residual;
  }
  if (s.assertions.max_pitch_yaw) asserts["max_pitch_yaw"] = *s.assertions.max_pitch_yaw;
  if (s.assertions.max_com_rmse) asserts["max_com_rmse"] = *s.assertions.max_com_rmse;
  if (s.assertions.settle_within) asserts["settle_within"] = *s.assertions.settle_within;
  j["assertions"] = asserts;
  j["output"] = s.output;
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> log_columns(int dof) {
  std::vector<std::string> cols = {"t",
                                   "h_lin_x", "h_lin_y", "h_lin_z",
                                   "h_ang_x", "h_ang_y", "h_ang_z",
                                   "err_h_lin", "err_h_ang",
                                   "ht_lin_x", "ht_lin_y", "ht_lin_z",
                                   "ht_ang_x", "ht_ang_y", "ht_ang_z",
                                   "err_h_mixed",
                                   "com_x", "com_y", "com_z",
                                   "com_des_x", "com_des_y", "com_des_z",
                                   "theta"};
  for (int i = 0; i < dof; ++i) cols.push_back("tau_" + std::to_string(i));
  const char* wrench_names[12] = {"f_l_fx", "f_l_fy", "f_l_fz", "f_l_mx", "f_l_my", "f_l_mz",
                                  "f_r_fx", "f_r_fy", "f_r_fz", "f_r_mx", "f_r_my", "f_r_mz"};
  for (const char* w : wrench_names) cols.push_back(w);
  const char* fs_names[5] = {"fs_fx", "fs_fy", "fs_fz", "fs_my", "fs_mz"};
  for (const char* f : fs_names) cols.push_back(f);
  cols.push_back("res_coupling");
  cols.push_back("res_pitch_yaw");
  cols.push_back("qp_status");
  return cols;
}

std::vector<double> row_from_sample(const LogSample& s, int dof) {
  std::vector<double> row;
  row.reserve(43 + dof);
  row.push_back(s.t);
  for (int i = 0; i < 6; ++i) row.push_back(s.h(i));
  row.push_back(s.err_linear);
  row.push_back(s.err_angular);
  for (int i = 0; i < 6; ++i) row.push_back(s.h_t(i));
  row.push_back(s.err_mixed);
  for (int i = 0; i < 3; ++i) row.push_back(s.com(i));
  for (int i = 0; i < 3; ++i) row.push_back(s.com_des(i));
  row.push_back(s.theta);
  for (int i = 0; i < dof; ++i) row.push_back(s.tau(i));
  for (int i = 0; i < 12; ++i) row.push_back(s.f(i));
  for (int i = 0; i < 5; ++i) row.push_back(s.f_s(i));
  row.push_back(s.res_coupling);
  row.push_back(s.res_pitch_yaw);
  row.push_back(static_cast<double>(s.qp_status));
  return row;
}

SummaryMetrics compute_metrics(const Scenario& scenario, const RunResult& result,
                               ControllerMode mode) {
  SummaryMetrics m;
  m.fault = result.fault;
  m.fault_reason = result.fault_reason;
  m.max_coupling_residual = result.max_coupling_residual;
  m.max_pitch_yaw = result.max_pitch_yaw;
  if (result.samples.empty()) return m;

  m.theta_min = m.theta_max = result.samples.front().theta;
  double sq_sum = 0.0;
  for (const LogSample& s : result.samples) {
    m.peak_error_linear = std::max(m.peak_error_linear, s.err_linear);
    m.peak_error_angular = std::max(m.peak_error_angular, s.err_angular);
    m.peak_error_mixed = std::max(m.peak_error_mixed, s.err_mixed);
    m.theta_min = std::min(m.theta_min, s.theta);
    m.theta_max = std::max(m.theta_max, s.theta);
    if (s.qp_status != 0) ++m.qp_fallback_ticks;
    if (scenario.reference.type == ReferenceConfig::Type::Sinusoid) {
      const double e = s.com(scenario.reference.axis) - s.com_des(scenario.reference.axis);
      sq_sum += e * e;
    } else {
      sq_sum += (s.com - s.com_des).squaredNorm();
    }
  }
  m.com_rmse = std::sqrt(sq_sum / static_cast<double>(result.samples.size()));

  // Per-disturbance recovery: peak of the controller's own error after the
  // push, then the earliest time it stays below 5% of that peak.
  auto error_of = [mode](const LogSample& s) {
    if (mode == ControllerMode::SeesawMixedMomentum) return s.err_mixed;
    return std::hypot(s.err_linear, s.err_angular);
  };
  for (const Disturbance& d : scenario.disturbances) {
    if (d.t_start >= result.samples.back().t) continue;  // never fired
    DisturbanceRecovery rec;
    rec.t_start = d.t_start;
    const double window_end = d.t_start + d.duration + 2.0;
    size_t peak_idx = 0;
    for (size_t i = 0; i < result.samples.size(); ++i) {
      const double t = result.samples[i].t;
      if (t < d.t_start || t > window_end) continue;
      const double e = error_of(result.samples[i]);
      if (e > rec.peak_error) {
        rec.peak_error = e;
        peak_idx = i;
      }
    }
    if (rec.peak_error <= 0.0) {
      m.recoveries.push_back(rec);
      continue;
    }
    const double threshold = 0.05 * rec.peak_error;
    double settle_at = -1.0;
    for (size_t i = peak_idx; i < result.samples.size(); ++i) {
      if (error_of(result.samples[i]) > threshold) {
        settle_at = -1.0;
      } else if (settle_at < 0.0) {
        settle_at = result.samples[i].t;
      }
    }
    if (settle_at >= 0.0) {
      rec.settled = true;
      rec.settle_time = settle_at - d.t_start;
    }
    m.recoveries.push_back(rec);
  }

  // Scenario-declared assertions.
  const auto& a = scenario.assertions;
  auto check = [&m](bool ok, const std::string& what) {
    if (!ok) {
      m.assertions_passed = false;
      m.assertion_failures.push_back(what);
    }
  };
  if (a.max_abs_theta) {
    check(std::max(std::abs(m.theta_min), std::abs(m.theta_max)) <= *a.max_abs_theta,
          "max_abs_theta");
  }
  if (a.max_coupling_residual) {
    check(m.max_coupling_residual <= *a.max_coupling_residual, "max_coupling_residual");
  }
  if (a.max_pitch_yaw) check(m.max_pitch_yaw <= *a.max_pitch_yaw, "max_pitch_yaw");
  if (a.max_com_rmse) check(m.com_rmse <= *a.max_com_rmse, "max_com_rmse");
  if (a.settle_within) {
    for (const auto& rec : m.recoveries) {
      check(rec.settled && rec.settle_time <= *a.settle_within, "settle_within");
    }
  }
  if (m.fault) m.assertions_passed = false;
  return m;
}

}  // namespace

RunOutput run_scenario(const Scenario& scenario) {
  const RobotModel model = load_model(scenario.model_path);
  const WorldState initial = assemble_initial_world(model, scenario.seesaw,
                                                    scenario.initial_posture,
                                                    scenario.initial_theta);
  const Vec3 com0 = centroidal_momentum(model, initial.robot).com;
  log_info("scenario '%s': %s controller, duration %.1fs", scenario.name.c_str(),
           mode_name(scenario.controller.mode).c_str(), scenario.duration);

  const double mass = model.total_mass;
  const ControllerConfig& config = scenario.controller;
  TorqueSource controller = [&model, &scenario, &config, &com0, mass](const WorldState& world,
                                                                      double t) {
    const ReferenceSample ref_sample =
        sample_reference(scenario.reference, com0, scenario.initial_posture, t);
    const MomentumReference ref = make_momentum_reference(ref_sample, mass);
    const ControlCommand cmd =
        control_step(model, world.robot, scenario.seesaw, world.seesaw, ref, config);
    ControllerTick tick;
    tick.tau = cmd.tau;
    tick.fault = cmd.diagnostics.fault;
    tick.fault_reason = cmd.diagnostics.fault_reason;
    tick.momentum_des = ref.momentum;
    tick.mixed_momentum_des = ref.momentum;  // same closed form for H_m^d
    tick.com_des = ref.com;
    tick.qp_status_code = cmd.diagnostics.qp_fallback ? 1 : 0;
    return tick;
  };

  CoupledSimulator sim(model, scenario.seesaw, scenario.baumgarte, initial);
  const RunResult result = sim.run(initial, controller, scenario.duration, scenario.dt_physics,
                                   scenario.dt_control, scenario.disturbances);

  RunOutput out;
  out.resolved = scenario;
  out.log.columns = log_columns(model.dof());
  out.log.rows.reserve(result.samples.size());
  for (const LogSample& s : result.samples) {
    out.log.rows.push_back(row_from_sample(s, model.dof()));
  }
  out.metrics = compute_metrics(scenario, result, config.mode);
  log_info("scenario '%s': done, %zu samples, fault=%d", scenario.name.c_str(),
           out.log.rows.size(), static_cast<int>(out.metrics.fault));
  return out;
}

void write_outputs(const RunOutput& output, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  std::ofstream csv(out_dir / "log.csv", std::ios::binary);
  if (!csv) throw ScenarioError("scenario: cannot write " + (out_dir / "log.csv").string());
  for (size_t i = 0; i < output.log.columns.size(); ++i) {
    if (i > 0) csv << ',';
    csv << output.log.columns[i];
  }
  csv << '\n';
  for (const auto& row : output.log.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i > 0) csv << ',';
      csv << format_double(row[i]);
    }
    csv << '\n';
  }

  std::ofstream mj(out_dir / "metrics.json", std::ios::binary);
  if (!mj) throw ScenarioError("scenario: cannot write " + (out_dir / "metrics.json").string());
  mj << metrics_to_json(output.metrics);
  std::ofstream sj(out_dir / "scenario-resolved.json", std::ios::binary);
  if (!sj) {
    throw ScenarioError("scenario: cannot write " +
                        (out_dir / "scenario-resolved.json").string());
  }
  sj << scenario_to_json(output.resolved);
}

std::string metrics_to_json(const SummaryMetrics& m) {
  ordered_json j;
  j["fault"] = m.fault;
  j["fault_reason"] = m.fault_reason;
  j["qp_fallback_ticks"] = m.qp_fallback_ticks;
  j["peak_error_linear"] = m.peak_error_linear;
  j["peak_error_angular"] = m.peak_error_angular;
  j["peak_error_mixed"] = m.peak_error_mixed;
  j["theta_min"] = m.theta_min;
  j["theta_max"] = m.theta_max;
  j["com_rmse"] = m.com_rmse;
  j["max_coupling_residual"] = m.max_coupling_residual;
  j["max_pitch_yaw"] = m.max_pitch_yaw;
  json recs = json::array();
  for (const auto& r : m.recoveries) {
    recs.push_back({{"t_start", r.t_start},
                    {"peak_error", r.peak_error},
                    {"settled", r.settled},
                    {"settle_time", r.settle_time}});
  }
  j["recoveries"] = recs;
  j["assertions_passed"] = m.assertions_passed;
  j["assertion_failures"] = m.assertion_failures;
  return j.dump(2) + "\n";
}

SummaryMetrics metrics_from_json(const std::string& text) {
  const json j = json::parse(text);
  SummaryMetrics m;
  m.fault = j.at("fault").get<bool>();
  m.fault_reason = j.at("fault_reason").get<std::string>();
  m.qp_fallback_ticks = j.at("qp_fallback_ticks").get<int>();
  m.peak_error_linear = j.at("peak_error_linear").get<double>();
  m.peak_error_angular = j.at("peak_error_angular").get<double>();
  m.peak_error_mixed = j.at("peak_error_mixed").get<double>();
  m.theta_min = j.at("theta_min").get<double>();
  m.theta_max = j.at("theta_max").get<double>();
  m.com_rmse = j.at("com_rmse").get<double>();
  m.max_coupling_residual = j.at("max_coupling_residual").get<double>();
  m.max_pitch_yaw = j.at("max_pitch_yaw").get<double>();
  for (const auto& r : j.at("recoveries")) {
    DisturbanceRecovery rec;
    rec.t_start = r.at("t_start").get<double>();
    rec.peak_error = r.at("peak_error").get<double>();
    rec.settled = r.at("settled").get<bool>();
    rec.settle_time = r.at("settle_time").get<double>();
    m.recoveries.push_back(rec);
  }
  m.assertions_passed = j.at("assertions_passed").get<bool>();
  for (const auto& f : j.at("assertion_failures")) {
    m.assertion_failures.push_back(f.get<std::string>());
  }
  return m;
}

RankSurveyReport rank_survey(const RobotModel& model, const SeesawParams& params, int samples,
                             std::uint64_t seed) {
  if (samples <= 0) throw ScenarioError("rank survey: samples must be > 0");
  RankSurveyReport report;
  report.samples = samples;
  report.seed = seed;
  report.a_f_min_kept_ratio = 1.0;
  report.a_s_max_dropped_ratio = 0.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = model.dof();

  for (int k = 0; k < samples; ++k) {
    RobotState robot = RobotState::neutral(model);
    for (int i = 0; i < n; ++i) robot.q_j(i) = 0.5 * u(rng);
    robot.base_position = Vec3(0.1 * u(rng), 0.1 * u(rng), 0.75 + 0.1 * u(rng));
    robot.base_rotation = so3_exp(Vec3(0.2 * u(rng), 0.2 * u(rng), 0.2 * u(rng)));
    for (int i = 0; i < n + 6; ++i) robot.nu(i) = 0.5 * u(rng);

    const double theta = 0.4 * u(rng);
    SeesawState seesaw = seesaw_rest_state(params, theta);
    seesaw.com_position.head<2>() += Eigen::Vector2d(0.1 * u(rng), 0.1 * u(rng));
    Vec6 nu_s;
    for (int i = 0; i < 6; ++i) nu_s(i) = 0.5 * u(rng);
    seesaw.nu = nu_s;

    // J_r anchored at the sampled robot's foot frames, matching the
    // controller's convention; the rank structure of A_f needs J_b and J_r
    // to reference the same contact points.
    const Kinematics kin = forward_kinematics(model, robot);
    const MatX j_r =
        jacobian_r_points(seesaw.rotation, kin.left_foot.position - seesaw.com_position,
                          kin.right_foot.position - seesaw.com_position);
    const MatX j_s = jacobian_s(params, seesaw);
    const JacobianDotTerms dots = jacobian_dot_terms(params, seesaw);
    const Mat6 m_s = seesaw_mass_matrix(params);
    const Vec6 h_s = seesaw_bias(params, seesaw, model.gravity);
    const ReducedSeesawDynamics red = reduce_seesaw_dynamics(m_s, h_s, j_r, j_s, dots.js_dot_nu);
    const CentroidalWrenchMap cwm = centroidal_wrench_map(model, robot);
    const MatX a_f = task_matrix_af(cwm.j_b, red.a_s);
    const MatX m = mass_matrix(model, robot);
    const MatX lambda =
        contact_jacobian(model, robot) * m.ldlt().solve(MatX::Identity(n + 6, n + 6)).rightCols(n);

    report.rank_a_s[matrix_rank(red.a_s)]++;
    report.rank_a_f[matrix_rank(a_f)]++;
    report.rank_j_s[matrix_rank(j_s, 1e-6)]++;
    report.rank_lambda[matrix_rank(lambda)]++;

    Eigen::JacobiSVD<MatX> svd_af(a_f);
    const VecX& sv_af = svd_af.singularValues();
    const int r_af = matrix_rank(a_f);
    if (r_af > 0) {
      report.a_f_min_kept_ratio =
          std::min(report.a_f_min_kept_ratio, sv_af(r_af - 1) / sv_af(0));
    }
    Eigen::JacobiSVD<MatX> svd_as(red.a_s);
    const VecX& sv_as = svd_as.singularValues();
    const int r_as = matrix_rank(red.a_s);
    if (r_as < sv_as.size() && sv_as(0) > 0.0) {
      report.a_s_max_dropped_ratio =
          std::max(report.a_s_max_dropped_ratio, sv_as(r_as) / sv_as(0));
    }
  }
  return report;
}

std::string rank_survey_to_json(const RankSurveyReport& report) {
  ordered_json j;
  j["samples"] = report.samples;
  j["seed"] = report.seed;
  auto hist = [](const std::map<int, int>& h) {
    ordered_json out;
    for (const auto& [rank, count] : h) out[std::to_string(rank)] = count;
    return out;
  };
  j["rank_a_s"] = hist(report.rank_a_s);
  j["rank_a_f"] = hist(report.rank_a_f);
  j["rank_j_s"] = hist(report.rank_j_s);
  j["rank_lambda"] = hist(report.rank_lambda);
  j["a_f_min_kept_ratio"] = report.a_f_min_kept_ratio;
  j["a_s_max_dropped_ratio"] = report.a_s_max_dropped_ratio;
  return j.dump(2) + "\n";
}

}  // namespace seesaw
