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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seesaw/balance_control.hpp"
#include "seesaw/coupled_sim.hpp"

namespace seesaw {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReferenceConfig {
  enum class Type { Constant, Sinusoid };
  Type type = Type::Constant;
  int axis = 1;  // 0:x 1:y 2:z
  double amplitude = 0.0;  // [m]
  double frequency = 0.0;  // [Hz]
};

/// Post-run checks a scenario may declare; violations exit with status 3.
struct ScenarioAssertions {
  std::optional<double> max_abs_theta;
  std::optional<double> max_coupling_residual;
  std::optional<double> max_pitch_yaw;
  std::optional<double> max_com_rmse;
  std::optional<double> settle_within;  // [s] after each disturbance
};

struct Scenario {
  std::string name;
  std::string model_path;  // resolved to an absolute path on load
  SeesawParams seesaw;
  ControllerConfig controller;
  VecX initial_posture;
  double initial_theta = 0.0;
  ReferenceConfig reference;
  std::vector<Disturbance> disturbances;
  double duration = 0.0;
  double dt_physics = 1e-3;
  double dt_control = 1e-2;
  BaumgarteParams baumgarte;
  ScenarioAssertions assertions;
  std::string output = "out";
  std::uint64_t seed = 0;
};

struct SimLog {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct DisturbanceRecovery {
  double t_start = 0.0;
  double peak_error = 0.0;
  bool settled = false;
  double settle_time = 0.0;  // from t_start to staying below 5% of peak
};

struct SummaryMetrics {
  bool fault = false;
  std::string fault_reason;
  int qp_fallback_ticks = 0;
  double peak_error_linear = 0.0;
  double peak_error_angular = 0.0;
  double peak_error_mixed = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  double com_rmse = 0.0;  // tracked axis for sinusoid references, 3-D norm otherwise
  double max_coupling_residual = 0.0;
  double max_pitch_yaw = 0.0;
  std::vector<DisturbanceRecovery> recoveries;
  bool assertions_passed = true;
  std::vector<std::string> assertion_failures;
};

struct RunOutput {
  SimLog log;
  SummaryMetrics metrics;
  Scenario resolved;
};

/// Parses and validates a scenario JSON file; defaults are filled in and
/// unknown keys rejected. Relative model paths resolve against the scenario
/// file location.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir);

ReferenceSample sample_reference(const ReferenceConfig& ref, const Vec3& com0,
                                 const VecX& posture, double t);

RunOutput run_scenario(const Scenario& scenario);

/// Writes log.csv, metrics.json and scenario-resolved.json into out_dir.
void write_outputs(const RunOutput& output, const std::filesystem::path& out_dir);

std::string scenario_to_json(const Scenario& scenario);
std::string metrics_to_json(const SummaryMetrics& metrics);
SummaryMetrics metrics_from_json(const std::string& text);

struct RankSurveyReport {
  int samples = 0;
  std::uint64_t seed = 0;
  // rank -> count histograms
  std::map<int, int> rank_a_s;
  std::map<int, int> rank_a_f;
  std::map<int, int> rank_j_s;
  std::map<int, int> rank_lambda;
  // smallest retained / largest discarded singular value ratios seen
  double a_f_min_kept_ratio = 0.0;
  double a_s_max_dropped_ratio = 0.0;
};

/// Samples random valid states and reports SVD ranks of A_s, A_f, J_s and
/// Lambda with the 1e-8 relative threshold.
RankSurveyReport rank_survey(const RobotModel& model, const SeesawParams& params, int samples,
                             std::uint64_t seed);

std::string rank_survey_to_json(const RankSurveyReport& report);

}  // namespace seesaw
