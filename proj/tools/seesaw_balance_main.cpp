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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "seesaw/log.hpp"
#include "seesaw/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSimulationFault = 2;
constexpr int kExitAssertionFailure = 3;

int cmd_run(const std::string& scenario_path, const std::optional<std::string>& out_dir,
            const std::optional<std::string>& controller,
            const std::optional<double>& dt_physics, const std::optional<double>& duration,
            const std::optional<std::uint64_t>& seed) {
  seesaw::Scenario scenario;
  try {
    scenario = seesaw::load_scenario(scenario_path);
    if (controller) {
      if (*controller == "robot-momentum") {
        scenario.controller.mode = seesaw::ControllerMode::SeesawRobotMomentum;
      } else if (*controller == "mixed" || *controller == "mixed-momentum") {
        scenario.controller.mode = seesaw::ControllerMode::SeesawMixedMomentum;
      } else if (*controller == "rigid-contact") {
        scenario.controller.mode = seesaw::ControllerMode::RigidContact;
      } else {
        throw seesaw::ScenarioError("--controller: expected robot-momentum or mixed");
      }
    }
    if (dt_physics) scenario.dt_physics = *dt_physics;
    if (duration) scenario.duration = *duration;
    if (seed) scenario.seed = *seed;
    if (out_dir) scenario.output = *out_dir;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }

  try {
    const seesaw::RunOutput output = seesaw::run_scenario(scenario);
    seesaw::write_outputs(output, scenario.output);
    std::cout << "wrote " << (std::filesystem::path(scenario.output) / "log.csv").string()
              << " (" << output.log.rows.size() << " rows)\n";
    if (output.metrics.fault) {
      std::cerr << "simulation fault: " << output.metrics.fault_reason << "\n";
      return kExitSimulationFault;
    }
    if (!output.metrics.assertions_passed) {
      for (const auto& f : output.metrics.assertion_failures) {
        std::cerr << "assertion failed: " << f << "\n";
      }
      return kExitAssertionFailure;
    }
  } catch (const seesaw::ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "simulation fault: " << e.what() << "\n";
    return kExitSimulationFault;
  }
  return kExitOk;
}

int cmd_rank_survey(int samples, std::uint64_t seed, const std::string& model_path,
                    const std::optional<std::string>& out_dir) {
  try {
    const seesaw::RobotModel model = seesaw::load_model(model_path);
    const seesaw::SeesawParams params;
    const seesaw::RankSurveyReport report = seesaw::rank_survey(model, params, samples, seed);
    const std::string text = seesaw::rank_survey_to_json(report);
    std::cout << text;
    if (out_dir) {
      std::filesystem::create_directories(*out_dir);
      std::ofstream out(std::filesystem::path(*out_dir) / "rank-survey.json",
                        std::ios::binary);
      out << text;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_validate(const std::string& scenario_path) {
  try {
    const seesaw::Scenario scenario = seesaw::load_scenario(scenario_path);
    std::cout << "valid: " << scenario.name << "\n";
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Humanoid-on-seesaw balancing: scenario runner and analysis tools"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> controller;
  std::optional<double> dt_physics;
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;

  CLI::App* run = app.add_subcommand("run", "Run a scenario and write log.csv + metrics.json");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the scenario)");
  run->add_option("--controller", controller, "robot-momentum | mixed | rigid-contact");
  run->add_option("--dt-physics", dt_physics, "Physics step [s]");
  run->add_option("--duration", duration, "Simulation horizon [s]");
  run->add_option("--seed", seed, "Random seed recorded in the resolved config");

  int samples = 1000;
  std::uint64_t survey_seed = 0;
  std::string model_path = "assets/models/icub-reduced.json";
  CLI::App* survey = app.add_subcommand("rank-survey", "Sample states and report task-matrix ranks");
  survey->add_option("--samples", samples, "Number of sampled states")->required();
  survey->add_option("--seed", survey_seed, "RNG seed")->required();
  survey->add_option("--model", model_path, "Robot model JSON");
  survey->add_option("--out", out_dir, "Directory for rank-survey.json");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Validate a scenario file");
  validate->add_option("scenario", validate_path, "Scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(scenario_path, out_dir, controller, dt_physics, duration, seed);
  if (survey->parsed()) return cmd_rank_survey(samples, survey_seed, model_path, out_dir);
  if (validate->parsed()) return cmd_validate(validate_path);
  return kExitValidation;
}
