// Copyright 2026 The armsizer Authors
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

// End-to-end run: program -> trajectory -> PRO and DEMO torques -> metrics
// -> requirements -> round-1 selection -> round-2 revalidation, with every
// intermediate result rendered as an artifact document.

#pragma once

#include <armsizer/analysis/metrics.hpp>
#include <armsizer/dynamics/export.hpp>
#include <armsizer/model/serialize.hpp>
#include <armsizer/sizing/selection.hpp>
#include <armsizer/trajectory/export.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <functional>
#include <map>

namespace armsizer::service {

inline constexpr const char* kEngineVersion = "armsizer 0.3.0";

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string model_hash(const model::RigidBodyModel& m) { return hex64(fnv1a(model::model_to_json(m).dump())); }

struct PipelineInputs {
  model::RobotKind robot = model::RobotKind::kCR4;
  model::ScenarioConfig scenario = model::benchmark_scenario();
  trajectory::Program program;
  sizing::ActuatorCatalog catalog;
  sizing::SizingConfig sizing;
  analysis::GateThresholds gate;
  dynamics::KktOptions kkt;
  /// Threads for the per-sample inverse dynamics; artifacts do not depend on it.
  int workers = 1;
};

/// Artifact kinds, in write order, and their file names.
inline const std::vector<std::pair<std::string, std::string>>& artifact_files() {
  static const std::vector<std::pair<std::string, std::string>> files = {
      {"trajectory", "trajectory.csv"},     {"trajectory_meta", "trajectory.json"},
      {"torque_pro", "torque_pro.csv"},     {"torque_demo", "torque_demo.csv"},
      {"metrics", "metrics.csv"},           {"metrics_motor", "metrics_motor.csv"},
      {"sizing", "sizing.json"},            {"plots", "plots.json"},
      {"manifest", "manifest.json"}};
  return files;
}

inline std::string artifact_file(const std::string& kind) {
  for (const auto& [k, f] : artifact_files()) {
    if (k == kind) return f;
  }
  throw NotFound("unknown artifact kind '" + kind + "'");
}

inline std::string artifact_content_type(const std::string& kind) {
  return artifact_file(kind).ends_with(".csv") ? "text/csv" : "application/json";
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

struct PipelineResult {
  bool complete = false;
  std::string failed_stage;
  std::string error;
  std::map<std::string, std::string> artifacts;  // kind -> document

  std::optional<model::RigidBodyModel> model;
  std::optional<trajectory::TrajectorySamples> trajectory;
  std::optional<dynamics::TorqueProfile> pro, demo;
  dynamics::ProfileDiagnostics diagnostics;
  std::optional<analysis::ComparisonMetrics> metrics, metrics_motor;
  std::optional<sizing::Selection> round1, round2;
};

/// stage name, fraction of the pipeline completed
using ProgressFn = std::function<void(const std::string&, double)>;

inline const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> s = {"model",   "trajectory", "pro",    "demo",
                                             "compare", "round1",     "round2", "export"};
  return s;
}

/// Input checks that must pass before a run exists.
inline void validate_inputs(const PipelineInputs& in) {
  const auto issues = model::validate_scenario(in.scenario);
  if (!issues.empty()) throw InvalidArgument("scenario: " + issues.front());
  const int n_a = in.robot == model::RobotKind::kCR4 ? 4 : 6;
  trajectory::validate_program(in.program, n_a);
  sizing::validate_catalog(in.catalog);
  sizing::validate_config(in.sizing);
  require(in.workers >= 1, "workers must be >= 1");
}

inline std::vector<std::string> joint_names(const model::RigidBodyModel& m) {
  std::vector<std::string> out;
  for (int k = 0; k < m.n_a(); ++k) out.push_back(m.coordinate_joint(k).name);
  return out;
}

inline nlohmann::json manifest_json(const PipelineInputs& in, const PipelineResult& r) {
  nlohmann::json tol{{"closure", kinematics::kClosureTolerance},
                     {"kkt_closure_entry", in.kkt.closure_tolerance},
                     {"kkt_min_rcond", in.kkt.min_rcond},
                     {"kkt_refinement_steps", in.kkt.refinement_steps},
                     {"kkt_bias", in.kkt.bias == kinematics::BiasMethod::kAnalytic ? "analytic" : "finite_difference"},
                     {"ik", trajectory::kMoveLIkTolerance}};
  nlohmann::json out{{"engine_version", kEngineVersion},
                     {"robot", model::to_string(in.robot)},
                     {"model_hash", r.model ? model_hash(*r.model) : ""},
                     {"scenario", model::scenario_to_json(in.scenario)},
                     {"program", trajectory::program_to_json(in.program)},
                     {"dt", in.program.dt},
                     {"sample_ds", in.program.sample_ds},
                     {"tolerances", tol},
                     {"sizing_config",
                      {{"sf_torque", in.sizing.sf_torque},
                       {"sf_speed", in.sizing.sf_speed},
                       {"max_round2_iterations", in.sizing.max_round2_iterations}}},
                     {"gate", {{"min_correlation", in.gate.min_correlation}, {"max_rmse_Nm", in.gate.max_rmse}}},
                     {"catalog_hash", hex64(fnv1a(sizing::catalog_to_json(in.catalog).dump()))},
                     {"status", r.complete ? "complete" : "partial"}};
  if (!r.complete) {
    out["failed_stage"] = r.failed_stage;
    out["error"] = r.error;
  }
  if (r.pro) {
    out["diagnostics"] = {{"max_kkt_residual", r.diagnostics.max_kkt_residual},
                          {"max_relative_kkt_residual", r.diagnostics.max_relative_kkt_residual},
                          {"max_closure_residual", r.diagnostics.max_closure_residual}};
  }
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [kind, file] : artifact_files()) {
    const auto it = r.artifacts.find(kind);
    if (it == r.artifacts.end()) continue;
    files.push_back({{"kind", kind}, {"file", file}, {"fnv1a", hex64(fnv1a(it->second))}});
  }
  out["artifacts"] = files;
  return out;
}

inline nlohmann::json sizing_report_json(const PipelineResult& r, const std::vector<std::string>& joints,
                                         const sizing::SizingConfig& cfg, const analysis::GateThresholds& gate) {
  nlohmann::json out;
  out["config"] = {{"sf_torque", cfg.sf_torque},
                   {"sf_speed", cfg.sf_speed},
                   {"max_round2_iterations", cfg.max_round2_iterations}};
  if (r.round1) {
    out["requirements"] = sizing::requirements_to_json(r.round1->requirements, joints);
    out["round1"] = sizing::selection_to_json(*r.round1);
  }
  if (r.round2) {
    out["round2"] = sizing::selection_to_json(*r.round2);
    out["iterations"] = r.round2->iterations;
    nlohmann::json changed = nlohmann::json::array();
    for (const auto& j : r.round2->joints) {
      if (j.changed) changed.push_back(j.joint);
    }
    out["changed_joints"] = changed;
  }
  if (r.metrics) {
    out["metrics"] = analysis::metrics_to_json(*r.metrics);
    out["agreement"] = analysis::gate_to_json(analysis::agreement_gate(*r.metrics, gate));
  }
  if (r.metrics_motor) out["metrics_motor"] = analysis::metrics_to_json(*r.metrics_motor);
  return out;
}

/// Motor-side DEMO/PRO metrics through the round-1 pairs; joints without a
/// feasible pair are left out.
inline analysis::ComparisonMetrics motor_side_metrics(const std::vector<sizing::JointDemand>& demo,
                                                      const std::vector<sizing::JointDemand>& pro,
                                                      const sizing::Selection& sel,
                                                      const sizing::ActuatorCatalog& catalog) {
  analysis::ComparisonMetrics out;
  out.side = "motor";
  for (std::size_t j = 0; j < sel.joints.size(); ++j) {
    const auto& js = sel.joints[j];
    if (!js.feasible) continue;
    const auto& m = catalog.motor(js.motor);
    const auto& g = catalog.gearbox(js.gearbox);
    out.joints.push_back(
        analysis::compare_traces(sizing::motor_side_trace(demo[j], g, m), sizing::motor_side_trace(pro[j], g, m), js.joint));
  }
  return out;
}

inline PipelineResult run_pipeline(const PipelineInputs& in, const ProgressFn& progress = {}) {
  validate_inputs(in);
  PipelineResult r;
  const auto& stages = pipeline_stages();
  std::string stage;
  auto enter = [&](const std::string& s) {
    stage = s;
    if (progress) {
      const auto idx = std::find(stages.begin(), stages.end(), s) - stages.begin();
      progress(s, static_cast<double>(idx) / static_cast<double>(stages.size()));
    }
  };
  std::vector<std::string> joints;
  try {
    enter("model");
    r.model = model::build_scenario_model(in.robot, in.scenario);
    const auto& model = *r.model;
    joints = joint_names(model);

    enter("trajectory");
    r.trajectory = trajectory::compile_program(model, in.program);
    const auto& tr = *r.trajectory;
    r.artifacts["trajectory"] = trajectory::trajectory_to_csv(tr);
    r.artifacts["trajectory_meta"] = trajectory::trajectory_sidecar(model, tr, in.program).dump(2) + "\n";

    enter("pro");
    dynamics::ProfileOptions popt;
    popt.gravity = in.scenario.gravity;
    popt.kkt = in.kkt;
    popt.workers = in.workers;
    r.pro = dynamics::pro_profile(model, tr, popt, &r.diagnostics);
    r.artifacts["torque_pro"] = dynamics::torque_to_csv(*r.pro);

    enter("demo");
    if (model.m() > 0) {
      r.demo = dynamics::demo_profile(dynamics::lump_serial_model(model), tr, in.scenario.gravity);
    } else {
      // Open chains have no surrogate: both paths are the same rigid-body ID.
      r.demo = dynamics::TorqueProfile{tr.t, r.pro->tau, dynamics::TorquePath::kDemo, std::nullopt};
    }
    r.artifacts["torque_demo"] = dynamics::torque_to_csv(*r.demo);

    enter("compare");
    r.metrics = analysis::compare_profiles(*r.demo, *r.pro, joints);
    r.artifacts["metrics"] = analysis::metrics_to_csv(*r.metrics);
    r.artifacts["plots"] = analysis::plot_data(*r.demo, *r.pro, joints).dump() + "\n";

    enter("round1");
    const auto pro_demands = sizing::make_demands(model, *r.pro, tr, in.scenario);
    r.round1 = sizing::select_round1(pro_demands, in.catalog, in.sizing);
    r.metrics_motor = motor_side_metrics(sizing::make_demands(model, *r.demo, tr, in.scenario), pro_demands,
                                         *r.round1, in.catalog);
    r.artifacts["metrics_motor"] = analysis::metrics_to_csv(*r.metrics_motor);
    if (!r.round1->feasible) {
      std::string msg;
      for (const auto& j : r.round1->joints) {
        if (!j.feasible) msg += (msg.empty() ? "" : "; ") + j.message;
      }
      throw Error(msg);
    }

    enter("round2");
    sizing::Round2Inputs r2{model, tr, in.scenario, popt};
    r.round2 = sizing::validate_round2(*r.round1, r2, in.catalog, in.sizing);
    if (!r.round2->feasible) {
      std::string msg;
      for (const auto& j : r.round2->joints) {
        if (!j.feasible) msg += (msg.empty() ? "" : "; ") + j.message;
      }
      throw Error(msg);
    }

    enter("export");
    r.complete = true;
  } catch (const std::exception& e) {
    r.complete = false;
    r.failed_stage = stage;
    r.error = e.what();
  }
  if (r.model && (r.round1 || r.metrics)) {
    r.artifacts["sizing"] = sizing_report_json(r, joints, in.sizing, in.gate).dump(2) + "\n";
  }
  r.artifacts["manifest"] = manifest_json(in, r).dump(2) + "\n";
  if (progress && r.complete) progress("done", 1.0);
  return r;
}

/// Two-round sizing from an existing trajectory and PRO torque profile.
/// Infeasibility is reported in the selections, not thrown.
inline PipelineResult size_profile(model::RobotKind robot, const model::ScenarioConfig& scenario,
                                   const trajectory::TrajectorySamples& tr, const dynamics::TorqueProfile& pro,
                                   const sizing::ActuatorCatalog& catalog, const sizing::SizingConfig& cfg) {
  sizing::validate_catalog(catalog);
  sizing::validate_config(cfg);
  PipelineResult r;
  r.model = model::build_scenario_model(robot, scenario);
  require(pro.tau.cols() == r.model->n_a(), "torque profile has " + std::to_string(pro.tau.cols()) +
                                                 " joints, model has " + std::to_string(r.model->n_a()));
  r.trajectory = tr;
  r.pro = pro;
  r.round1 = sizing::select_round1(sizing::make_demands(*r.model, pro, tr, scenario), catalog, cfg);
  if (r.round1->feasible) {
    dynamics::ProfileOptions popt;
    popt.gravity = scenario.gravity;
    r.round2 = sizing::validate_round2(*r.round1, {*r.model, tr, scenario, popt}, catalog, cfg);
  }
  r.complete = r.round2 && r.round2->feasible;
  return r;
}

/// Writes the artifacts present in `r` into `dir`; returns their kinds.
inline std::vector<std::string> write_run_directory(const std::filesystem::path& dir, const PipelineResult& r) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  for (const auto& [kind, file] : artifact_files()) {
    const auto it = r.artifacts.find(kind);
    if (it == r.artifacts.end()) continue;
    write_text_file(dir / file, it->second);
    written.push_back(kind);
  }
  return written;
}

}  // namespace armsizer::service
