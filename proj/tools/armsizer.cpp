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

// armsizer command line.
//
//   armsizer simulate --out runs/bench [--program p.json] [--scenario s.json]
//   armsizer size --run runs/bench [--catalog c.json] [--out sizing.json]
//   armsizer compare --demo torque_demo.csv --pro torque_pro.csv [--out metrics.csv]
//   armsizer serve [--port 8080] [--runs-dir runs]
//
// Exit status: 0 success, 1 usage/validation error, 2 partial run or
// infeasible sizing, 3 agreement gate failed (compare --gate).

#include <armsizer/service/http_server.hpp>
#include <armsizer/trajectory/fixtures.hpp>

#include <CLI11.hpp>

#include <iostream>

#ifndef ARMSIZER_DATA_DIR
#define ARMSIZER_DATA_DIR "data"
#endif

namespace {

using namespace armsizer;
namespace fs = std::filesystem;

nlohmann::json read_json(const fs::path& p) {
  try {
    return nlohmann::json::parse(service::read_text_file(p));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(p.string() + ": " + e.what());
  }
}

sizing::ActuatorCatalog read_catalog(const std::string& path) {
  const fs::path p = path.empty() ? fs::path(ARMSIZER_DATA_DIR) / "catalog.json" : fs::path(path);
  return sizing::load_catalog(read_json(p));
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    service::write_text_file(out, text);
  }
}

struct SimulateArgs {
  std::string robot = "CR4";
  std::string scenario, program, catalog, out;
  double sf_torque = 1.5, sf_speed = 1.2;
  int workers = 1;
};

int simulate(const SimulateArgs& a) {
  service::PipelineInputs in;
  in.robot = model::robot_kind_from_string(a.robot);
  if (!a.scenario.empty()) {
    in.scenario = model::scenario_from_json(read_json(a.scenario));
  } else if (in.robot == model::RobotKind::kCR6) {
    in.scenario = model::ScenarioConfig{};
  }
  if (!a.program.empty()) {
    in.program = trajectory::program_from_json(read_json(a.program));
  } else {
    require(in.robot == model::RobotKind::kCR4, "--program is required for CR6");
    in.program = trajectory::fixtures::palletizing_program();
  }
  in.catalog = read_catalog(a.catalog);
  in.sizing.sf_torque = a.sf_torque;
  in.sizing.sf_speed = a.sf_speed;
  in.workers = a.workers;
  const auto r = service::run_pipeline(in, [](const std::string& stage, double f) {
    std::cerr << "[" << static_cast<int>(100.0 * f + 0.5) << "%] " << stage << "\n";
  });
  for (const auto& kind : service::write_run_directory(a.out, r)) {
    std::cerr << "wrote " << (fs::path(a.out) / service::artifact_file(kind)).string() << "\n";
  }
  if (!r.complete) {
    std::cerr << "partial run: stage " << r.failed_stage << ": " << r.error << "\n";
    return 2;
  }
  return 0;
}

struct SizeArgs {
  std::string run, trajectory, torque, scenario, robot, catalog, out = "-";
  double sf_torque = 1.5, sf_speed = 1.2;
};

int size(const SizeArgs& a) {
  const fs::path dir = a.run;
  nlohmann::json manifest;
  if (!a.run.empty() && fs::exists(dir / "manifest.json")) manifest = read_json(dir / "manifest.json");
  auto pick = [&](const std::string& explicit_path, const char* file) {
    if (!explicit_path.empty()) return fs::path(explicit_path);
    require(!a.run.empty(), std::string("need --run or an explicit path for ") + file);
    return dir / file;
  };

  std::string robot = a.robot;
  if (robot.empty()) robot = manifest.value("robot", std::string("CR4"));
  model::ScenarioConfig scenario;
  if (!a.scenario.empty()) {
    scenario = model::scenario_from_json(read_json(a.scenario));
  } else if (manifest.contains("scenario")) {
    scenario = model::scenario_from_json(manifest.at("scenario"));
  } else {
    scenario = model::benchmark_scenario();
  }

  const auto tr_path = pick(a.trajectory, "trajectory.csv");
  nlohmann::json sidecar;
  const auto meta = fs::path(tr_path).replace_extension(".json");
  if (fs::exists(meta)) sidecar = read_json(meta);
  const auto tr = trajectory::trajectory_from_csv(service::read_text_file(tr_path), sidecar.is_null() ? nullptr : &sidecar);
  const auto pro = dynamics::torque_from_csv(service::read_text_file(pick(a.torque, "torque_pro.csv")));

  sizing::SizingConfig cfg;
  cfg.sf_torque = a.sf_torque;
  cfg.sf_speed = a.sf_speed;
  const auto r = service::size_profile(model::robot_kind_from_string(robot), scenario, tr, pro, read_catalog(a.catalog), cfg);
  emit(a.out, service::sizing_report_json(r, service::joint_names(*r.model), cfg, {}).dump(2) + "\n");
  if (!r.complete) {
    std::cerr << "sizing infeasible\n";
    return 2;
  }
  return 0;
}

struct CompareArgs {
  std::string demo, pro, out = "-";
  double min_corr = 0.99, max_rmse = 5.0;
  bool gate = false;
};

int compare(const CompareArgs& a) {
  const auto demo = dynamics::torque_from_csv(service::read_text_file(a.demo), dynamics::TorquePath::kDemo);
  const auto pro = dynamics::torque_from_csv(service::read_text_file(a.pro));
  const auto m = analysis::compare_profiles(demo, pro);
  emit(a.out, analysis::metrics_to_csv(m));
  bool pass = true;
  for (const auto& g : analysis::agreement_gate(m, {a.min_corr, a.max_rmse})) {
    std::cerr << g.joint << ": " << (g.pass ? "pass" : "fail");
    for (const auto& r : g.reasons) std::cerr << " (" << r << ")";
    std::cerr << "\n";
    pass = pass && g.pass;
  }
  return a.gate && !pass ? 3 : 0;
}

struct ServeArgs {
  std::string host = "127.0.0.1", runs_dir = "runs", catalog;
  unsigned short port = 8080;
  int threads = 2, workers = 1;
};

int serve(const ServeArgs& a) {
  service::EngineOptions opt;
  opt.runs_dir = a.runs_dir;
  opt.catalog = read_catalog(a.catalog);
  opt.workers = a.workers;
  service::Engine engine(std::move(opt));
  service::HttpServer server(engine, a.host, a.port, a.threads);
  server.stop_on_signals();
  std::cerr << "listening on " << a.host << ":" << server.port() << ", runs in " << a.runs_dir << "\n";
  server.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"armsizer: closed-chain arm dynamics and actuator sizing"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "program + scenario -> run artifacts");
  s->add_option("--out", sim.out, "run directory")->required();
  s->add_option("--robot", sim.robot, "CR4 or CR6")->check(CLI::IsMember({"CR4", "CR6"}));
  s->add_option("--scenario", sim.scenario, "scenario JSON (default: benchmark)");
  s->add_option("--program", sim.program, "program JSON (default: bundled palletizing cycle)");
  s->add_option("--catalog", sim.catalog, "catalog JSON");
  s->add_option("--sf-torque", sim.sf_torque, "torque safety factor");
  s->add_option("--sf-speed", sim.sf_speed, "speed safety factor");
  s->add_option("--workers", sim.workers, "inverse-dynamics threads")->check(CLI::PositiveNumber);

  SizeArgs sz;
  auto* z = app.add_subcommand("size", "trajectory + PRO torque artifacts -> sizing report");
  z->add_option("--run", sz.run, "run directory with trajectory.csv, torque_pro.csv, manifest.json");
  z->add_option("--trajectory", sz.trajectory, "trajectory CSV");
  z->add_option("--torque", sz.torque, "PRO torque CSV");
  z->add_option("--scenario", sz.scenario, "scenario JSON (default: from the manifest)");
  z->add_option("--robot", sz.robot, "CR4 or CR6 (default: from the manifest)");
  z->add_option("--catalog", sz.catalog, "catalog JSON");
  z->add_option("--sf-torque", sz.sf_torque, "torque safety factor");
  z->add_option("--sf-speed", sz.sf_speed, "speed safety factor");
  z->add_option("--out", sz.out, "output file, - for stdout");

  CompareArgs cmp;
  auto* c = app.add_subcommand("compare", "two torque CSVs -> metrics CSV");
  c->add_option("--demo", cmp.demo, "DEMO torque CSV")->required();
  c->add_option("--pro", cmp.pro, "PRO torque CSV")->required();
  c->add_option("--out", cmp.out, "output file, - for stdout");
  c->add_option("--min-correlation", cmp.min_corr, "gate correlation threshold");
  c->add_option("--max-rmse", cmp.max_rmse, "gate RMSE threshold, N*m");
  c->add_flag("--gate", cmp.gate, "exit 3 when any joint fails the gate");

  ServeArgs srv;
  auto* v = app.add_subcommand("serve", "start the HTTP + WebSocket service");
  v->add_option("--host", srv.host, "bind address");
  v->add_option("--port", srv.port, "port, 0 picks a free one");
  v->add_option("--runs-dir", srv.runs_dir, "run directory root");
  v->add_option("--catalog", srv.catalog, "catalog JSON");
  v->add_option("--threads", srv.threads, "I/O threads")->check(CLI::PositiveNumber);
  v->add_option("--workers", srv.workers, "inverse-dynamics threads per run")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s) return simulate(sim);
    if (*z) return size(sz);
    if (*c) return compare(cmp);
    if (*v) return serve(srv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
