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

// Sessions, jogging, queued pipeline runs and the run directory.
//
// Each session owns one model and a worker thread that executes its runs
// one at a time in submission order. Runs are written to
// <runs_dir>/<run id>/ once they finish, partial runs included.

#pragma once

#include <armsizer/service/events.hpp>
#include <armsizer/service/pipeline.hpp>

#include <atomic>
#include <filesystem>
#include <thread>

namespace armsizer::service {

namespace fs = std::filesystem;

inline constexpr double kMaxJogAngle = 0.1;    // rad per command
inline constexpr double kMaxJogLength = 0.05;  // m per command
inline constexpr double kMaxJogRate = 50.0;    // Hz

struct JogCommand {
  enum class Mode { kJoint, kCartesian };
  Mode mode = Mode::kJoint;
  int axis = 0;                   // joint mode: actuated coordinate index
  Vec3 direction = Vec3::UnitZ();  // cartesian mode: world direction
  double increment = 0.0;         // rad or m, signed
  double rate_hz = 20.0;          // command rate the client streams at
};

inline JogCommand jog_from_json(const nlohmann::json& j) {
  try {
    JogCommand c;
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "joint") {
      c.mode = JogCommand::Mode::kJoint;
      c.axis = j.at("axis").get<int>();
    } else if (mode == "cartesian") {
      c.mode = JogCommand::Mode::kCartesian;
      c.direction = model::json_detail::to_vec3(j.at("direction"));
    } else {
      throw InvalidArgument("jog mode must be 'joint' or 'cartesian'");
    }
    c.increment = j.at("increment").get<double>();
    c.rate_hz = j.value("rate_hz", 20.0);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed jog command: ") + e.what());
  }
}

inline void validate_jog(const JogCommand& c, int n_a) {
  require(std::isfinite(c.increment), "jog increment must be finite");
  require(c.rate_hz > 0.0 && c.rate_hz <= kMaxJogRate, "jog rate must be in (0, 50] Hz");
  if (c.mode == JogCommand::Mode::kJoint) {
    require(c.axis >= 0 && c.axis < n_a, "jog axis out of range");
    require(std::abs(c.increment) <= kMaxJogAngle, "joint jog increment exceeds 0.1 rad");
  } else {
    require(c.direction.allFinite() && c.direction.norm() > 1e-12, "jog direction must be a nonzero vector");
    require(std::abs(c.increment) <= kMaxJogLength, "cartesian jog increment exceeds 0.05 m");
  }
}

struct EngineOptions {
  fs::path runs_dir = "runs";
  sizing::ActuatorCatalog catalog;
  sizing::SizingConfig sizing;
  analysis::GateThresholds gate;
  int workers = 1;
};

enum class RunStatus { kQueued, kRunning, kComplete, kPartial };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kQueued: return "queued";
    case RunStatus::kRunning: return "running";
    case RunStatus::kComplete: return "complete";
    case RunStatus::kPartial: return "partial";
  }
  return "?";
}

struct RunRecord {
  std::string id;
  std::string session;
  std::uint64_t generation = 0;
  PipelineInputs inputs;
  RunStatus status = RunStatus::kQueued;
  std::string stage;
  double fraction = 0.0;
  std::string failed_stage;
  std::string error;
  std::vector<std::string> artifacts;
  std::optional<nlohmann::json> summary;
};

class Engine;

class Session {
 public:
  std::string id;
  model::RobotKind robot = model::RobotKind::kCR4;
  EventBus events;

 private:
  friend class Engine;
  std::mutex mu;
  model::ScenarioConfig scenario;
  std::shared_ptr<const model::RigidBodyModel> model;
  VecX q;
  std::optional<trajectory::Program> program;
  std::uint64_t generation = 0;  // bumped by every model/scenario/program change
  std::string last_run;          // run whose results are current, if any

  std::mutex queue_mu;
  std::condition_variable queue_cv;
  std::deque<std::string> queue;
  bool stopping = false;
  std::thread worker;
};

class Engine {
 public:
  explicit Engine(EngineOptions opt) : opt_(std::move(opt)) {
    sizing::validate_catalog(opt_.catalog);
    fs::create_directories(opt_.runs_dir);
    for (const auto& e : fs::directory_iterator(opt_.runs_dir)) {
      const auto name = e.path().filename().string();
      if (e.is_directory() && name.starts_with("run-")) {
        try {
          next_run_ = std::max<std::uint64_t>(next_run_, std::stoull(name.substr(4)) + 1);
        } catch (const std::exception&) {
        }
      }
    }
  }

  ~Engine() {
    std::vector<std::shared_ptr<Session>> all;
    {
      std::lock_guard lock(mu_);
      for (auto& [id, s] : sessions_) all.push_back(s);
    }
    for (auto& s : all) {
      {
        std::lock_guard lock(s->queue_mu);
        s->stopping = true;
      }
      s->queue_cv.notify_all();
      if (s->worker.joinable()) s->worker.join();
      s->events.close_all();
    }
  }

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const EngineOptions& options() const { return opt_; }

  std::string create_session(model::RobotKind robot, const model::ScenarioConfig& scenario) {
    auto m = std::make_shared<const model::RigidBodyModel>(model::build_scenario_model(robot, scenario));
    auto s = std::make_shared<Session>();
    s->robot = robot;
    s->scenario = scenario;
    s->q = initial_configuration(*m);
    s->model = std::move(m);
    {
      std::lock_guard lock(mu_);
      s->id = "session-" + std::to_string(next_session_++);
      sessions_[s->id] = s;
    }
    s->worker = std::thread([this, s] { worker_loop(*s); });
    return s->id;
  }

  std::shared_ptr<Session> session(const std::string& id) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFound("unknown session '" + id + "'");
    return it->second;
  }

  nlohmann::json state(const std::string& id) const {
    auto s = session(id);
    std::lock_guard lock(s->mu);
    return state_json(*s);
  }

  std::shared_ptr<const model::RigidBodyModel> model_of(const std::string& id) const {
    auto s = session(id);
    std::lock_guard lock(s->mu);
    return s->model;
  }

  /// Applies one jog. On closure/IK failure the configuration is unchanged,
  /// an error event is published and the error rethrown.
  nlohmann::json jog(const std::string& id, const JogCommand& cmd) {
    auto s = session(id);
    std::lock_guard lock(s->mu);
    const auto& m = *s->model;
    validate_jog(cmd, m.n_a());
    try {
      bool clamped = false;
      VecX q = s->q;
      if (cmd.mode == JogCommand::Mode::kJoint) {
        VecX q_a = q.head(m.n_a());
        const auto& j = m.coordinate_joint(cmd.axis);
        const double target = q_a(cmd.axis) + cmd.increment;
        q_a(cmd.axis) = std::clamp(target, j.lower, j.upper);
        clamped = q_a(cmd.axis) != target;
        q = close_loops(m, q_a, q);
      } else {
        Transform target = kinematics::forward_kinematics(m, q, m.tool_frame);
        target.translation() += cmd.increment * cmd.direction.normalized();
        const auto ik = kinematics::solve_ik(m, q, target, m.tool_frame, kinematics::default_task_mask(m),
                                             kJogIkTolerance, 100);
        if (!ik.converged) {
          throw ConvergenceError("cartesian jog target not reachable (residual " + csv::format_number(ik.error) + " m)",
                                 ik.error);
        }
        for (int k = 0; k < m.n_a(); ++k) {
          const auto& j = m.coordinate_joint(k);
          if (ik.q(k) < j.lower || ik.q(k) > j.upper) {
            throw InvalidArgument("cartesian jog would leave the limits of " + j.name);
          }
        }
        q = ik.q;
      }
      s->q = q;
      auto st = state_json(*s);
      st["clamped"] = clamped;
      s->events.publish("state", st);
      return st;
    } catch (const Error& e) {
      s->events.publish("jog_error", {{"message", e.what()}, {"q_a", model::json_detail::vecx(s->q.head(m.n_a()))}});
      throw;
    }
  }

  void put_program(const std::string& id, const trajectory::Program& program) {
    auto s = session(id);
    std::lock_guard lock(s->mu);
    trajectory::validate_program(program, s->model->n_a());
    s->program = program;
    invalidate(*s, "program");
  }

  void put_scenario(const std::string& id, const model::ScenarioConfig& scenario) {
    auto s = session(id);
    auto m = std::make_shared<const model::RigidBodyModel>(model::build_scenario_model(s->robot, scenario));
    std::lock_guard lock(s->mu);
    s->scenario = scenario;
    s->model = std::move(m);
    s->q = initial_configuration(*s->model);
    invalidate(*s, "scenario");
    s->events.publish("state", state_json(*s));
  }

  /// Queues a run of `program` (or of the session program when absent).
  /// Input errors throw before any run id is allocated.
  std::string start_run(const std::string& id, const std::optional<trajectory::Program>& program = std::nullopt) {
    auto s = session(id);
    auto rec = std::make_shared<RunRecord>();
    {
      std::lock_guard lock(s->mu);
      if (program) {
        trajectory::validate_program(*program, s->model->n_a());
        s->program = *program;
        invalidate(*s, "program");
      }
      if (!s->program) throw InvalidArgument("session has no program");
      rec->inputs.robot = s->robot;
      rec->inputs.scenario = s->scenario;
      rec->inputs.program = *s->program;
      rec->inputs.catalog = opt_.catalog;
      rec->inputs.sizing = opt_.sizing;
      rec->inputs.gate = opt_.gate;
      rec->inputs.workers = opt_.workers;
      validate_inputs(rec->inputs);
      rec->generation = s->generation;
    }
    rec->session = id;
    {
      std::lock_guard lock(mu_);
      rec->id = run_id(next_run_++);
      runs_[rec->id] = rec;
    }
    s->events.publish("run_queued", {{"run", rec->id}});
    {
      std::lock_guard lock(s->queue_mu);
      s->queue.push_back(rec->id);
    }
    s->queue_cv.notify_all();
    return rec->id;
  }

  nlohmann::json run_status(const std::string& run) const {
    const auto rec = find_run(run);
    std::lock_guard lock(run_mu_);
    return run_json(*rec);
  }

  /// Blocks until the run leaves the queue and finishes.
  nlohmann::json wait_run(const std::string& run) const {
    const auto rec = find_run(run);
    std::unique_lock lock(run_mu_);
    run_cv_.wait(lock, [&] { return rec->status == RunStatus::kComplete || rec->status == RunStatus::kPartial; });
    return run_json(*rec);
  }

  /// Artifact document of a finished run, read from its run directory.
  std::string artifact(const std::string& run, const std::string& kind) const {
    const auto file = artifact_file(kind);
    const auto dir = opt_.runs_dir / run;
    {
      std::lock_guard lock(mu_);
      const auto it = runs_.find(run);
      if (it == runs_.end() && !fs::is_directory(dir)) throw NotFound("unknown run '" + run + "'");
    }
    if (!fs::exists(dir / file)) throw NotFound("run '" + run + "' has no " + kind + " artifact");
    return read_text_file(dir / file);
  }

  /// Current results of a session, or an invalidation marker.
  nlohmann::json results(const std::string& id) const {
    auto s = session(id);
    std::lock_guard lock(s->mu);
    if (s->last_run.empty()) return {{"valid", false}, {"marker", "invalidated"}, {"generation", s->generation}};
    const auto rec = find_run(s->last_run);
    std::lock_guard rl(run_mu_);
    auto out = run_json(*rec);
    out["valid"] = true;
    out["generation"] = s->generation;
    return out;
  }

  std::shared_ptr<Subscription> subscribe(const std::string& id, std::size_t capacity = EventBus::kDefaultCapacity) {
    return session(id)->events.subscribe(capacity);
  }

  static constexpr double kJogIkTolerance = 1e-9;

 private:
  static std::string run_id(std::uint64_t n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "run-%04llu", static_cast<unsigned long long>(n));
    return buf;
  }

  static VecX close_loops(const model::RigidBodyModel& m, const VecX& q_a, const VecX& q_prev) {
    if (m.n_p() == 0) return q_a;
    return kinematics::solve_closure(m, q_a, VecX(q_prev.tail(m.n_p())));
  }

  static VecX initial_configuration(const model::RigidBodyModel& m) {
    if (m.n_p() == 0) return m.reference_q;
    return kinematics::solve_closure(m, VecX(m.reference_q.head(m.n_a())));
  }

  static nlohmann::json state_json(const Session& s) {
    using model::json_detail::vec;
    using model::json_detail::vecx;
    const auto& m = *s.model;
    const Transform tool = kinematics::forward_kinematics(m, s.q, m.tool_frame);
    nlohmann::json joints = nlohmann::json::array();
    for (int k = 0; k < m.n_a(); ++k) joints.push_back(m.coordinate_joint(k).name);
    return {{"session", s.id},
            {"robot", model::to_string(s.robot)},
            {"joints", joints},
            {"q_a", vecx(s.q.head(m.n_a()))},
            {"q", vecx(s.q)},
            {"tool_position", vec(tool.translation())},
            {"reach", model::reach(m)},
            {"generation", s.generation},
            {"has_program", s.program.has_value()},
            {"results_valid", !s.last_run.empty()}};
  }

  void invalidate(Session& s, const std::string& cause) {
    ++s.generation;
    s.last_run.clear();
    s.events.publish("invalidated", {{"cause", cause}, {"generation", s.generation}});
  }

  std::shared_ptr<RunRecord> find_run(const std::string& run) const {
    std::lock_guard lock(mu_);
    const auto it = runs_.find(run);
    if (it == runs_.end()) throw NotFound("unknown run '" + run + "'");
    return it->second;
  }

  static nlohmann::json run_json(const RunRecord& r) {
    nlohmann::json out{{"run", r.id},
                       {"session", r.session},
                       {"status", to_string(r.status)},
                       {"stage", r.stage},
                       {"fraction", r.fraction},
                       {"artifacts", r.artifacts}};
    if (r.status == RunStatus::kPartial) {
      out["failed_stage"] = r.failed_stage;
      out["error"] = r.error;
    }
    if (r.summary) out["summary"] = *r.summary;
    return out;
  }

  void worker_loop(Session& s) {
    for (;;) {
      std::string run;
      {
        std::unique_lock lock(s.queue_mu);
        s.queue_cv.wait(lock, [&] { return s.stopping || !s.queue.empty(); });
        if (s.queue.empty()) return;
        run = s.queue.front();
        s.queue.pop_front();
      }
      execute(s, find_run(run));
    }
  }

  void execute(Session& s, const std::shared_ptr<RunRecord>& rec) {
    {
      std::lock_guard lock(run_mu_);
      rec->status = RunStatus::kRunning;
    }
    s.events.publish("run_started", {{"run", rec->id}});

    // Heartbeat so progress reaches subscribers at >= 5 Hz.
    std::atomic<bool> done{false};
    std::thread ticker([&] {
      while (!done.load()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
        if (done.load()) break;
        std::lock_guard lock(run_mu_);
        s.events.publish("progress", {{"run", rec->id}, {"stage", rec->stage}, {"fraction", rec->fraction}});
      }
    });
    PipelineResult result;
    try {
      result = run_pipeline(rec->inputs, [&](const std::string& stage, double fraction) {
        std::lock_guard lock(run_mu_);
        rec->stage = stage;
        rec->fraction = fraction;
        s.events.publish("progress", {{"run", rec->id}, {"stage", stage}, {"fraction", fraction}});
      });
    } catch (const std::exception& e) {
      result.complete = false;
      result.failed_stage = "validate";
      result.error = e.what();
    }
    done = true;
    ticker.join();

    std::vector<std::string> written;
    try {
      written = write_run_directory(opt_.runs_dir / rec->id, result);
    } catch (const Error& e) {
      result.complete = false;
      result.failed_stage = "export";
      result.error = e.what();
    }
    nlohmann::json summary;
    if (result.round2) {
      nlohmann::json changed = nlohmann::json::array();
      for (const auto& j : result.round2->joints) {
        if (j.changed) changed.push_back(j.joint);
      }
      summary["round2_iterations"] = result.round2->iterations;
      summary["changed_joints"] = changed;
    }
    if (result.pro) summary["max_relative_kkt_residual"] = result.diagnostics.max_relative_kkt_residual;
    {
      std::lock_guard lock(run_mu_);
      rec->status = result.complete ? RunStatus::kComplete : RunStatus::kPartial;
      rec->failed_stage = result.failed_stage;
      rec->error = result.error;
      rec->artifacts = written;
      rec->fraction = result.complete ? 1.0 : rec->fraction;
      if (!summary.is_null()) rec->summary = summary;
    }
    {
      std::lock_guard lock(s.mu);
      if (rec->generation == s.generation && result.complete) s.last_run = rec->id;
    }
    if (result.complete) {
      s.events.publish("run_completed", {{"run", rec->id}, {"artifacts", written}, {"summary", summary}});
    } else {
      s.events.publish("run_failed",
                       {{"run", rec->id}, {"stage", result.failed_stage}, {"error", result.error}, {"artifacts", written}});
    }
    run_cv_.notify_all();
  }

  EngineOptions opt_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::shared_ptr<RunRecord>> runs_;
  std::uint64_t next_session_ = 1;
  std::uint64_t next_run_ = 1;

  mutable std::mutex run_mu_;
  mutable std::condition_variable run_cv_;
};

}  // namespace armsizer::service
