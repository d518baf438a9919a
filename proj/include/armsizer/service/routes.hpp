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

// HTTP request routing, independent of the transport.
//
//   POST /sessions                      {"robot": "CR4"|"CR6", "scenario": {...}}
//   GET  /sessions/{id}/state
//   POST /sessions/{id}/jog             {"mode": "joint", "axis": 0, "increment": 0.05}
//   PUT  /sessions/{id}/program         program document
//   PUT  /sessions/{id}/scenario        scenario document
//   POST /sessions/{id}/runs            {} or {"program": {...}}
//   GET  /sessions/{id}/results
//   GET  /runs/{id}
//   GET  /runs/{id}/artifacts/{kind}
//
// The event stream lives at WS /sessions/{id}/events.

#pragma once

#include <armsizer/service/engine.hpp>

namespace armsizer::service {

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

inline Response json_response(int status, const nlohmann::json& j) { return {status, "application/json", j.dump()}; }

inline Response error_response(int status, const std::string& kind, const std::string& message) {
  return json_response(status, {{"error", kind}, {"message", message}});
}

inline std::vector<std::string> split_path(const std::string& target) {
  std::string path = target.substr(0, target.find('?'));
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto end = path.find('/', start);
    const auto part = path.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!part.empty()) out.push_back(part);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

/// Session id when `target` is the event-stream path, empty otherwise.
inline std::string events_session(const std::string& target) {
  const auto p = split_path(target);
  return p.size() == 3 && p[0] == "sessions" && p[2] == "events" ? p[1] : std::string();
}

inline nlohmann::json parse_body(const std::string& body) {
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("request body is not JSON: ") + e.what());
  }
}

inline Response route(Engine& engine, const std::string& method, const std::string& target, const std::string& body) {
  const auto p = split_path(target);
  try {
    if (p.size() == 1 && p[0] == "sessions" && method == "POST") {
      const auto req = parse_body(body);
      const auto robot = model::robot_kind_from_string(req.value("robot", std::string("CR4")));
      const auto scenario =
          req.contains("scenario") ? model::scenario_from_json(req.at("scenario")) : model::ScenarioConfig{};
      const auto id = engine.create_session(robot, scenario);
      return json_response(201, {{"session", id}, {"state", engine.state(id)}});
    }
    if (p.size() == 3 && p[0] == "sessions") {
      const auto& id = p[1];
      const auto& what = p[2];
      if (what == "state" && method == "GET") return json_response(200, engine.state(id));
      if (what == "jog" && method == "POST") return json_response(200, engine.jog(id, jog_from_json(parse_body(body))));
      if (what == "program" && method == "PUT") {
        engine.put_program(id, trajectory::program_from_json(parse_body(body)));
        return json_response(200, engine.state(id));
      }
      if (what == "scenario" && method == "PUT") {
        engine.put_scenario(id, model::scenario_from_json(parse_body(body)));
        return json_response(200, engine.state(id));
      }
      if (what == "runs" && method == "POST") {
        const auto req = parse_body(body);
        std::optional<trajectory::Program> program;
        if (req.contains("program")) program = trajectory::program_from_json(req.at("program"));
        const auto run = engine.start_run(id, program);
        return json_response(202, engine.run_status(run));
      }
      if (what == "results" && method == "GET") return json_response(200, engine.results(id));
    }
    if (p.size() == 2 && p[0] == "runs" && method == "GET") return json_response(200, engine.run_status(p[1]));
    if (p.size() == 4 && p[0] == "runs" && p[2] == "artifacts" && method == "GET") {
      return {200, artifact_content_type(p[3]), engine.artifact(p[1], p[3])};
    }
    return error_response(404, "not_found", "no route for " + method + " " + target);
  } catch (const NotFound& e) {
    return error_response(404, "not_found", e.what());
  } catch (const InvalidArgument& e) {
    return error_response(400, "validation", e.what());
  } catch (const Error& e) {
    return error_response(422, "engine", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

}  // namespace armsizer::service
