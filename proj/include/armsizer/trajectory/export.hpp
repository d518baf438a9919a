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

// Trajectory CSV (`t,q1..,qd1..,qdd1..`) and its JSON sidecar (dt,
// joint limits, waypoint list, primitive boundaries).

#pragma once

#include <armsizer/csv.hpp>
#include <armsizer/trajectory/planner.hpp>

namespace armsizer::trajectory {

inline std::vector<std::string> trajectory_columns(int n_a) {
  std::vector<std::string> h{"t"};
  for (const char* p : {"q", "qd", "qdd"}) {
    for (auto& c : csv::numbered(p, n_a)) h.push_back(std::move(c));
  }
  return h;
}

inline std::string trajectory_to_csv(const TrajectorySamples& tr) {
  const int n = tr.n_a();
  MatX v(tr.size(), 1 + 3 * n);
  v << tr.t, tr.q_a, tr.qd_a, tr.qdd_a;
  return csv::write_table(trajectory_columns(n), v);
}

/// Reads the CSV back. dt and primitive boundaries come from the sidecar
/// when given; otherwise dt is the first time step.
inline TrajectorySamples trajectory_from_csv(const std::string& text, const nlohmann::json* sidecar = nullptr) {
  const auto table = csv::read_table(text, "trajectory.csv");
  const auto cols = static_cast<int>(table.header.size());
  require(cols >= 4 && (cols - 1) % 3 == 0, "trajectory.csv: unexpected column count");
  const int n = (cols - 1) / 3;
  if (table.header != trajectory_columns(n)) throw InvalidArgument("trajectory.csv: unexpected header");
  require(table.values.rows() > 0, "trajectory.csv: no samples");
  TrajectorySamples tr;
  tr.t = table.values.col(0);
  tr.q_a = table.values.middleCols(1, n);
  tr.qd_a = table.values.middleCols(1 + n, n);
  tr.qdd_a = table.values.middleCols(1 + 2 * n, n);
  if (sidecar) {
    tr.dt = sidecar->at("dt").get<double>();
    tr.primitive_boundaries = sidecar->value("primitive_boundaries", std::vector<int>{});
  } else if (tr.size() > 1) {
    tr.dt = tr.t(1) - tr.t(0);
  }
  return tr;
}

inline nlohmann::json trajectory_sidecar(const RigidBodyModel& model, const TrajectorySamples& tr, const Program& program) {
  using namespace model::json_detail;
  nlohmann::json limits = nlohmann::json::array();
  for (int k = 0; k < model.n_a(); ++k) {
    const auto& j = model.coordinate_joint(k);
    limits.push_back({{"joint", j.name}, {"lower", j.lower}, {"upper", j.upper}, {"velocity", j.velocity_limit}});
  }
  nlohmann::json waypoints = nlohmann::json::array();
  for (const auto& p : program.primitives) waypoints.push_back(waypoint_to_json(p.target));
  return {{"dt", tr.dt},
          {"sample_ds", program.sample_ds},
          {"samples", tr.size()},
          {"duration", tr.duration()},
          {"limits", limits},
          {"start_q", vecx(program.start_q)},
          {"waypoints", waypoints},
          {"program", program_to_json(program)},
          {"primitive_boundaries", tr.primitive_boundaries}};
}

}  // namespace armsizer::trajectory
