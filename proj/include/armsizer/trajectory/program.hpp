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

// Waypoint programs and their JSON form:
//
//   {"start_q": [...], "dt": 0.004, "sample_ds": 0.002,
//    "primitives": [
//      {"kind": "MoveJ", "target": {"kind": "joint", "q": [...]},
//       "vmax": [...], "amax": [...]},
//      {"kind": "MoveL", "target": {"kind": "cartesian",
//                                   "pose": {"translation": [...], "quaternion": [w,x,y,z]},
//                                   "relative": true},
//       "vmax": 0.5, "amax": 2.0}]}
//
// A relative Cartesian target is an offset applied to the tool pose at the
// start of the move (translation in world axes, rotation pre-multiplied).

#pragma once

#include <armsizer/model/serialize.hpp>

#include <nlohmann/json.hpp>

#include <vector>

namespace armsizer::trajectory {

enum class WaypointKind { kJoint, kCartesian };

struct Waypoint {
  WaypointKind kind = WaypointKind::kJoint;
  VecX joint_target;
  Transform pose_target = Transform::Identity();
  bool relative = false;

  static Waypoint joint(VecX q) { return {WaypointKind::kJoint, std::move(q), Transform::Identity(), false}; }
  static Waypoint cartesian(const Transform& pose, bool relative = false) {
    return {WaypointKind::kCartesian, VecX(), pose, relative};
  }
  static Waypoint offset(const Vec3& d) {
    Transform t = Transform::Identity();
    t.translation() = d;
    return cartesian(t, true);
  }
};

enum class MoveKind { kMoveJ, kMoveL };

/// vmax/amax hold one entry per actuated joint for MoveJ (rad/s, rad/s^2)
/// and a single path limit for MoveL (m/s, m/s^2).
struct MotionPrimitive {
  MoveKind kind = MoveKind::kMoveJ;
  Waypoint target;
  VecX vmax;
  VecX amax;
};

inline constexpr double kDefaultDt = 0.004;
inline constexpr double kDefaultSampleDs = 0.002;

struct Program {
  VecX start_q;
  std::vector<MotionPrimitive> primitives;
  double dt = kDefaultDt;
  double sample_ds = kDefaultSampleDs;
};

inline MotionPrimitive move_j(VecX target, VecX vmax, VecX amax) {
  return {MoveKind::kMoveJ, Waypoint::joint(std::move(target)), std::move(vmax), std::move(amax)};
}

inline MotionPrimitive move_l(Waypoint target, double vmax, double amax) {
  return {MoveKind::kMoveL, std::move(target), VecX::Constant(1, vmax), VecX::Constant(1, amax)};
}

inline const char* to_string(MoveKind k) { return k == MoveKind::kMoveJ ? "MoveJ" : "MoveL"; }

/// Structural checks that do not need a model.
inline void validate_primitive(const MotionPrimitive& p, int n_a) {
  const bool joint = p.target.kind == WaypointKind::kJoint;
  if (joint && p.target.joint_target.size() != n_a) {
    throw InvalidArgument("joint target must have " + std::to_string(n_a) + " entries");
  }
  if (joint && !p.target.joint_target.allFinite()) throw InvalidArgument("joint target must be finite");
  if (p.kind == MoveKind::kMoveJ) {
    if (!joint) throw InvalidArgument("MoveJ needs a joint target");
    if (p.vmax.size() != n_a || p.amax.size() != n_a) {
      throw InvalidArgument("MoveJ limits must have one entry per actuated joint");
    }
  } else if (p.vmax.size() != 1 || p.amax.size() != 1) {
    throw InvalidArgument("MoveL limits are a single path speed and acceleration");
  }
  if (!(p.vmax.array() > 0.0).all() || !(p.amax.array() > 0.0).all() || !p.vmax.allFinite() ||
      !p.amax.allFinite()) {
    throw InvalidArgument(std::string(to_string(p.kind)) + " limits must be positive and finite");
  }
}

inline void validate_program(const Program& program, int n_a) {
  if (program.start_q.size() != n_a) throw InvalidArgument("start_q must have " + std::to_string(n_a) + " entries");
  if (!(program.dt > 0.0) || !std::isfinite(program.dt)) throw InvalidArgument("dt must be positive");
  if (!(program.sample_ds > 0.0)) throw InvalidArgument("sample_ds must be positive");
  if (program.primitives.empty()) throw InvalidArgument("program has no primitives");
  for (std::size_t i = 0; i < program.primitives.size(); ++i) {
    try {
      validate_primitive(program.primitives[i], n_a);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("primitive " + std::to_string(i) + ": " + e.what());
    }
  }
}

inline nlohmann::json waypoint_to_json(const Waypoint& w) {
  using namespace model::json_detail;
  if (w.kind == WaypointKind::kJoint) return {{"kind", "joint"}, {"q", vecx(w.joint_target)}};
  return {{"kind", "cartesian"}, {"pose", transform(w.pose_target)}, {"relative", w.relative}};
}

inline Waypoint waypoint_from_json(const nlohmann::json& j) {
  using namespace model::json_detail;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "joint") return Waypoint::joint(to_vecx(j.at("q")));
  if (kind == "cartesian") return Waypoint::cartesian(to_transform(j.at("pose")), j.value("relative", false));
  throw InvalidArgument("unknown waypoint kind '" + kind + "'");
}

inline nlohmann::json program_to_json(const Program& p) {
  using namespace model::json_detail;
  nlohmann::json prims = nlohmann::json::array();
  for (const auto& m : p.primitives) {
    nlohmann::json e{{"kind", to_string(m.kind)}, {"target", waypoint_to_json(m.target)}};
    if (m.kind == MoveKind::kMoveJ) {
      e["vmax"] = vecx(m.vmax);
      e["amax"] = vecx(m.amax);
    } else {
      e["vmax"] = m.vmax(0);
      e["amax"] = m.amax(0);
    }
    prims.push_back(std::move(e));
  }
  return {{"start_q", vecx(p.start_q)}, {"dt", p.dt}, {"sample_ds", p.sample_ds}, {"primitives", prims}};
}

inline Program program_from_json(const nlohmann::json& j) {
  using namespace model::json_detail;
  try {
    Program p;
    p.start_q = to_vecx(j.at("start_q"));
    p.dt = j.value("dt", kDefaultDt);
    p.sample_ds = j.value("sample_ds", kDefaultSampleDs);
    std::size_t i = 0;
    for (const auto& e : j.at("primitives")) {
      MotionPrimitive m;
      const auto kind = e.at("kind").get<std::string>();
      if (kind == "MoveJ") {
        m.kind = MoveKind::kMoveJ;
      } else if (kind == "MoveL") {
        m.kind = MoveKind::kMoveL;
      } else {
        throw InvalidArgument("primitive " + std::to_string(i) + ": unknown kind '" + kind + "'");
      }
      m.target = waypoint_from_json(e.at("target"));
      m.vmax = e.at("vmax").is_array() ? to_vecx(e.at("vmax")) : VecX::Constant(1, e.at("vmax").get<double>());
      m.amax = e.at("amax").is_array() ? to_vecx(e.at("amax")) : VecX::Constant(1, e.at("amax").get<double>());
      p.primitives.push_back(std::move(m));
      ++i;
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed program: ") + e.what());
  }
}

}  // namespace armsizer::trajectory
