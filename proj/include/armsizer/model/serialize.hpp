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

// JSON encoding of models. Transforms are {translation: [x,y,z],
// quaternion: [w,x,y,z]}; all values SI.

#pragma once

#include <armsizer/model/types.hpp>

#include <nlohmann/json.hpp>

namespace armsizer::model {

inline constexpr int kModelFormatVersion = 1;

namespace json_detail {

using nlohmann::json;

inline json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec3 to_vec3(const json& j) {
  require(j.is_array() && j.size() == 3, "expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline json vecx(const VecX& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline VecX to_vecx(const json& j) {
  require(j.is_array(), "expected an array of numbers");
  VecX v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

inline json mat(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return rows;
}

inline Mat3 to_mat3(const json& j) {
  require(j.is_array() && j.size() == 3, "expected a 3x3 matrix");
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = to_vec3(j[static_cast<std::size_t>(r)]).transpose();
  return m;
}

inline json transform(const Transform& t) {
  const Eigen::Quaterniond q(t.rotation());
  return json{{"translation", vec(t.translation())},
              {"quaternion", json::array({q.w(), q.x(), q.y(), q.z()})}};
}

inline Transform to_transform(const json& j) {
  Transform t = Transform::Identity();
  t.translation() = to_vec3(j.at("translation"));
  const auto& q = j.at("quaternion");
  require(q.is_array() && q.size() == 4, "quaternion must have 4 entries (w,x,y,z)");
  Eigen::Quaterniond quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                          q[3].get<double>());
  require(std::abs(quat.norm() - 1.0) < 1e-9, "quaternion must be unit length");
  t.linear() = quat.normalized().toRotationMatrix();
  return t;
}

inline const char* dof_name(Dof d) {
  static constexpr const char* names[] = {"x", "y", "z", "rx", "ry", "rz"};
  return names[static_cast<int>(d)];
}

inline Dof to_dof(const std::string& s) {
  static constexpr const char* names[] = {"x", "y", "z", "rx", "ry", "rz"};
  for (int i = 0; i < 6; ++i) {
    if (s == names[i]) return static_cast<Dof>(i);
  }
  throw InvalidArgument("unknown constrained dof '" + s + "'");
}

}  // namespace json_detail

inline nlohmann::json scaling_law_to_json(const ScalingLaw& law) {
  return {{"length_exponent", law.length_exponent},
          {"mass_exponent", law.mass_exponent},
          {"inertia_exponent", law.inertia_exponent}};
}

inline ScalingLaw scaling_law_from_json(const nlohmann::json& j) {
  ScalingLaw law;
  law.length_exponent = j.value("length_exponent", 1.0);
  law.mass_exponent = j.at("mass_exponent").get<double>();
  law.inertia_exponent = j.at("inertia_exponent").get<double>();
  return law;
}

inline nlohmann::json model_to_json(const RigidBodyModel& model) {
  using namespace json_detail;
  json links = json::array();
  for (const auto& l : model.links) {
    links.push_back({{"name", l.name},
                     {"mass", l.inertia.mass},
                     {"com", vec(l.inertia.com)},
                     {"inertia", mat(l.inertia.inertia)}});
  }
  json joints = json::array();
  for (const auto& j : model.joints) {
    joints.push_back({{"name", j.name},
                      {"kind", j.kind == JointKind::kRevolute ? "revolute" : "fixed"},
                      {"axis", vec(j.axis)},
                      {"parent_link", j.parent_link},
                      {"child_link", j.child_link},
                      {"role", j.role == JointRole::kActuated ? "actuated" : "passive"},
                      {"position_limits", json::array({j.lower, j.upper})},
                      {"velocity_limit", j.velocity_limit},
                      {"origin", transform(j.origin)}});
  }
  json frames = json::array();
  for (const auto& f : model.frames) {
    frames.push_back({{"name", f.name}, {"link", f.link}, {"placement", transform(f.placement)}});
  }
  json closures = json::array();
  for (const auto& c : model.closures) {
    json dofs = json::array();
    for (Dof d : c.dofs) dofs.push_back(dof_name(d));
    closures.push_back({{"frame_a", c.frame_a}, {"frame_b", c.frame_b}, {"constrained_dofs", dofs}});
  }
  json reference = json::array();
  for (Eigen::Index i = 0; i < model.reference_q.size(); ++i) reference.push_back(model.reference_q(i));
  return json{{"version", kModelFormatVersion},
              {"kind", model.kind},
              {"links", links},
              {"joints", joints},
              {"frames", frames},
              {"closures", closures},
              {"tool_frame", model.tool_frame},
              {"reference_q", reference},
              {"meta", {{"scale", model.scale}, {"scaling_law", scaling_law_to_json(model.scaling_law)}}}};
}

inline RigidBodyModel model_from_json(const nlohmann::json& doc) {
  using namespace json_detail;
  try {
    require(doc.value("version", 0) == kModelFormatVersion, "unsupported model format version");
    RigidBodyModel m;
    m.kind = doc.value("kind", "custom");
    for (const auto& l : doc.at("links")) {
      m.links.push_back(Link{l.at("name").get<std::string>(),
                             LinkInertia{l.at("mass").get<double>(), to_vec3(l.at("com")),
                                         to_mat3(l.at("inertia"))}});
    }
    for (const auto& j : doc.at("joints")) {
      JointSpec s;
      s.name = j.at("name").get<std::string>();
      const auto kind = j.at("kind").get<std::string>();
      require(kind == "revolute" || kind == "fixed", "joint kind must be revolute or fixed");
      s.kind = kind == "revolute" ? JointKind::kRevolute : JointKind::kFixed;
      s.axis = to_vec3(j.at("axis"));
      s.parent_link = j.at("parent_link").get<std::string>();
      s.child_link = j.at("child_link").get<std::string>();
      const auto role = j.at("role").get<std::string>();
      require(role == "actuated" || role == "passive", "joint role must be actuated or passive");
      s.role = role == "actuated" ? JointRole::kActuated : JointRole::kPassive;
      const auto& lim = j.at("position_limits");
      s.lower = lim.at(0).get<double>();
      s.upper = lim.at(1).get<double>();
      s.velocity_limit = j.at("velocity_limit").get<double>();
      s.origin = to_transform(j.at("origin"));
      m.joints.push_back(std::move(s));
    }
    for (const auto& f : doc.value("frames", json::array())) {
      m.frames.push_back(FrameSpec{f.at("name").get<std::string>(), f.at("link").get<std::string>(),
                                   to_transform(f.at("placement"))});
    }
    for (const auto& c : doc.at("closures")) {
      LoopClosureSpec spec{c.at("frame_a").get<std::string>(), c.at("frame_b").get<std::string>(), {}};
      for (const auto& d : c.at("constrained_dofs")) spec.dofs.push_back(to_dof(d.get<std::string>()));
      m.closures.push_back(std::move(spec));
    }
    m.tool_frame = doc.at("tool_frame").get<std::string>();
    m.scale = doc.at("meta").at("scale").get<double>();
    m.scaling_law = scaling_law_from_json(doc.at("meta").at("scaling_law"));
    m.finalize();
    if (doc.contains("reference_q")) {
      const auto& r = doc.at("reference_q");
      require(static_cast<int>(r.size()) == m.n(), "reference_q has wrong length");
      for (int i = 0; i < m.n(); ++i) m.reference_q(i) = r.at(static_cast<std::size_t>(i)).get<double>();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("model document: ") + e.what());
  }
}

}  // namespace armsizer::model
