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

#pragma once

#include <armsizer/model/builders.hpp>
#include <armsizer/model/serialize.hpp>

namespace armsizer::model {

enum class RobotKind { kCR4, kCR6 };

inline std::string to_string(RobotKind k) { return k == RobotKind::kCR4 ? "CR4" : "CR6"; }

inline RobotKind robot_kind_from_string(const std::string& s) {
  if (s == "CR4" || s == "cr4") return RobotKind::kCR4;
  if (s == "CR6" || s == "cr6") return RobotKind::kCR6;
  throw InvalidArgument("unknown robot kind '" + s + "'");
}

/// Everything applied on top of the reference geometry for one study.
/// `friction` and `rotor_reflection` are per actuated joint; empty means
/// all zeros.
struct ScenarioConfig {
  double scale = 1.0;
  ScalingLaw scaling_law = ScalingLaw::geometric();
  PayloadSpec payload;
  std::vector<FrictionParams> friction;
  std::vector<double> rotor_reflection;  // kg*m^2, joint side
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
};

inline std::vector<std::string> validate_scenario(const ScenarioConfig& sc) {
  std::vector<std::string> issues;
  if (!(sc.scale > 0.0) || !std::isfinite(sc.scale)) issues.push_back("scale must be positive");
  if (!(sc.payload.mass >= 0.0)) issues.push_back("payload mass must be >= 0");
  for (const auto& f : sc.friction) {
    if (!(f.viscous >= 0.0) || !(f.coulomb >= 0.0)) issues.push_back("friction coefficients must be >= 0");
  }
  for (double r : sc.rotor_reflection) {
    if (!(r >= 0.0)) issues.push_back("rotor reflection must be >= 0");
  }
  if (!sc.gravity.allFinite()) issues.push_back("gravity must be finite");
  const auto& law = sc.scaling_law;
  if (!std::isfinite(law.mass_exponent) || !std::isfinite(law.inertia_exponent) ||
      law.mass_exponent > law.inertia_exponent) {
    issues.push_back("scaling law exponents must be finite with mass <= inertia exponent");
  }
  return issues;
}

/// Builds, scales and loads the model a scenario describes.
inline RigidBodyModel build_scenario_model(RobotKind kind, const ScenarioConfig& sc) {
  const auto issues = validate_scenario(sc);
  if (!issues.empty()) throw InvalidArgument("invalid scenario: " + issues.front());
  RigidBodyModel m = kind == RobotKind::kCR4 ? build_cr4(sc.scale, sc.scaling_law)
                                             : build_cr6(sc.scale, sc.scaling_law);
  const auto n_a = static_cast<std::size_t>(m.n_a());
  require(sc.friction.empty() || sc.friction.size() == n_a, "friction needs one entry per actuated joint");
  require(sc.rotor_reflection.empty() || sc.rotor_reflection.size() == n_a,
          "rotor_reflection needs one entry per actuated joint");
  return attach_payload(m, sc.payload);
}

inline nlohmann::json scenario_to_json(const ScenarioConfig& sc) {
  using json_detail::mat;
  using json_detail::vec;
  nlohmann::json friction = nlohmann::json::array();
  for (const auto& f : sc.friction) friction.push_back({{"viscous", f.viscous}, {"coulomb", f.coulomb}});
  return {{"scale", sc.scale},
          {"scaling_law", scaling_law_to_json(sc.scaling_law)},
          {"payload", {{"mass", sc.payload.mass}, {"com", vec(sc.payload.com_offset)}, {"inertia", mat(sc.payload.inertia)}}},
          {"friction", friction},
          {"rotor_reflection", sc.rotor_reflection},
          {"gravity", vec(sc.gravity)}};
}

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  using json_detail::to_mat3;
  using json_detail::to_vec3;
  try {
    ScenarioConfig sc;
    sc.scale = j.at("scale").get<double>();
    if (j.contains("scaling_law")) sc.scaling_law = scaling_law_from_json(j.at("scaling_law"));
    if (j.contains("payload")) {
      const auto& p = j.at("payload");
      sc.payload.mass = p.at("mass").get<double>();
      sc.payload.com_offset = to_vec3(p.at("com"));
      const auto& in = p.at("inertia");
      // Either a full 3x3 matrix or a diagonal 3-vector.
      if (in.size() == 3 && in[0].is_number()) {
        sc.payload.inertia = to_vec3(in).asDiagonal();
      } else {
        sc.payload.inertia = to_mat3(in);
      }
    }
    for (const auto& f : j.value("friction", nlohmann::json::array())) {
      sc.friction.push_back(FrictionParams{f.at("viscous").get<double>(), f.at("coulomb").get<double>()});
    }
    sc.rotor_reflection = j.value("rotor_reflection", std::vector<double>{});
    if (j.contains("gravity")) sc.gravity = to_vec3(j.at("gravity"));
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("scenario document: ") + e.what());
  }
}

/// The palletizing benchmark scenario: s = 1.6, calibrated exponents,
/// 10 kg payload hanging 0.1 m below the tool.
inline ScenarioConfig benchmark_scenario() {
  ScenarioConfig sc;
  sc.scale = 1.6;
  sc.scaling_law = ScalingLaw::calibrated();
  sc.payload.mass = 10.0;
  sc.payload.com_offset = Vec3(0.0, 0.0, 0.1);
  sc.payload.inertia = Vec3(0.0547, 0.0963, 0.1083).asDiagonal();
  sc.friction = std::vector<FrictionParams>(4, FrictionParams{2.0e-4, 0.02});
  sc.rotor_reflection = std::vector<double>(4, 0.0);
  return sc;
}

}  // namespace armsizer::model
