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

#include <armsizer/model/operations.hpp>
#include <armsizer/model/reference_geometry.hpp>

namespace armsizer::model {

namespace detail {

inline Transform translation(double x, double y, double z) {
  Transform t = Transform::Identity();
  t.translation() = Vec3(x, y, z);
  return t;
}

inline JointSpec revolute(std::string name, std::string parent, std::string child, Vec3 axis,
                          Transform origin, JointRole role, double lower, double upper,
                          double velocity_limit) {
  JointSpec j;
  j.name = std::move(name);
  j.kind = JointKind::kRevolute;
  j.axis = axis;
  j.parent_link = std::move(parent);
  j.child_link = std::move(child);
  j.role = role;
  j.lower = lower;
  j.upper = upper;
  j.velocity_limit = velocity_limit;
  j.origin = origin;
  return j;
}

inline Link rod(std::string name, double mass, double length, double radius, int axis,
                const Vec3& com) {
  return Link{std::move(name), LinkInertia{mass, com, rod_inertia(mass, length, radius, axis)}};
}

}  // namespace detail

/// CR4 palletizer at unit scale.
///
/// Tree: base -J1(yaw)-> turret -J2(pitch)-> upper_arm -elbow-> forearm
/// -J4(yaw)-> wrist, plus turret -J3(pitch, coaxial with J2)-> crank
/// -crank_pin-> coupler. The closure pins the coupler tip to the forearm
/// rear extension in the arm plane (x, z of the forearm pin frame), which
/// makes crank, forearm rear, coupler and upper arm a parallelogram: the
/// forearm pitch equals q3 regardless of q2.
///
/// Zero pose: upper arm vertical, forearm horizontal along +x, tool z
/// pointing down. Positive q2 leans the upper arm forward, positive q3
/// pitches the forearm down.
inline RigidBodyModel cr4_reference() {
  namespace g = geometry::cr4;
  using detail::revolute;
  using detail::rod;
  using detail::translation;
  const double forearm_length = g::kForearm + g::kOffsetLink;

  RigidBodyModel m;
  m.kind = "cr4";
  m.links = {
      Link{"base", {}},
      rod("turret", g::kTurretMass, g::kColumnHeight, g::kTurretRadius, 2,
          Vec3(0, 0, 0.5 * g::kColumnHeight)),
      rod("upper_arm", g::kUpperArmMass, g::kUpperArm, g::kUpperArmRadius, 2,
          Vec3(0, 0, 0.5 * g::kUpperArm)),
      rod("crank", g::kCrankMass, g::kOffsetLink, g::kCrankRadius, 0,
          Vec3(-0.5 * g::kOffsetLink, 0, 0)),
      rod("forearm", g::kForearmMass, forearm_length, g::kForearmRadius, 0,
          Vec3(0.5 * (g::kForearm - g::kOffsetLink), 0, 0)),
      rod("coupler", g::kCouplerMass, g::kUpperArm, g::kCouplerRadius, 2,
          Vec3(0, 0, 0.5 * g::kUpperArm)),
      rod("wrist", g::kWristMass, g::kWristDrop, g::kWristRadius, 2,
          Vec3(0, 0, 0.5 * g::kWristDrop)),
  };
  m.links[0].inertia = LinkInertia{};

  Transform wrist_origin = translation(g::kForearm, 0, 0);
  wrist_origin.linear() << 1, 0, 0, 0, -1, 0, 0, 0, -1;  // R_x(pi), exact

  const auto act = JointRole::kActuated;
  const auto pas = JointRole::kPassive;
  m.joints = {
      revolute("J1", "base", "turret", Vec3::UnitZ(), Transform::Identity(), act, -g::kJ1Limit,
               g::kJ1Limit, g::kJ1VelocityLimit),
      revolute("J2", "turret", "upper_arm", Vec3::UnitY(), translation(0, 0, g::kColumnHeight),
               act, g::kJ2Lower, g::kJ2Upper, g::kJ2VelocityLimit),
      revolute("J3", "turret", "crank", Vec3::UnitY(), translation(0, 0, g::kColumnHeight), act,
               g::kJ3Lower, g::kJ3Upper, g::kJ3VelocityLimit),
      revolute("elbow", "upper_arm", "forearm", Vec3::UnitY(), translation(0, 0, g::kUpperArm),
               pas, -g::kPassiveLimit, g::kPassiveLimit, g::kPassiveVelocityLimit),
      revolute("crank_pin", "crank", "coupler", Vec3::UnitY(), translation(-g::kOffsetLink, 0, 0),
               pas, -g::kPassiveLimit, g::kPassiveLimit, g::kPassiveVelocityLimit),
      revolute("J4", "forearm", "wrist", Vec3::UnitZ(), wrist_origin, act, -g::kJ4Limit,
               g::kJ4Limit, g::kJ4VelocityLimit),
  };
  m.frames = {
      FrameSpec{"tool", "wrist", Transform::Identity()},
      FrameSpec{"forearm_pin", "forearm", translation(-g::kOffsetLink, 0, 0)},
      FrameSpec{"coupler_tip", "coupler", translation(0, 0, g::kUpperArm)},
  };
  m.closures = {LoopClosureSpec{"forearm_pin", "coupler_tip", {Dof::kX, Dof::kZ}}};
  m.tool_frame = "tool";
  m.finalize();
  m.reference_q = VecX::Zero(m.n());
  return m;
}

/// Serial 6R arm at unit scale: yaw, shoulder pitch, elbow pitch, forearm
/// roll, wrist pitch, flange roll. Zero pose: upper arm vertical, forearm
/// along +x, tool z along +x.
inline RigidBodyModel cr6_reference() {
  namespace g = geometry::cr6;
  using detail::revolute;
  using detail::rod;
  using detail::translation;
  const auto act = JointRole::kActuated;

  RigidBodyModel m;
  m.kind = "cr6";
  m.links = {
      Link{"base", {}},
      rod("link1", g::kMasses[0], g::kColumnHeight, g::kRadius, 2, Vec3(0, 0, 0.5 * g::kColumnHeight)),
      rod("link2", g::kMasses[1], g::kUpperArm, g::kRadius, 2, Vec3(0, 0, 0.5 * g::kUpperArm)),
      rod("link3", g::kMasses[2], g::kForearmInner, g::kRadius, 0, Vec3(0.5 * g::kForearmInner, 0, 0)),
      rod("link4", g::kMasses[3], g::kForearmOuter, g::kRadius, 0, Vec3(0.5 * g::kForearmOuter, 0, 0)),
      rod("link5", g::kMasses[4], g::kWristOffset, g::kRadius, 0, Vec3(0.5 * g::kWristOffset, 0, 0)),
      rod("link6", g::kMasses[5], g::kFlange, g::kRadius, 0, Vec3(0.5 * g::kFlange, 0, 0)),
  };
  const Vec3 axes[6] = {Vec3::UnitZ(), Vec3::UnitY(), Vec3::UnitY(),
                        Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitX()};
  const Transform origins[6] = {Transform::Identity(), translation(0, 0, g::kColumnHeight),
                                translation(0, 0, g::kUpperArm), translation(g::kForearmInner, 0, 0),
                                translation(g::kForearmOuter, 0, 0), translation(g::kWristOffset, 0, 0)};
  for (int i = 0; i < 6; ++i) {
    m.joints.push_back(revolute("J" + std::to_string(i + 1), m.links[static_cast<std::size_t>(i)].name,
                                m.links[static_cast<std::size_t>(i + 1)].name, axes[i], origins[i],
                                act, -g::kLimit, g::kLimit, g::kVelocityLimits[i]));
  }
  Transform tool = translation(g::kFlange, 0, 0);
  tool.linear() << 0, 0, 1, 0, 1, 0, -1, 0, 0;  // R_y(pi/2): tool z along link x
  m.frames = {FrameSpec{"tool", "link6", tool}};
  m.tool_frame = "tool";
  m.finalize();
  m.reference_q = VecX::Zero(m.n());
  return m;
}

inline RigidBodyModel build_cr4(double scale, const ScalingLaw& law) {
  require(std::isfinite(scale) && scale > 0.0, "scale must be positive");
  return apply_scaling(cr4_reference(), scale, law);
}

inline RigidBodyModel build_cr6(double scale, const ScalingLaw& law) {
  require(std::isfinite(scale) && scale > 0.0, "scale must be positive");
  return apply_scaling(cr6_reference(), scale, law);
}

}  // namespace armsizer::model
