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

// Fast open-chain surrogate of the CR4 palletizer (the "DEMO" path).
//
// The parallelogram is replaced by a 5-joint serial chain: J1, J2, a
// serial elbow with relative coordinate q3' = q3 - q2, a fixed forearm
// joint, and J4. Crank and coupler mass is folded into the two arm links
// so that total mass and the first mass moment of each rotating group
// (bodies turning with q2 and bodies turning with q3) are preserved. That
// makes gravity torques identical to the closed-chain model at every
// static pose; only the second moments (inertial coupling) differ.

#pragma once

#include <armsizer/dynamics/rigid_body.hpp>
#include <armsizer/model/operations.hpp>

namespace armsizer::dynamics {

inline constexpr const char* kSerialKind = "cr4_serial";

/// q' = T q_a for the serial surrogate; only the elbow row differs.
inline VecX to_serial_coordinates(const VecX& q_a) {
  require(q_a.size() == 4, "CR4 has four actuated joints");
  VecX out = q_a;
  out(2) = q_a(2) - q_a(1);
  return out;
}

/// tau_a = T^T tau' (virtual work).
inline VecX from_serial_torques(const VecX& tau_serial) {
  VecX out = tau_serial;
  out(1) = tau_serial(1) - tau_serial(2);
  return out;
}

inline model::RigidBodyModel lump_serial_model(const model::RigidBodyModel& cr4) {
  using model::LinkInertia;
  using model::point_mass_inertia;
  const char* required_links[] = {"turret", "upper_arm", "crank", "forearm", "coupler", "wrist"};
  const char* required_joints[] = {"J1", "J2", "J3", "J4", "elbow", "crank_pin"};
  bool ok = cr4.kind == "cr4" && cr4.closures.size() == 1 && cr4.n_a() == 4 && cr4.n_p() == 2;
  for (const char* l : required_links) ok = ok && cr4.find_link(l).has_value();
  for (const char* j : required_joints) ok = ok && cr4.find_joint(j).has_value();
  if (!ok) throw InvalidArgument("lump_serial_model expects a CR4 parallelogram model");

  auto link = [&](const char* name) { return cr4.links[static_cast<std::size_t>(*cr4.find_link(name))]; };
  auto joint = [&](const char* name) { return cr4.joints[static_cast<std::size_t>(*cr4.find_joint(name))]; };

  const LinkInertia upper = link("upper_arm").inertia;
  const LinkInertia crank = link("crank").inertia;
  const LinkInertia forearm = link("forearm").inertia;
  const LinkInertia coupler = link("coupler").inertia;
  const Transform pin = joint("crank_pin").origin;  // crank frame -> coupler frame at q = 0

  // Everything that turns with q3 goes to the forearm: the forearm itself,
  // the crank, and the coupler mass concentrated at the crank pin. The
  // upper arm keeps its own mass plus the coupler's rotational inertia, and
  // its COM is moved so the total first moment about the shoulder matches.
  // At q = 0 crank/forearm frames are aligned, as are upper-arm/coupler.
  const Vec3 elbow_offset = joint("elbow").origin.translation();
  const Vec3 pin_offset = pin.translation();
  require(upper.mass > 0.0, "upper arm must carry mass");

  LinkInertia forearm_lumped;
  forearm_lumped.mass = forearm.mass + crank.mass + coupler.mass;
  forearm_lumped.com =
      (forearm.mass * forearm.com + crank.mass * crank.com + coupler.mass * pin_offset) / forearm_lumped.mass;
  forearm_lumped.inertia = forearm.inertia + point_mass_inertia(forearm.mass, forearm.com - forearm_lumped.com) +
                           crank.inertia + point_mass_inertia(crank.mass, crank.com - forearm_lumped.com) +
                           point_mass_inertia(coupler.mass, pin_offset - forearm_lumped.com);

  LinkInertia upper_lumped;
  upper_lumped.mass = upper.mass;
  upper_lumped.com = (upper.mass * upper.com + coupler.mass * (pin.linear() * coupler.com) -
                      (crank.mass + coupler.mass) * elbow_offset) /
                     upper.mass;
  upper_lumped.inertia = upper.inertia + pin.linear() * coupler.inertia * pin.linear().transpose();

  model::RigidBodyModel s;
  s.kind = kSerialKind;
  s.links = {link("base"), link("turret"), model::Link{"upper_arm", upper_lumped},
             model::Link{"elbow_link", LinkInertia{}}, model::Link{"forearm", forearm_lumped}, link("wrist")};

  auto j1 = joint("J1");
  auto j2 = joint("J2");
  auto j3 = joint("J3");
  auto elbow = joint("elbow");
  auto j4 = joint("J4");
  model::JointSpec j3s = elbow;
  j3s.name = "J3";
  j3s.role = model::JointRole::kActuated;
  j3s.child_link = "elbow_link";
  j3s.lower = j3.lower - j2.upper;
  j3s.upper = j3.upper - j2.lower;
  j3s.velocity_limit = j3.velocity_limit + j2.velocity_limit;
  model::JointSpec fixed;
  fixed.name = "forearm_fixed";
  fixed.kind = model::JointKind::kFixed;
  fixed.parent_link = "elbow_link";
  fixed.child_link = "forearm";
  fixed.role = model::JointRole::kPassive;
  s.joints = {j1, j2, j3s, fixed, j4};
  for (const auto& f : cr4.frames) {
    if (f.link == "wrist" || f.link == "forearm" || f.link == "upper_arm" || f.link == "turret") s.frames.push_back(f);
  }
  s.tool_frame = cr4.tool_frame;
  s.scale = cr4.scale;
  s.scaling_law = cr4.scaling_law;
  s.finalize();
  s.reference_q = to_serial_coordinates(VecX(cr4.reference_q.head(4)));
  return s;
}

/// Actuated-joint torques of the serial surrogate, mapped back to the CR4
/// actuated coordinates.
inline VecX demo_inverse_dynamics(const model::RigidBodyModel& serial, const VecX& q_a, const VecX& qd_a,
                                  const VecX& qdd_a, const Vec3& gravity = kStandardGravity) {
  require(serial.kind == kSerialKind, "demo_inverse_dynamics expects a lumped serial model");
  require(q_a.size() == 4 && qd_a.size() == 4 && qdd_a.size() == 4, "expected four actuated coordinates");
  return from_serial_torques(rnea(serial, to_serial_coordinates(q_a), to_serial_coordinates(qd_a),
                                  to_serial_coordinates(qdd_a), gravity));
}

}  // namespace armsizer::dynamics
