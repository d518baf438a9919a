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

#include <armsizer/model/types.hpp>

#include <Eigen/Eigenvalues>

#include <span>
#include <sstream>

namespace armsizer::model {

/// Parallel-axis shift: inertia about a point displaced by d from the COM.
inline Mat3 point_mass_inertia(double mass, const Vec3& d) {
  return mass * (d.squaredNorm() * Mat3::Identity() - d * d.transpose());
}

/// Combines two bodies expressed in the same frame into one.
inline LinkInertia combine(const LinkInertia& a, const LinkInertia& b) {
  LinkInertia out;
  out.mass = a.mass + b.mass;
  if (out.mass > 0.0) {
    out.com = (a.mass * a.com + b.mass * b.com) / out.mass;
  } else {
    out.com = a.com;
  }
  out.inertia = a.inertia + point_mass_inertia(a.mass, a.com - out.com) + b.inertia +
                point_mass_inertia(b.mass, b.com - out.com);
  out.inertia = 0.5 * (out.inertia + out.inertia.transpose());
  return out;
}

/// Solid cylinder of length `length` along `axis` (0=x, 1=y, 2=z), COM at
/// its midpoint. Used for the slender-rod reference links.
inline Mat3 rod_inertia(double mass, double length, double radius, int axis) {
  const double axial = 0.5 * mass * radius * radius;
  const double transverse = mass * (3.0 * radius * radius + length * length) / 12.0;
  Mat3 inertia = Vec3::Constant(transverse).asDiagonal();
  inertia(axis, axis) = axial;
  return inertia;
}

/// Scales a unit-scale reference model: translations and COM offsets by s,
/// masses by s^alpha, inertia tensors by s^beta. Axes and limits are kept.
inline RigidBodyModel apply_scaling(const RigidBodyModel& reference, double s,
                                    const ScalingLaw& law) {
  require(std::isfinite(s) && s > 0.0, "scale must be positive");
  require(std::isfinite(law.mass_exponent) && std::isfinite(law.inertia_exponent) &&
              std::isfinite(law.length_exponent),
          "scaling exponents must be finite");
  require(law.mass_exponent <= law.inertia_exponent,
          "mass exponent must not exceed inertia exponent");
  const double length = std::pow(s, law.length_exponent);
  const double mass = std::pow(s, law.mass_exponent);
  const double inertia = std::pow(s, law.inertia_exponent);

  RigidBodyModel out = reference;
  for (auto& link : out.links) {
    link.inertia.mass *= mass;
    link.inertia.com *= length;
    link.inertia.inertia *= inertia;
  }
  for (auto& joint : out.joints) joint.origin.translation() *= length;
  for (auto& frame : out.frames) frame.placement.translation() *= length;
  out.scale = reference.scale * s;
  out.scaling_law = law;
  return out;
}

/// Adds a payload rigidly to the link carrying the tool frame.
inline RigidBodyModel attach_payload(const RigidBodyModel& model, const PayloadSpec& payload) {
  require(payload.mass >= 0.0 && std::isfinite(payload.mass), "payload mass must be >= 0");
  require((payload.inertia - payload.inertia.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
          "payload inertia must be symmetric");
  const auto tool = model.resolve_frame(model.tool_frame);
  if (!tool) throw NotFound("tool frame '" + model.tool_frame + "' does not exist");
  if (payload.mass == 0.0 && payload.inertia.isZero(0.0)) return model;

  const auto& [link_index, placement] = *tool;
  LinkInertia load;
  load.mass = payload.mass;
  load.com = placement * payload.com_offset;
  const Mat3 r = placement.rotation();
  load.inertia = r * payload.inertia * r.transpose();

  RigidBodyModel out = model;
  auto& target = out.links[static_cast<std::size_t>(link_index)].inertia;
  target = combine(target, load);
  return out;
}

/// Adds one point mass per actuated joint at the joint origin, carried by
/// the joint's parent link.
inline RigidBodyModel attach_actuator_masses(const RigidBodyModel& model,
                                             std::span<const double> masses) {
  require(static_cast<int>(masses.size()) == model.n_a(),
          "expected one actuator mass per actuated joint");
  RigidBodyModel out = model;
  for (int k = 0; k < model.n_a(); ++k) {
    const double m = masses[static_cast<std::size_t>(k)];
    require(m >= 0.0 && std::isfinite(m), "actuator masses must be >= 0");
    if (m == 0.0) continue;
    const int j = model.actuated_joint(k);
    const int parent = model.index.joint_parent[static_cast<std::size_t>(j)];
    LinkInertia point;
    point.mass = m;
    point.com = model.joints[static_cast<std::size_t>(j)].origin.translation();
    auto& target = out.links[static_cast<std::size_t>(parent)].inertia;
    target = combine(target, point);
  }
  return out;
}

/// Checks every structural and inertial invariant. Never throws; returns
/// one message per violation.
inline std::vector<std::string> validate_model(const RigidBodyModel& model) {
  std::vector<std::string> issues;
  auto add = [&](const std::string& s) { issues.push_back(s); };

  if (model.links.empty()) add("model has no links");
  for (const auto& link : model.links) {
    const auto& in = link.inertia;
    if (!(in.mass >= 0.0) || !std::isfinite(in.mass)) add("mass: link '" + link.name + "' has negative mass");
    if (!in.com.allFinite()) add("com: link '" + link.name + "' has non-finite COM");
    if ((in.inertia - in.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      add("inertia: link '" + link.name + "' inertia is not symmetric");
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(in.inertia);
    const Vec3 p = eig.eigenvalues();
    const double tol = 1e-12 * std::max(1.0, p.cwiseAbs().maxCoeff());
    if (p.minCoeff() < -tol) add("inertia: link '" + link.name + "' has a negative principal moment");
    if (p(0) + p(1) < p(2) - tol || p(0) + p(2) < p(1) - tol || p(1) + p(2) < p(0) - tol) {
      add("inertia: link '" + link.name + "' violates the triangle inequality");
    }
  }

  std::vector<int> parent_of(model.links.size(), -1);
  for (const auto& joint : model.joints) {
    const auto p = model.find_link(joint.parent_link);
    const auto c = model.find_link(joint.child_link);
    if (!p) add("joint: '" + joint.name + "' has unknown parent link '" + joint.parent_link + "'");
    if (!c) add("joint: '" + joint.name + "' has unknown child link '" + joint.child_link + "'");
    if (p && c) {
      if (*c == 0) add("joint: '" + joint.name + "' uses the base as child");
      else if (parent_of[*c] != -1) add("joint: link '" + joint.child_link + "' has two parents");
      else if (*p != 0 && parent_of[*p] == -1) add("joint: '" + joint.name + "' breaks topological order");
      if (*c != 0) parent_of[*c] = *p;
    }
    if (joint.kind == JointKind::kRevolute) {
      if (std::abs(joint.axis.norm() - 1.0) > 1e-12) add("axis: joint '" + joint.name + "' axis is not unit length");
      if (!(joint.lower <= joint.upper)) add("limits: joint '" + joint.name + "' has lower > upper");
      if (!(joint.velocity_limit > 0.0)) add("limits: joint '" + joint.name + "' velocity limit must be positive");
    }
  }
  for (std::size_t l = 1; l < model.links.size(); ++l) {
    if (parent_of[l] == -1) add("tree: link '" + model.links[l].name + "' is not connected to the base");
  }

  int m = 0;
  for (const auto& c : model.closures) {
    if (c.frame_a == c.frame_b) add("closure: frame_a equals frame_b ('" + c.frame_a + "')");
    if (!model.resolve_frame(c.frame_a)) add("closure: unknown frame '" + c.frame_a + "'");
    if (!model.resolve_frame(c.frame_b)) add("closure: unknown frame '" + c.frame_b + "'");
    if (c.dofs.empty()) add("closure: no constrained dofs");
    m += static_cast<int>(c.dofs.size());
  }
  int n_p = 0;
  int n_a = 0;
  for (const auto& j : model.joints) {
    if (j.kind != JointKind::kRevolute) continue;
    (j.role == JointRole::kPassive ? n_p : n_a)++;
  }
  if (model.kind == "cr4" && m != n_p) add("closure: CR4 closure is not square");
  if (model.index.n != n_a + n_p || model.index.n_a != n_a || model.index.n_p != n_p) {
    add("index: coordinate counts are stale (call finalize)");
  }
  if (!model.tool_frame.empty() && !model.resolve_frame(model.tool_frame)) {
    add("frame: tool frame '" + model.tool_frame + "' does not exist");
  }
  if (model.reference_q.size() != n_a + n_p) add("index: reference configuration has wrong size");
  return issues;
}

/// Fully stretched reach from the shoulder to the tool frame: the sum of
/// segment lengths along the tool's support path, starting at the second
/// revolute joint (the first joint after base yaw).
inline double reach(const RigidBodyModel& model) {
  const auto tool = model.resolve_frame(model.tool_frame);
  if (!tool) throw NotFound("tool frame '" + model.tool_frame + "' does not exist");
  std::vector<int> path;
  for (int link = tool->first; link != 0;) {
    const int j = model.index.link_joint[static_cast<std::size_t>(link)];
    path.push_back(j);
    link = model.index.joint_parent[static_cast<std::size_t>(j)];
  }
  std::reverse(path.begin(), path.end());
  int revolute_seen = 0;
  double total = 0.0;
  for (int j : path) {
    const auto& joint = model.joints[static_cast<std::size_t>(j)];
    if (revolute_seen >= 2) total += joint.origin.translation().norm();
    if (joint.kind == JointKind::kRevolute) ++revolute_seen;
  }
  return total + tool->second.translation().norm();
}

}  // namespace armsizer::model
