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

#include <armsizer/common.hpp>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace armsizer::model {

/// Mass properties of one rigid link. `com` is in the link frame and
/// `inertia` is taken about the COM, expressed in the link frame.
struct LinkInertia {
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();

  bool operator==(const LinkInertia&) const = default;
};

struct Link {
  std::string name;
  LinkInertia inertia;

  bool operator==(const Link&) const = default;
};

enum class JointKind { kRevolute, kFixed };
enum class JointRole { kActuated, kPassive };

/// A joint connects parent_link to child_link. The child frame sits at
/// `origin` (expressed in the parent frame) rotated by q about `axis`
/// (expressed in the joint frame).
struct JointSpec {
  std::string name;
  JointKind kind = JointKind::kRevolute;
  Vec3 axis = Vec3::UnitZ();
  std::string parent_link;
  std::string child_link;
  JointRole role = JointRole::kActuated;
  double lower = -kPi;
  double upper = kPi;
  double velocity_limit = 1.0;
  Transform origin = Transform::Identity();

  bool operator==(const JointSpec& o) const {
    return name == o.name && kind == o.kind && axis == o.axis &&
           parent_link == o.parent_link && child_link == o.child_link &&
           role == o.role && lower == o.lower && upper == o.upper &&
           velocity_limit == o.velocity_limit &&
           origin.matrix() == o.origin.matrix();
  }
};

/// A named frame rigidly attached to a link.
struct FrameSpec {
  std::string name;
  std::string link;
  Transform placement = Transform::Identity();

  bool operator==(const FrameSpec& o) const {
    return name == o.name && link == o.link &&
           placement.matrix() == o.placement.matrix();
  }
};

enum class Dof { kX, kY, kZ, kRx, kRy, kRz };

inline bool is_rotational(Dof d) { return d == Dof::kRx || d == Dof::kRy || d == Dof::kRz; }
inline int dof_axis(Dof d) { return static_cast<int>(d) % 3; }

/// Loop closure: frame_b must coincide with frame_a along each listed dof.
/// Each dof contributes one scalar residual, measured in frame_a.
struct LoopClosureSpec {
  std::string frame_a;
  std::string frame_b;
  std::vector<Dof> dofs;

  bool operator==(const LoopClosureSpec&) const = default;
};

/// Exponents for geometric similarity: lengths ~ s, masses ~ s^mass_exponent,
/// inertias ~ s^inertia_exponent.
struct ScalingLaw {
  double length_exponent = 1.0;
  double mass_exponent = 3.0;
  double inertia_exponent = 5.0;

  static ScalingLaw geometric() { return {1.0, 3.0, 5.0}; }
  static ScalingLaw calibrated() { return {1.0, 1.7, 3.7}; }

  bool operator==(const ScalingLaw&) const = default;
};

struct PayloadSpec {
  double mass = 0.0;
  Vec3 com_offset = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();
};

/// Topology lookups derived from the joint list. Rebuilt by finalize().
struct ModelIndex {
  std::vector<int> joint_parent;   // link index
  std::vector<int> joint_child;    // link index
  std::vector<int> joint_coord;    // coordinate index, -1 for fixed joints
  std::vector<int> coord_joint;    // inverse of joint_coord
  std::vector<int> link_joint;     // joint whose child is the link, -1 for base
  int n = 0;
  int n_a = 0;
  int n_p = 0;
  int m = 0;  // total constrained dofs over all closures
};

/// The geometric and inertial description of a manipulator. Link 0 is the
/// fixed base. Joints are listed in topological order. Generalized
/// coordinates are ordered actuated block first, then passive block, each
/// in joint-list order.
struct RigidBodyModel {
  std::string kind = "custom";
  std::vector<Link> links;
  std::vector<JointSpec> joints;
  std::vector<FrameSpec> frames;
  std::vector<LoopClosureSpec> closures;
  std::string tool_frame;
  double scale = 1.0;
  ScalingLaw scaling_law;
  VecX reference_q;
  ModelIndex index;

  int n() const { return index.n; }
  int n_a() const { return index.n_a; }
  int n_p() const { return index.n_p; }
  int m() const { return index.m; }

  std::optional<int> find_link(const std::string& name) const {
    for (std::size_t i = 0; i < links.size(); ++i) {
      if (links[i].name == name) return static_cast<int>(i);
    }
    return std::nullopt;
  }

  std::optional<int> find_joint(const std::string& name) const {
    for (std::size_t i = 0; i < joints.size(); ++i) {
      if (joints[i].name == name) return static_cast<int>(i);
    }
    return std::nullopt;
  }

  /// Resolves a frame identifier (named frame or link name) to its link
  /// index and placement in that link.
  std::optional<std::pair<int, Transform>> resolve_frame(const std::string& name) const {
    for (const auto& f : frames) {
      if (f.name == name) {
        auto l = find_link(f.link);
        if (!l) return std::nullopt;
        return std::make_pair(*l, f.placement);
      }
    }
    if (auto l = find_link(name)) return std::make_pair(*l, Transform(Transform::Identity()));
    return std::nullopt;
  }

  double total_mass() const {
    double sum = 0.0;
    for (const auto& l : links) sum += l.inertia.mass;
    return sum;
  }

  /// Coordinate index of an actuated joint given its rank among actuated joints.
  int actuated_joint(int k) const { return index.coord_joint.at(static_cast<std::size_t>(k)); }

  /// Joint driving coordinate k.
  const JointSpec& coordinate_joint(int k) const {
    return joints.at(static_cast<std::size_t>(index.coord_joint.at(static_cast<std::size_t>(k))));
  }

  /// Rebuilds `index`. Throws InvalidArgument when the joint list does not
  /// describe a tree rooted at links[0].
  void finalize() {
    ModelIndex idx;
    const std::size_t nj = joints.size();
    idx.joint_parent.assign(nj, -1);
    idx.joint_child.assign(nj, -1);
    idx.joint_coord.assign(nj, -1);
    idx.link_joint.assign(links.size(), -1);
    for (std::size_t j = 0; j < nj; ++j) {
      auto p = find_link(joints[j].parent_link);
      auto c = find_link(joints[j].child_link);
      require(p.has_value(), "joint '" + joints[j].name + "' references unknown parent link");
      require(c.has_value(), "joint '" + joints[j].name + "' references unknown child link");
      require(*c != 0, "joint '" + joints[j].name + "' uses the base as child");
      require(idx.link_joint[*c] == -1, "link '" + links[*c].name + "' has two parent joints");
      require(*p == 0 || idx.link_joint[*p] != -1,
              "joint '" + joints[j].name + "' is not in topological order");
      idx.joint_parent[j] = *p;
      idx.joint_child[j] = *c;
      idx.link_joint[*c] = static_cast<int>(j);
    }
    for (int pass = 0; pass < 2; ++pass) {
      const JointRole role = pass == 0 ? JointRole::kActuated : JointRole::kPassive;
      for (std::size_t j = 0; j < nj; ++j) {
        if (joints[j].kind != JointKind::kRevolute || joints[j].role != role) continue;
        idx.joint_coord[j] = static_cast<int>(idx.coord_joint.size());
        idx.coord_joint.push_back(static_cast<int>(j));
        (pass == 0 ? idx.n_a : idx.n_p)++;
      }
    }
    idx.n = idx.n_a + idx.n_p;
    for (const auto& c : closures) idx.m += static_cast<int>(c.dofs.size());
    index = std::move(idx);
    if (reference_q.size() != index.n) reference_q = VecX::Zero(index.n);
  }
};

/// Scenario inputs applied on top of a built model.
struct FrictionParams {
  double viscous = 0.0;  // N*m*s/rad, motor side
  double coulomb = 0.0;  // N*m, motor side
};

}  // namespace armsizer::model
