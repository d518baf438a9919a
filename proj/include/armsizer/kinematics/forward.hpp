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

#include <algorithm>

namespace armsizer::kinematics {

using model::RigidBodyModel;

/// World-frame kinematic state of one link. `v` and `a` refer to the link
/// origin; all vectors are world-aligned.
struct LinkState {
  Transform pose = Transform::Identity();
  Vec3 omega = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 alpha = Vec3::Zero();
  Vec3 a = Vec3::Zero();
};

/// Per-joint world axis and location, filled alongside link states.
struct JointAxis {
  Vec3 axis = Vec3::Zero();
  Vec3 point = Vec3::Zero();
};

struct TreeState {
  std::vector<LinkState> links;
  std::vector<JointAxis> joints;
};

inline void check_dimension(const RigidBodyModel& model, const VecX& q, const char* what) {
  if (q.size() != model.n()) {
    throw InvalidArgument(std::string(what) + " has length " + std::to_string(q.size()) +
                          ", model expects " + std::to_string(model.n()));
  }
}

/// Poses only.
inline TreeState link_poses(const RigidBodyModel& model, const VecX& q) {
  check_dimension(model, q, "q");
  TreeState s;
  s.links.resize(model.links.size());
  s.joints.resize(model.joints.size());
  for (std::size_t j = 0; j < model.joints.size(); ++j) {
    const auto& joint = model.joints[j];
    const auto& parent = s.links[static_cast<std::size_t>(model.index.joint_parent[j])];
    auto& child = s.links[static_cast<std::size_t>(model.index.joint_child[j])];
    const Transform frame = parent.pose * joint.origin;
    child.pose = frame;
    const int c = model.index.joint_coord[j];
    if (c >= 0) child.pose.rotate(Eigen::AngleAxisd(q(c), joint.axis));
    s.joints[j].axis = frame.linear() * joint.axis;
    s.joints[j].point = frame.translation();
  }
  return s;
}

/// Recursive velocity/acceleration pass. `base_acceleration` is the linear
/// acceleration given to the base (use -gravity for Newton-Euler).
inline TreeState forward_pass(const RigidBodyModel& model, const VecX& q, const VecX& qd,
                              const VecX& qdd, const Vec3& base_acceleration = Vec3::Zero()) {
  check_dimension(model, qd, "qd");
  check_dimension(model, qdd, "qdd");
  TreeState s = link_poses(model, q);
  s.links[0].a = base_acceleration;
  for (std::size_t j = 0; j < model.joints.size(); ++j) {
    const auto& parent = s.links[static_cast<std::size_t>(model.index.joint_parent[j])];
    auto& child = s.links[static_cast<std::size_t>(model.index.joint_child[j])];
    const Vec3 r = child.pose.translation() - parent.pose.translation();
    child.omega = parent.omega;
    child.alpha = parent.alpha;
    child.v = parent.v + parent.omega.cross(r);
    child.a = parent.a + parent.alpha.cross(r) + parent.omega.cross(parent.omega.cross(r));
    const int c = model.index.joint_coord[j];
    if (c >= 0) {
      const Vec3& z = s.joints[j].axis;
      child.omega += z * qd(c);
      child.alpha += z * qdd(c) + parent.omega.cross(z * qd(c));
    }
  }
  return s;
}

/// Point velocity/acceleration of a point rigidly attached to a link.
inline Vec3 point_velocity(const LinkState& l, const Vec3& p) {
  return l.v + l.omega.cross(p - l.pose.translation());
}

inline Vec3 point_acceleration(const LinkState& l, const Vec3& p) {
  const Vec3 rho = p - l.pose.translation();
  return l.a + l.alpha.cross(rho) + l.omega.cross(l.omega.cross(rho));
}

inline std::pair<int, Transform> resolve_frame_or_throw(const RigidBodyModel& model,
                                                        const std::string& frame) {
  auto f = model.resolve_frame(frame);
  if (!f) throw NotFound("unknown frame '" + frame + "'");
  return *f;
}

/// Joints between the base and `link`, ordered base first.
inline std::vector<int> support_path(const RigidBodyModel& model, int link) {
  std::vector<int> path;
  while (link != 0) {
    const int j = model.index.link_joint[static_cast<std::size_t>(link)];
    path.push_back(j);
    link = model.index.joint_parent[static_cast<std::size_t>(j)];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

inline Transform frame_pose(const RigidBodyModel& model, const TreeState& s, const std::string& frame) {
  const auto [link, placement] = resolve_frame_or_throw(model, frame);
  return s.links[static_cast<std::size_t>(link)].pose * placement;
}

/// World pose of `frame` at configuration q.
inline Transform forward_kinematics(const RigidBodyModel& model, const VecX& q, const std::string& frame) {
  const auto [link, placement] = resolve_frame_or_throw(model, frame);
  return link_poses(model, q).links[static_cast<std::size_t>(link)].pose * placement;
}

/// 6 x n world-aligned Jacobian of `frame` (linear rows, then angular).
inline Mat6X frame_jacobian(const RigidBodyModel& model, const TreeState& s, const std::string& frame) {
  const auto [link, placement] = resolve_frame_or_throw(model, frame);
  const Vec3 p = (s.links[static_cast<std::size_t>(link)].pose * placement).translation();
  Mat6X jac = Mat6X::Zero(6, model.n());
  for (int j : support_path(model, link)) {
    const int c = model.index.joint_coord[static_cast<std::size_t>(j)];
    if (c < 0) continue;
    const auto& ax = s.joints[static_cast<std::size_t>(j)];
    jac.block<3, 1>(0, c) = ax.axis.cross(p - ax.point);
    jac.block<3, 1>(3, c) = ax.axis;
  }
  return jac;
}

inline Mat6X frame_jacobian(const RigidBodyModel& model, const VecX& q, const std::string& frame) {
  return frame_jacobian(model, link_poses(model, q), frame);
}

}  // namespace armsizer::kinematics
